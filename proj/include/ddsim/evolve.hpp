// Exact propagation of qubit + bath under a schedule, and the
// partial Frobenius distance
//
//   Delta_pF^2 = (1/3) sum_gamma tr_q[ rho_q^(gamma) ]^2,
//   rho_q^(gamma) = tr_B[ sigma_x^N rho_0 sigma_x^N - R rho_0 R^dagger ],
//   rho_0^(gamma) = |gamma><gamma| (x) 1_B / 2^M.

#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "ddsim/sequences.hpp"
#include "ddsim/spinbath.hpp"

namespace ddsim {

struct Segment {
    double amplitude{0.0};  // control v; 0 for free evolution
    double duration{0.0};
    int event{-1};          // index into Schedule::events, -1 for free gaps
};

struct SegmentList {
    std::vector<Segment> segments;
    double T{0.0};
    double total_duration() const;
};

struct AxisResult {
    Eigen::Matrix2cd rho_q;    // tr_B[rho_id - rho_qB]
    double contribution{0.0};  // tr[rho_q^2]
    double trace_qB{0.0};      // tr(rho_qB), 1 up to roundoff
};

struct DistanceResult {
    double delta_pF{0.0};
    std::array<AxisResult, 3> per_axis;  // x, y, z
    double unitarity{0.0};               // max |R^dagger R - 1|
};

SegmentList compile(const Schedule& s, const HamiltonianPair& h);
// Direct product of segment exponentials, one eigendecomposition per segment.
CMatrix propagate(const SegmentList& segs, const HamiltonianPair& h);

// Delta_pF from the total propagator; n_pi is the number of ideal pi flips.
DistanceResult distance_from_propagator(const CMatrix& R, int n_pi, Index bath_dim);

// Caches the eigendecomposition of H and of every pulse generator it meets; a
// single instance may be shared by concurrent workers.
class Evolver {
public:
    explicit Evolver(HamiltonianPair model);

    const HamiltonianPair& model() const { return model_; }

    CMatrix propagator(const Schedule& s) const;
    // Instantaneous sigma_x flips at the given instants.
    CMatrix ideal_propagator(const std::vector<double>& instants, double T) const;

    DistanceResult distance(const Schedule& s) const;
    DistanceResult ideal_distance(SequenceKind kind, int N, double T) const;

private:
    using Block = std::vector<double>;  // (amplitude, duration) pairs of a pulse

    std::shared_ptr<const HermitianEigen> generator(double amplitude) const;
    std::shared_ptr<const CMatrix> pulse_block(const PulseEvent& e) const;  // eigenbasis of H
    CMatrix to_lab(const CMatrix& eig_basis) const;
    void apply_free(CMatrix& r, double t) const;  // r <- D(t) r in the eigenbasis

    HamiltonianPair model_;
    HermitianEigen free_;
    CMatrix x_eig_;  // V^dagger X V
    mutable std::mutex mutex_;
    mutable std::map<double, std::shared_ptr<const HermitianEigen>> generators_;
    mutable std::map<Block, std::shared_ptr<const CMatrix>> blocks_;
};

DistanceResult distance(const Schedule& s, const HamiltonianPair& h);
// RUDD is a contract error: its ideal limit is UDD. N = 0 is free evolution.
DistanceResult ideal_schedule_distance(SequenceKind kind, int N, double T, const HamiltonianPair& h);

} // namespace ddsim
