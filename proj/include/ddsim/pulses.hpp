// Piecewise-constant control pulses on the qubit
//
// Control Hamiltonian sigma_x^(0) v(t); a constant v held for time t rotates the
// qubit by 2 v t about x, so Pi_phi = exp(-i phi/2 sigma_x).
// A shape of order j satisfies U_p(tau) = exp(-i tau omega_b B0) Pi_phi + O(tau^(j+1)).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddsim/linalg.hpp"
#include "ddsim/spinbath.hpp"

namespace ddsim {

inline constexpr double kPi = 3.14159265358979323846;

struct PulseSegment {
    double amplitude{0.0};  // v, in units of lambda
    double fraction{0.0};   // share of the pulse duration
};

struct PulseShape {
    std::string name;
    std::vector<PulseSegment> segments;
    double tau_nom{1.0};       // nominal duration
    double target_angle{kPi};  // unwrapped target rotation
    int order{0};              // claimed order j
    double a_max{0.0};         // amplitude cap

    double rotation_angle() const;  // 2 sum(v f tau)
    double max_amplitude() const;
    // Same segment angles at a different duration; may shorten (used by ladders).
    PulseShape rescaled(double tau) const;
    // Lengthen to new_tau >= tau_nom, amplitudes scaled by tau_nom/new_tau.
    PulseShape stretch(double new_tau) const;
    // Throws ContractError / AmplitudeError on broken invariants.
    void validate() const;
};

PulseShape rect_pi(double tau, double a_max);
PulseShape rect_2pi(double tau, double a_max);
PulseShape scorpse_pi(double tau, double a_max);

// Build a shape from amplitudes normalized to tau = 1 (v = a/tau).
PulseShape shape_from_normalized(const std::string& name,
                                 const std::vector<PulseSegment>& normalized,
                                 double angle, int order, double tau, double a_max);

// Time-ordered exp over the shape's segments with generator h + v x.
CMatrix pulse_propagator(const PulseShape& shape, const CMatrix& h, const CMatrix& x);

// exp(-i phi/2 sigma_x) on the qubit, identity on the bath.
CMatrix ideal_rotation(double angle, Index dim);

// || U_p(tau_nom) - exp(-i tau_nom omega_b B0) Pi_phi ||_F
double pulse_residual(const PulseShape& shape, const HamiltonianPair& bath);

// Chain, M=3, alpha=10, lambda=1: the fixed bath pulse orders are defined on.
HamiltonianPair pulse_test_bath();

struct OrderReport {
    double fitted_exponent{0.0};
    std::vector<std::pair<double, double>> residuals;  // (tau, r), tau decreasing
    int verdict{-1};                                   // certified order j
    std::vector<std::string> warnings;
};

OrderReport order_verify(const PulseShape& shape, const HamiltonianPair& bath, int ladder_size = 5);

struct DesignConfig {
    int order_target{2};
    double angle{kPi};
    int n_segments{5};
    // Small enough that the ladder interpolation bias is below roundoff.
    double tau{0.005};
    double a_max{4.0 * kPi / 0.005};
    int ladder_size{5};
    int starts{24};
    int max_evals{6000};
    std::uint64_t seed{20100501};

    // Stable digest of every field that influences the result.
    std::string hash() const;
};

struct DesignResult {
    PulseShape shape;
    OrderReport report;
    double objective{0.0};
    int best_start{-1};
    std::string config_hash;
};

struct DesignError : NumericError {
    DesignError(const std::string& what, OrderReport best)
        : NumericError(what), report(std::move(best)) {}
    OrderReport report;
};

DesignResult design_pulse(const DesignConfig& cfg, const HamiltonianPair& test_bath);

// Shapes catalog: one [shape.NAME] record per shape, amplitudes normalized to tau = 1.
struct CatalogEntry {
    std::string name;
    int order{0};
    double angle{kPi};
    std::vector<PulseSegment> segments;
    std::string config_hash;
    std::uint64_t seed{0};

    PulseShape instantiate(double tau, double a_max) const;
};

std::vector<CatalogEntry> read_catalog(const std::string& path);
void write_catalog(const std::string& path, const std::vector<CatalogEntry>& entries);
const CatalogEntry& find_entry(const std::vector<CatalogEntry>& entries, const std::string& name);
CatalogEntry to_entry(const PulseShape& shape, const std::string& config_hash, std::uint64_t seed);

// Catalog path used when none is configured.
std::string default_catalog_path();

// Shapes by name: "rect", "rect2pi", "scorpse", or any catalog entry.
PulseShape named_shape(const std::string& name, double tau, double a_max,
                       const std::vector<CatalogEntry>& catalog);

} // namespace ddsim
