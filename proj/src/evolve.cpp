#include "ddsim/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace ddsim {

namespace {

constexpr std::size_t kCacheLimit = 512;

// |gamma><gamma| for gamma = x, y, z (positive eigenstates)
Eigen::Matrix2cd axis_projector(int axis)
{
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd p;
    switch (axis) {
    case 0: p << 0.5, 0.5, 0.5, 0.5; break;
    case 1: p << 0.5, -0.5 * i, 0.5 * i, 0.5; break;
    default: p << 1.0, 0.0, 0.0, 0.0; break;
    }
    return p;
}

} // namespace

double SegmentList::total_duration() const
{
    double sum = 0.0;
    for (const auto& s : segments) sum += s.duration;
    return sum;
}

SegmentList compile(const Schedule& s, const HamiltonianPair& h)
{
    if (h.dim < 2 || h.h.rows() != h.dim) throw ContractError("compile: model is not initialised");
    s.validate();
    SegmentList out;
    out.T = s.T;
    // rounding leaves ~1e-19 slivers between back-to-back pulses
    const double sliver = 1e-14 * s.T;
    double t = 0.0;
    for (std::size_t k = 0; k < s.events.size(); ++k) {
        const auto& e = s.events[k];
        if (e.shape.segments.empty()) throw ContractError("compile: pulse event without a shape");
        const double gap = e.t_start - t;
        if (gap > sliver) out.segments.push_back({0.0, gap, -1});
        for (const auto& seg : e.shape.segments) {
            out.segments.push_back({seg.amplitude, seg.fraction * e.duration, int(k)});
        }
        t = std::max(t, e.t_stop);
    }
    if (s.T - t > sliver) out.segments.push_back({0.0, s.T - t, -1});
    return out;
}

CMatrix propagate(const SegmentList& segs, const HamiltonianPair& h)
{
    const CMatrix x = qubit_x(h.dim);
    CMatrix r = CMatrix::Identity(h.dim, h.dim);
    for (const auto& s : segs.segments) {
        const CMatrix gen = s.amplitude == 0.0 ? h.h : CMatrix(h.h + s.amplitude * x);
        r = expm_hermitian(gen, s.duration) * r;
    }
    return r;
}

DistanceResult distance_from_propagator(const CMatrix& R, int n_pi, Index bath_dim)
{
    if (R.rows() != 2 * bath_dim || R.cols() != 2 * bath_dim) {
        throw DimensionError("distance: propagator does not match the bath dimension");
    }
    const Index d = bath_dim;
    // gram(a, c, b, e) = tr(R_ac R_be^dagger) over the d x d blocks
    Complex gram[2][2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
            for (int b = 0; b < 2; ++b)
                for (int e = 0; e < 2; ++e) {
                    gram[a][c][b][e] = (R.block(a * d, c * d, d, d).array() *
                                        R.block(b * d, e * d, d, d).conjugate().array()).sum();
                }

    Eigen::Matrix2cd flip = Eigen::Matrix2cd::Identity();
    if (n_pi % 2) flip << 0, 1, 1, 0;

    DistanceResult out;
    double sum = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        const Eigen::Matrix2cd p = axis_projector(axis);
        Eigen::Matrix2cd qb = Eigen::Matrix2cd::Zero();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int e = 0; e < 2; ++e) qb(a, b) += p(c, e) * gram[a][c][b][e];
        qb /= double(d);
        auto& ax = out.per_axis[std::size_t(axis)];
        ax.trace_qB = qb.trace().real();
        ax.rho_q = flip * p * flip - qb;
        ax.contribution = ax.rho_q.squaredNorm();
        sum += ax.contribution;
    }
    out.delta_pF = std::sqrt(sum / 3.0);
    out.unitarity = unitarity_residual(R);
    return out;
}

Evolver::Evolver(HamiltonianPair model) : model_(std::move(model)), free_(model_.h)
{
    const CMatrix& v = free_.eigenvectors();
    x_eig_ = v.adjoint() * qubit_x(model_.dim) * v;
}

std::shared_ptr<const HermitianEigen> Evolver::generator(double amplitude) const
{
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = generators_.find(amplitude);
        if (it != generators_.end()) return it->second;
    }
    auto eig = std::make_shared<const HermitianEigen>(CMatrix(model_.h + amplitude * qubit_x(model_.dim)));
    std::lock_guard<std::mutex> lock(mutex_);
    if (generators_.size() >= kCacheLimit) generators_.clear();
    return generators_.emplace(amplitude, std::move(eig)).first->second;
}

std::shared_ptr<const CMatrix> Evolver::pulse_block(const PulseEvent& e) const
{
    Block key;
    for (const auto& s : e.shape.segments) {
        key.push_back(s.amplitude);
        key.push_back(s.fraction * e.duration);
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = blocks_.find(key);
        if (it != blocks_.end()) return it->second;
    }
    const CMatrix& v = free_.eigenvectors();
    CMatrix u = CMatrix::Identity(model_.dim, model_.dim);
    for (std::size_t k = 0; k < key.size(); k += 2) {
        const auto gen = generator(key[k]);
        u = gen->propagator(key[k + 1]) * u;
    }
    auto block = std::make_shared<const CMatrix>(v.adjoint() * u * v);
    std::lock_guard<std::mutex> lock(mutex_);
    if (blocks_.size() >= kCacheLimit) blocks_.clear();
    return blocks_.emplace(std::move(key), std::move(block)).first->second;
}

void Evolver::apply_free(CMatrix& r, double t) const
{
    if (t <= 0.0) return;
    r = free_.phases(t).asDiagonal() * r;
}

CMatrix Evolver::to_lab(const CMatrix& eig_basis) const
{
    const CMatrix& v = free_.eigenvectors();
    return v * eig_basis * v.adjoint();
}

CMatrix Evolver::propagator(const Schedule& s) const
{
    s.validate();
    CMatrix r = CMatrix::Identity(model_.dim, model_.dim);
    double t = 0.0;
    for (const auto& e : s.events) {
        apply_free(r, e.t_start - t);
        r = *pulse_block(e) * r;
        t = std::max(t, e.t_stop);
    }
    apply_free(r, s.T - t);
    return to_lab(r);
}

CMatrix Evolver::ideal_propagator(const std::vector<double>& instants, double T) const
{
    CMatrix r = CMatrix::Identity(model_.dim, model_.dim);
    double t = 0.0;
    for (double c : instants) {
        if (c < t || c > T) throw ScheduleError("ideal instants must be ordered and inside [0, T]");
        apply_free(r, c - t);
        r = x_eig_ * r;
        t = c;
    }
    apply_free(r, T - t);
    return to_lab(r);
}

DistanceResult Evolver::distance(const Schedule& s) const
{
    return distance_from_propagator(propagator(s), s.pi_count(), model_.bath_dim());
}

DistanceResult Evolver::ideal_distance(SequenceKind kind, int N, double T) const
{
    if (is_rudd(kind)) throw ContractError("ideal RUDD is UDD; request UDD instead");
    if (N < 0) throw ContractError("pulse count must be non-negative");
    const std::vector<double> instants = N == 0 ? std::vector<double>{} : ideal_instants(kind, N, T);
    return distance_from_propagator(ideal_propagator(instants, T), N, model_.bath_dim());
}

DistanceResult distance(const Schedule& s, const HamiltonianPair& h)
{
    return Evolver(h).distance(s);
}

DistanceResult ideal_schedule_distance(SequenceKind kind, int N, double T, const HamiltonianPair& h)
{
    return Evolver(h).ideal_distance(kind, N, T);
}

} // namespace ddsim
