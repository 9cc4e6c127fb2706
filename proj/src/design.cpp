// Multistart Nelder-Mead search for symmetric shapes of a given order
//
// The residual matrices D(tau_k) = U_p(tau_k) - exp(-i tau_k omega_b B0) Pi on the
// ladder tau_k = tau 2^-k are interpolated as D = sum_n B_n (tau_k/tau)^n; a shape of
// order j has B_1..B_j = 0, so the objective is sum_{n<=j} ||B_n||_F^2.

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "ddsim/optimize.hpp"
#include "ddsim/pulses.hpp"

namespace ddsim {

namespace {

// Symmetric profile: free outer pairs, the central segment (odd n) or central
// pair (even n) closes the fractions to 1 and the net angle to its target.
struct SymmetricProfile {
    int n{5};
    double angle{kPi};

    int free_pairs() const { return n % 2 ? n / 2 : n / 2 - 1; }

    // false when the fractions leave no room for the closing segment(s)
    bool expand(const Eigen::VectorXd& x, std::vector<PulseSegment>& out) const
    {
        const int q = free_pairs();
        out.assign(std::size_t(n), {});
        double fsum = 0.0, asum = 0.0;
        for (int i = 0; i < q; ++i) {
            const PulseSegment s{x(i), x(q + i)};
            if (!(s.fraction > 0.0)) return false;
            out[std::size_t(i)] = out[std::size_t(n - 1 - i)] = s;
            fsum += 2.0 * s.fraction;
            asum += 2.0 * s.amplitude * s.fraction;
        }
        const int copies = n % 2 ? 1 : 2;
        const double fc = (1.0 - fsum) / copies;
        if (!(fc > 0.0)) return false;
        const PulseSegment c{(angle / 2.0 - asum) / (copies * fc), fc};
        out[std::size_t(q)] = out[std::size_t(n - 1 - q)] = c;
        return true;
    }
};

class LadderObjective {
public:
    LadderObjective(const DesignConfig& cfg, const HamiltonianPair& bath)
        : cfg_(cfg), bath_(bath), x_(qubit_x(bath.dim))
    {
        const int L = cfg.ladder_size;
        const HermitianEigen b0(bath.b0_full);
        const CMatrix pi = ideal_rotation(cfg.angle, bath.dim);
        Eigen::MatrixXd vander(L, L);
        for (int k = 0; k < L; ++k) {
            const double s = std::ldexp(1.0, -k);
            taus_.push_back(cfg.tau * s);
            refs_.push_back(b0.propagator(taus_.back()) * pi);
            for (int m = 0; m < L; ++m) vander(k, m) = std::pow(s, m + 1);
        }
        weights_ = vander.inverse();
    }

    double operator()(const std::vector<PulseSegment>& normalized) const
    {
        return residual(normalized).squaredNorm();
    }

    // Real and imaginary parts of B_1..B_j stacked.
    Eigen::VectorXd residual(const std::vector<PulseSegment>& normalized) const
    {
        const int L = cfg_.ladder_size;
        std::vector<CMatrix> d;
        d.reserve(std::size_t(L));
        for (int k = 0; k < L; ++k) {
            PulseShape s;
            s.segments = normalized;
            for (auto& seg : s.segments) seg.amplitude /= taus_[std::size_t(k)];
            s.tau_nom = taus_[std::size_t(k)];
            d.push_back(pulse_propagator(s, bath_.h, x_) - refs_[std::size_t(k)]);
        }
        const Index n2 = bath_.dim * bath_.dim;
        Eigen::VectorXd out(2 * n2 * cfg_.order_target);
        for (int m = 0; m < cfg_.order_target; ++m) {
            CMatrix b = CMatrix::Zero(bath_.dim, bath_.dim);
            for (int k = 0; k < L; ++k) b += weights_(m, k) * d[std::size_t(k)];
            const Eigen::Map<const Eigen::VectorXcd> flat(b.data(), n2);
            out.segment(2 * n2 * m, n2) = flat.real();
            out.segment(2 * n2 * m + n2, n2) = flat.imag();
        }
        return out;
    }

private:
    const DesignConfig& cfg_;
    const HamiltonianPair& bath_;
    CMatrix x_;
    std::vector<double> taus_;
    std::vector<CMatrix> refs_;
    Eigen::MatrixXd weights_;
};

// Gauss-Newton on the stacked residual with a central-difference Jacobian; the
// simplex stage only locates the basin, this reaches the roundoff floor.
Eigen::VectorXd polish(const SymmetricProfile& profile, const LadderObjective& objective,
                       Eigen::VectorXd x, int iterations)
{
    std::vector<PulseSegment> segs;
    auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        if (!profile.expand(p, segs)) return false;
        r = objective.residual(segs);
        return true;
    };
    Eigen::VectorXd r;
    if (!residual(x, r)) return x;
    for (int it = 0; it < iterations; ++it) {
        Eigen::MatrixXd jac(r.size(), x.size());
        Eigen::VectorXd rp, rm;
        bool ok = true;
        for (Eigen::Index i = 0; i < x.size() && ok; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(x(i))) * (i < x.size() / 2 ? 1.0 : 0.01);
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            ok = residual(xp, rp) && residual(xm, rm);
            if (ok) jac.col(i) = (rp - rm) / (2.0 * h);
        }
        if (!ok) break;
        const Eigen::VectorXd dx = jac.completeOrthogonalDecomposition().solve(-r);
        // halve the step until the residual drops
        double scale = 1.0;
        bool improved = false;
        Eigen::VectorXd rn;
        for (int k = 0; k < 30 && !improved; ++k, scale *= 0.5) {
            const Eigen::VectorXd xn = x + scale * dx;
            if (residual(xn, rn) && rn.squaredNorm() < r.squaredNorm()) {
                x = xn;
                r = rn;
                improved = true;
            }
        }
        if (!improved) break;
    }
    return x;
}

std::string shape_name(double angle, int order)
{
    const bool pi = std::abs(angle - kPi) < 1e-9;
    return (pi ? "pi" : "twopi") + std::to_string(order);
}

} // namespace

std::string DesignConfig::hash() const
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d|%.17g|%d|%.17g|%.17g|%d|%d|%d|%llu", order_target, angle,
                  n_segments, tau, a_max, ladder_size, starts, max_evals,
                  static_cast<unsigned long long>(seed));
    // FNV-1a, 64 bit
    std::uint64_t h = 1469598103934665603ULL;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

DesignResult design_pulse(const DesignConfig& cfg, const HamiltonianPair& test_bath)
{
    if (cfg.order_target < 0 || cfg.order_target > 2) {
        throw ContractError("design_pulse: order_target must be 0, 1 or 2");
    }
    const bool pi = std::abs(cfg.angle - kPi) < 1e-12;
    const bool twopi = std::abs(cfg.angle - 2.0 * kPi) < 1e-12;
    if (!pi && !twopi) throw ContractError("design_pulse: angle must be pi or 2 pi");
    if (!(cfg.tau > 0.0) || !(cfg.a_max > 0.0)) throw ContractError("design_pulse: tau and a_max must be positive");
    if (cfg.ladder_size < 4) throw ContractError("design_pulse: ladder_size must be at least 4");

    DesignResult result;
    result.config_hash = cfg.hash();
    const std::string name = shape_name(cfg.angle, cfg.order_target);

    if (cfg.order_target == 0) {
        // a single rectangle is already of order 0
        result.shape = shape_from_normalized(name, {{cfg.angle / 2.0, 1.0}}, cfg.angle, 0, cfg.tau, cfg.a_max);
        result.report = order_verify(result.shape, test_bath, cfg.ladder_size);
        return result;
    }
    if (cfg.n_segments < 2 * cfg.order_target + 1) {
        throw ContractError("design_pulse: n_segments must be at least 2*order_target+1");
    }

    const SymmetricProfile profile{cfg.n_segments, cfg.angle};
    const LadderObjective objective(cfg, test_bath);
    const double cap = cfg.a_max * cfg.tau;  // cap on normalized amplitudes
    const int q = profile.free_pairs();

    auto penalised = [&](const Eigen::VectorXd& x) {
        std::vector<PulseSegment> segs;
        if (!profile.expand(x, segs)) return 1e6;
        double excess = 0.0;
        for (const auto& s : segs) excess += std::max(0.0, std::abs(s.amplitude) - cap);
        if (excess > 0.0) return 1e3 * (1.0 + excess);
        return objective(segs);
    };

    double best_f = INFINITY;
    Eigen::VectorXd best_x;
    for (int start = 0; start < cfg.starts; ++start) {
        std::mt19937_64 rng(cfg.seed + std::uint64_t(start));
        std::uniform_real_distribution<double> amp(-0.75 * cap, 0.75 * cap);
        std::uniform_real_distribution<double> unit(0.05, 1.0);
        Eigen::VectorXd x(2 * q);
        std::vector<double> w(std::size_t(q) + 1);
        double wsum = 0.0;
        for (auto& v : w) wsum += (v = unit(rng));
        for (int i = 0; i < q; ++i) {
            x(i) = amp(rng);
            x(q + i) = w[std::size_t(i)] / (2.0 * wsum);
        }
        Eigen::VectorXd step(2 * q);
        step.head(q).setConstant(0.1 * cap);
        step.tail(q).setConstant(0.02);

        NelderMeadOptions opt;
        NelderMeadResult nm{x, penalised(x), 0};
        int used = 0;
        // restarts from the incumbent refresh a collapsed simplex
        for (int round = 0; round < 6 && used < cfg.max_evals; ++round) {
            opt.max_evals = cfg.max_evals - used;
            nm = nelder_mead(penalised, nm.x, step, opt);
            used += nm.evals;
            step *= 0.1;
            if (nm.f < 1e-28) break;
        }
        if (nm.f < 1e3) {
            nm.x = polish(profile, objective, nm.x, 40);
            nm.f = penalised(nm.x);
        }
        if (nm.f < best_f) {
            best_f = nm.f;
            best_x = nm.x;
            result.best_start = start;
        }
    }

    std::vector<PulseSegment> segs;
    if (best_x.size() == 0 || !profile.expand(best_x, segs) || best_f >= 1e3) {
        throw DesignError("design_pulse: no feasible shape found", OrderReport{});
    }
    result.objective = best_f;
    result.shape = shape_from_normalized(name, segs, cfg.angle, cfg.order_target, cfg.tau, cfg.a_max);
    result.report = order_verify(result.shape, test_bath, cfg.ladder_size);
    if (result.report.fitted_exponent < cfg.order_target + 1 - 0.3) {
        std::ostringstream msg;
        msg << "design_pulse: best shape reaches residual exponent " << result.report.fitted_exponent
            << " < " << cfg.order_target + 1 - 0.3;
        throw DesignError(msg.str(), result.report);
    }
    return result;
}

} // namespace ddsim
