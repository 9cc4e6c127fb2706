// Shapes, propagators and the operational order test

#include "ddsim/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ddsim {

double PulseShape::rotation_angle() const
{
    double sum = 0.0;
    for (const auto& s : segments) sum += s.amplitude * s.fraction;
    return 2.0 * sum * tau_nom;
}

double PulseShape::max_amplitude() const
{
    double m = 0.0;
    for (const auto& s : segments) m = std::max(m, std::abs(s.amplitude));
    return m;
}

PulseShape PulseShape::rescaled(double tau) const
{
    if (!(tau > 0.0)) throw std::invalid_argument("pulse duration must be positive");
    PulseShape out = *this;
    const double scale = tau_nom / tau;
    for (auto& s : out.segments) s.amplitude *= scale;
    out.tau_nom = tau;
    return out;
}

PulseShape PulseShape::stretch(double new_tau) const
{
    if (!(new_tau > 0.0)) throw std::invalid_argument("stretch: new_tau must be positive");
    if (new_tau < tau_nom * (1.0 - 1e-12)) {
        throw ContractError("stretch: pulses may only be lengthened");
    }
    return rescaled(new_tau);
}

void PulseShape::validate() const
{
    if (segments.empty()) throw ContractError("pulse shape '" + name + "' has no segments");
    if (!(tau_nom > 0.0)) throw ContractError("pulse shape '" + name + "' has non-positive duration");
    double total = 0.0;
    for (const auto& s : segments) {
        if (!(s.fraction > 0.0)) throw ContractError("pulse shape '" + name + "' has a non-positive fraction");
        total += s.fraction;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ContractError("pulse shape '" + name + "' fractions do not sum to 1");
    }
    const double wrapped = std::remainder(rotation_angle() - target_angle, 4.0 * kPi);
    if (std::abs(wrapped) > 1e-10) {
        throw ContractError("pulse shape '" + name + "' does not rotate by its target angle");
    }
    if (a_max > 0.0 && max_amplitude() > a_max * (1.0 + 1e-12)) {
        throw AmplitudeError("pulse shape '" + name + "' exceeds a_max");
    }
}

PulseShape rect_pi(double tau, double a_max)
{
    if (!(tau > 0.0)) throw std::invalid_argument("rect_pi: tau must be positive");
    PulseShape s;
    s.name = "rect";
    s.segments = {{kPi / (2.0 * tau), 1.0}};
    s.tau_nom = tau;
    s.target_angle = kPi;
    s.order = 0;
    s.a_max = a_max;
    s.validate();
    return s;
}

// A full turn at constant amplitude already cancels the first-order terms.
PulseShape rect_2pi(double tau, double a_max)
{
    if (!(tau > 0.0)) throw std::invalid_argument("rect_2pi: tau must be positive");
    PulseShape s;
    s.name = "rect2pi";
    s.segments = {{kPi / tau, 1.0}};
    s.tau_nom = tau;
    s.target_angle = 2.0 * kPi;
    s.order = 1;
    s.a_max = a_max;
    s.validate();
    return s;
}

PulseShape scorpse_pi(double tau, double a_max)
{
    if (!(tau > 0.0)) throw std::invalid_argument("scorpse_pi: tau must be positive");
    // rotation angles -pi/3, 5pi/3, -pi/3 at constant |v|; sum |angle| = 7 pi/3
    const double v = 7.0 * kPi / (6.0 * tau);
    PulseShape s;
    s.name = "scorpse";
    s.segments = {{-v, 1.0 / 7.0}, {v, 5.0 / 7.0}, {-v, 1.0 / 7.0}};
    s.tau_nom = tau;
    s.target_angle = kPi;
    s.order = 1;
    s.a_max = a_max;
    s.validate();
    return s;
}

PulseShape shape_from_normalized(const std::string& name,
                                 const std::vector<PulseSegment>& normalized,
                                 double angle, int order, double tau, double a_max)
{
    if (!(tau > 0.0)) throw std::invalid_argument("pulse duration must be positive");
    PulseShape s;
    s.name = name;
    s.segments = normalized;
    for (auto& seg : s.segments) seg.amplitude /= tau;
    s.tau_nom = tau;
    s.target_angle = angle;
    s.order = order;
    s.a_max = a_max;
    s.validate();
    return s;
}

CMatrix pulse_propagator(const PulseShape& shape, const CMatrix& h, const CMatrix& x)
{
    CMatrix u = CMatrix::Identity(h.rows(), h.cols());
    for (const auto& s : shape.segments) {
        u = expm_hermitian(CMatrix(h + s.amplitude * x), s.fraction * shape.tau_nom) * u;
    }
    return u;
}

CMatrix ideal_rotation(double angle, Index dim)
{
    const CMatrix id = CMatrix::Identity(dim, dim);
    return std::cos(angle / 2.0) * id - Complex(0.0, std::sin(angle / 2.0)) * qubit_x(dim);
}

double pulse_residual(const PulseShape& shape, const HamiltonianPair& bath)
{
    const CMatrix up = pulse_propagator(shape, bath.h, qubit_x(bath.dim));
    const CMatrix ref = expm_hermitian(bath.b0_full, shape.tau_nom) * ideal_rotation(shape.target_angle, bath.dim);
    return (up - ref).norm();
}

HamiltonianPair pulse_test_bath()
{
    BathSpec spec;
    spec.topology = Topology::Chain;
    spec.spins = 3;
    spec.alpha = 10.0;
    spec.lambda = 1.0;
    return build_chain(spec);
}

namespace {

constexpr double kResidualFloor = 1e-13;

double slope(const std::vector<std::pair<double, double>>& pts)
{
    const double n = double(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [t, r] : pts) {
        const double lx = std::log(t), ly = std::log(r);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

OrderReport order_verify(const PulseShape& shape, const HamiltonianPair& bath, int ladder_size)
{
    if (ladder_size < 4) throw ContractError("order_verify: ladder_size must be at least 4");
    OrderReport rep;
    const CMatrix x = qubit_x(bath.dim);
    const CMatrix pi = ideal_rotation(shape.target_angle, bath.dim);
    const HermitianEigen free_b0(bath.b0_full);
    std::vector<std::pair<double, double>> usable;
    for (int k = 0; k < ladder_size; ++k) {
        const double tau = shape.tau_nom * std::ldexp(1.0, -k);
        const PulseShape s = shape.rescaled(tau);
        const double r = (pulse_propagator(s, bath.h, x) - free_b0.propagator(tau) * pi).norm();
        rep.residuals.emplace_back(tau, r);
        if (r >= kResidualFloor) {
            usable.emplace_back(tau, r);
        } else {
            rep.warnings.push_back("residual " + std::to_string(r) + " at tau=" + std::to_string(tau) +
                                   " is below the roundoff floor; ladder shortened");
        }
    }
    if (usable.size() < 3) {
        throw AccuracyError("order_verify: fewer than 3 ladder points above the roundoff floor");
    }
    rep.fitted_exponent = slope(usable);
    rep.verdict = int(std::floor(rep.fitted_exponent - 0.5 + 0.3));
    return rep;
}

PulseShape CatalogEntry::instantiate(double tau, double a_max) const
{
    return shape_from_normalized(name, segments, angle, order, tau, a_max);
}

PulseShape named_shape(const std::string& name, double tau, double a_max,
                       const std::vector<CatalogEntry>& catalog)
{
    if (name == "rect") return rect_pi(tau, a_max);
    if (name == "scorpse") return scorpse_pi(tau, a_max);
    if (name == "rect2pi") return rect_2pi(tau, a_max);
    return find_entry(catalog, name).instantiate(tau, a_max);
}

} // namespace ddsim
