#include "ddsim/filter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ddsim {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Switching function as point weights: g(z) = sum_m a_m e^{-iz p_m}
std::vector<std::pair<double, double>> jump_weights(const FilterSpec& spec)
{
    std::vector<std::pair<double, double>> w{{1.0, 0.0}, {(spec.N % 2 ? 1.0 : -1.0), 1.0}};
    for (int j = 1; j <= spec.N; ++j) {
        const double sign = j % 2 ? -1.0 : 1.0;
        const double d = spec.deltas[std::size_t(j - 1)], h = spec.widths[std::size_t(j - 1)] / 2.0;
        w.push_back({sign, d - h});
        w.push_back({sign, d + h});
    }
    return w;
}

// Piecewise-constant switching function: breakpoints and the value after each.
struct Piece {
    double a, b, value;
};

std::vector<Piece> switching_pieces(const FilterSpec& spec)
{
    std::vector<Piece> out;
    double t = 0.0, sign = 1.0;
    for (int j = 0; j < spec.N; ++j) {
        const double lo = spec.deltas[std::size_t(j)] - spec.widths[std::size_t(j)] / 2.0;
        const double hi = spec.deltas[std::size_t(j)] + spec.widths[std::size_t(j)] / 2.0;
        if (lo > t) out.push_back({t, lo, sign});
        t = std::max(t, hi);
        sign = -sign;
    }
    if (t < 1.0) out.push_back({t, 1.0, sign});
    return out;
}

// Smooth integrand on [a, b], split into panels no longer than `panel`.
template <typename F>
double integrate_panels(F f, double a, double b, double panel, double tol, double& err)
{
    if (!(b > a)) return 0.0;
    const int n = std::max(1, int(std::ceil((b - a) / panel)));
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double lo = a + k * h, hi = a + (k + 1) * h;
        // Boost's |K - G| estimate stalls near 1e-12 even for smooth panels; compare two
        // Kronrod orders instead, refining adaptively only when they disagree
        const double fine = gauss_kronrod<double, 61>::integrate(f, lo, hi, 0);
        const double coarse = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0);
        if (std::abs(fine - coarse) <= tol * std::max(1.0, std::abs(fine))) {
            sum += fine;
            err += std::abs(fine - coarse);
        } else {
            double e = 0.0;
            sum += gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, tol, &e);
            err += e;
        }
    }
    return sum;
}

} // namespace

void FilterSpec::validate() const
{
    if (N < 0) throw ContractError("filter spec: negative pulse count");
    if (deltas.size() != std::size_t(N) || widths.size() != std::size_t(N)) {
        throw ContractError("filter spec: need one centre and one width per pulse");
    }
    for (int j = 0; j < N; ++j) {
        const double d = deltas[std::size_t(j)], h = widths[std::size_t(j)] / 2.0;
        if (!(d > 0.0 && d < 1.0)) throw ContractError("filter spec: centres must lie in (0, 1)");
        if (j && !(d > deltas[std::size_t(j - 1)])) throw ContractError("filter spec: centres must increase");
        if (h < 0.0 || d - h < -1e-12 || d + h > 1.0 + 1e-12) {
            throw ContractError("filter spec: pulse window leaves [0, 1]");
        }
        if (j && d - h < deltas[std::size_t(j - 1)] + widths[std::size_t(j - 1)] / 2.0 - 1e-12) {
            throw ContractError("filter spec: pulse windows overlap");
        }
    }
}

FilterSpec filter_spec(const Schedule& s)
{
    FilterSpec spec;
    for (const auto& e : s.events) {
        if (e.kind != EventKind::Pi) continue;
        spec.deltas.push_back(e.center / s.T);
        spec.widths.push_back(e.duration / s.T);
    }
    spec.N = int(spec.deltas.size());
    spec.validate();
    return spec;
}

FilterSpec ideal_filter_spec(const std::vector<double>& instants, double T)
{
    FilterSpec spec;
    spec.N = int(instants.size());
    for (double t : instants) spec.deltas.push_back(t / T);
    spec.widths.assign(instants.size(), 0.0);
    spec.validate();
    return spec;
}

double filter_closed_form(const FilterSpec& spec, double z, bool without_alternation)
{
    spec.validate();
    const Complex i(0.0, 1.0);
    Complex g = 1.0 + (spec.N % 2 ? 1.0 : -1.0) * std::exp(-i * z);
    for (int j = 1; j <= spec.N; ++j) {
        const double d = spec.deltas[std::size_t(j - 1)], w = spec.widths[std::size_t(j - 1)];
        if (without_alternation) {
            g += 2.0 * std::exp(i * z * d) * std::cos(z * w / 2.0);
        } else {
            g += 2.0 * (j % 2 ? -1.0 : 1.0) * std::exp(-i * z * d) * std::cos(z * w / 2.0);
        }
    }
    return std::norm(g);
}

double filter_oracle(const FilterSpec& spec, double z)
{
    spec.validate();
    // panels of a quarter oscillation period keep every Kronrod rule well resolved
    const double panel = z > 0.0 ? std::min(1.0, 0.5 * kPi / z) : 1.0;
    double re = 0.0, im = 0.0, err = 0.0;
    for (const auto& p : switching_pieces(spec)) {
        re += p.value * integrate_panels([z](double u) { return std::cos(z * u); }, p.a, p.b, panel, 1e-14, err);
        im += p.value * integrate_panels([z](double u) { return std::sin(z * u); }, p.a, p.b, panel, 1e-14, err);
    }
    const double F = z * z * (re * re + im * im);
    // dF ~ 2 |z|^2 |I| dI
    const double bound = 2.0 * z * z * std::sqrt(re * re + im * im) * err + z * z * err * err;
    if (!(bound < 1e-10)) throw AccuracyError("filter_oracle: quadrature did not reach 1e-10");
    return F;
}

int small_z_exponent(const FilterSpec& spec)
{
    spec.validate();
    const auto w = jump_weights(spec);
    // g(z) = sum_k (-iz)^k/k! mu_k; the first non-vanishing moment sets the exponent
    for (int k = 0; k < 40; ++k) {
        long double mu = 0.0L, scale = 0.0L;
        for (const auto& [a, p] : w) {
            const long double term = a * std::pow((long double)p, k);
            mu += term;
            scale += std::abs(term);
        }
        if (std::abs(mu) > 1e-10L * std::max(scale, 1.0L)) return 2 * k;
    }
    return 80;
}

double SpectralDensity::operator()(double w) const
{
    if (w <= 0.0) return 0.0;
    switch (kind) {
    case SpectrumKind::Ohmic: return w < cutoff ? amplitude * w : 0.0;
    case SpectrumKind::OneOverF: return w < cutoff ? amplitude / w : 0.0;
    case SpectrumKind::Lorentzian: return amplitude * cutoff / (cutoff * cutoff + w * w);
    case SpectrumKind::Tabulated: {
        if (table.empty() || w < table.front().first || w > table.back().first) return 0.0;
        auto it = std::lower_bound(table.begin(), table.end(), w,
                                   [](const auto& row, double x) { return row.first < x; });
        if (it == table.begin()) return it->second;
        const auto& [w1, s1] = *it;
        const auto& [w0, s0] = *(it - 1);
        return s0 + (s1 - s0) * (w - w0) / (w1 - w0);
    }
    }
    return 0.0;
}

double SpectralDensity::low_frequency_exponent() const
{
    switch (kind) {
    case SpectrumKind::Ohmic: return 1.0;
    case SpectrumKind::OneOverF: return -1.0;
    case SpectrumKind::Lorentzian: return 0.0;
    case SpectrumKind::Tabulated: return (table.empty() || table.front().first > 0.0) ? 1e9 : 0.0;
    }
    return 0.0;
}

bool SpectralDensity::bounded_support() const
{
    return kind != SpectrumKind::Lorentzian;
}

double SpectralDensity::support_end() const
{
    switch (kind) {
    case SpectrumKind::Ohmic:
    case SpectrumKind::OneOverF: return cutoff;
    case SpectrumKind::Tabulated: return table.empty() ? 0.0 : table.back().first;
    case SpectrumKind::Lorentzian: return INFINITY;
    }
    return 0.0;
}

SpectralDensity SpectralDensity::ohmic(double amplitude, double cutoff)
{
    return {SpectrumKind::Ohmic, amplitude, cutoff, {}};
}

SpectralDensity SpectralDensity::one_over_f(double amplitude, double cutoff)
{
    return {SpectrumKind::OneOverF, amplitude, cutoff, {}};
}

SpectralDensity SpectralDensity::lorentzian(double amplitude, double width)
{
    return {SpectrumKind::Lorentzian, amplitude, width, {}};
}

SpectralDensity SpectralDensity::tabulated(std::vector<std::pair<double, double>> table)
{
    std::sort(table.begin(), table.end());
    for (const auto& row : table) {
        if (row.second < 0.0) throw ConfigError("spectral table: S must be non-negative");
    }
    return {SpectrumKind::Tabulated, 1.0, 0.0, std::move(table)};
}

SpectralDensity SpectralDensity::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read spectral table " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double w, s;
        if (ss >> w >> s) rows.emplace_back(w, s);
    }
    if (rows.size() < 2) throw ConfigError("spectral table " + path + " needs at least two rows");
    return tabulated(std::move(rows));
}

SpectrumKind spectrum_kind_from_string(const std::string& name)
{
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    if (key == "ohmic") return SpectrumKind::Ohmic;
    if (key == "1/f" || key == "one_over_f" || key == "oneoverf") return SpectrumKind::OneOverF;
    if (key == "lorentzian") return SpectrumKind::Lorentzian;
    if (key == "tabulated") return SpectrumKind::Tabulated;
    throw ConfigError("unknown spectral density '" + name + "'");
}

FilterEval chi(const FilterSpec& spec, const SpectralDensity& S, double T)
{
    spec.validate();
    if (!(T > 0.0)) throw ContractError("chi: T must be positive");
    FilterEval out;
    out.T = T;
    if (S.kind != SpectrumKind::Tabulated && S.amplitude == 0.0) return out;

    // integrand S(w) F(wT)/w^2 ~ w^(a + p - 2) near 0
    const double a = S.low_frequency_exponent();
    const int p = small_z_exponent(spec);
    if (a + p - 2.0 <= -1.0) {
        std::ostringstream msg;
        msg << "chi diverges at small frequency: S ~ w^" << a << " and F ~ z^" << p
            << " leave an exponent deficit of " << (-1.0 - (a + p - 2.0)) << " (need a + p > 1)";
        throw IntegrabilityError(msg.str());
    }

    auto integrand = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double z = w * T;
        return S(w) * filter_closed_form(spec, z) / (w * w);
    };
    // F oscillates with period ~2 pi/T in w
    const double panel = 0.5 * kPi / T;
    double err = 0.0;
    double upper = S.support_end();
    if (!S.bounded_support()) {
        // beyond W the tail is below 4(N+1)^2 A gamma / (3 W^3)
        upper = std::max(50.0 * S.cutoff, 200.0 / T);
    }
    double value = integrate_panels(integrand, 0.0, upper, panel, 1e-12, err);
    if (!S.bounded_support()) {
        const double cap = 4.0 * (spec.N + 1.0) * (spec.N + 1.0) * S.amplitude * S.cutoff;
        for (int k = 0; k < 30 && cap / (3.0 * upper * upper * upper) > 1e-10 * std::abs(value); ++k) {
            value += integrate_panels(integrand, upper, 2.0 * upper, panel, 1e-12, err);
            upper *= 2.0;
        }
    }
    if (!(err <= 1e-9 * std::abs(value) + 1e-14)) throw AccuracyError("chi: quadrature did not converge");
    out.chi = value;
    out.s = std::exp(-2.0 * value);
    return out;
}

} // namespace ddsim
