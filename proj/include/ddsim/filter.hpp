// Filter function of a finite-width pi-pulse sequence and the decay
// integral chi(T) = int_0^inf S(w)/w^2 F(wT) dw, s(T) = exp(-2 chi)
//
// With z = wT, pulse j centred at delta_j T and width w_j = tau^(j)/T:
//   F(z) = |1 + (-1)^(N+1) e^{-iz} + 2 sum_j (-1)^j e^{-iz delta_j} cos(z w_j/2)|^2,
// valid when the qubit-bath coupling vanishes while a pulse is on.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddsim/sequences.hpp"

namespace ddsim {

struct FilterSpec {
    int N{0};
    std::vector<double> deltas;  // centres over T, strictly increasing in (0, 1)
    std::vector<double> widths;  // durations over T

    void validate() const;
};

FilterSpec filter_spec(const Schedule& s);  // pi events only
FilterSpec ideal_filter_spec(const std::vector<double>& instants, double T);

// without_alternation: the variant with e^{+iz delta_j} and no (-1)^j, kept for comparison
double filter_closed_form(const FilterSpec& spec, double z, bool without_alternation = false);

// |z int_0^1 f(u) e^{izu} du|^2 by adaptive quadrature, with f = +-1 between
// pulses (sign flipping across each pulse) and 0 inside pulse windows.
double filter_oracle(const FilterSpec& spec, double z);

// p such that F(z) ~ z^p as z -> 0 (from the moments of the switching function)
int small_z_exponent(const FilterSpec& spec);

enum class SpectrumKind { Ohmic, OneOverF, Lorentzian, Tabulated };

struct SpectralDensity {
    SpectrumKind kind{SpectrumKind::Ohmic};
    double amplitude{1.0};
    double cutoff{1.0};  // hard cutoff for Ohmic and 1/f, width for Lorentzian
    std::vector<std::pair<double, double>> table;  // (w, S), sorted by w

    double operator()(double w) const;
    double low_frequency_exponent() const;  // S ~ w^a as w -> 0
    bool bounded_support() const;
    double support_end() const;

    static SpectralDensity ohmic(double amplitude, double cutoff);
    static SpectralDensity one_over_f(double amplitude, double cutoff);
    static SpectralDensity lorentzian(double amplitude, double width);
    static SpectralDensity tabulated(std::vector<std::pair<double, double>> table);
    static SpectralDensity from_file(const std::string& path);
};

SpectrumKind spectrum_kind_from_string(const std::string& name);

struct FilterEval {
    double T{0.0};
    double chi{0.0};
    double s{1.0};  // exp(-2 chi)
};

FilterEval chi(const FilterSpec& spec, const SpectralDensity& S, double T);

} // namespace ddsim
