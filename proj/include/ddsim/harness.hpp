// Config-driven sweeps, CSV output, power-law fits and T-shift estimation

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddsim/evolve.hpp"
#include "ddsim/pulses.hpp"
#include "ddsim/sequences.hpp"
#include "ddsim/spinbath.hpp"

namespace ddsim {

enum class SweepVariable { T, TauStar };

struct SweepConfig {
    BathSpec model;
    std::vector<SequenceKind> kinds{SequenceKind::UDD};
    int N{10};
    bool ideal{false};  // instantaneous pulses; RUDD is not allowed
    std::string pi_shape{"pi2"};
    std::string twopi_shape{"twopi2"};
    double a_max{0.0};  // 0: the pi shape's own amplitude at tau*
    double energy_A{1.0};
    SweepVariable variable{SweepVariable::T};
    double grid_min{0.09};
    double grid_max{0.5};
    int points{12};
    double fixed_T{0.09};
    double fixed_tau_star{1.086e-3};
    std::string output;
    std::string catalog;  // empty: default catalog

    std::vector<double> grid() const;
    void validate() const;
    // Flattened section.key=value pairs, in a fixed order, for the CSV header.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

SweepConfig load_sweep_config(const std::string& path);
// Apply one `section.key=value` override on top of a loaded config.
void apply_override(SweepConfig& cfg, const std::string& assignment);

struct SweepRow {
    double sweep_value{0.0};
    SequenceKind kind{SequenceKind::UDD};
    double delta_pF{0.0};
    double T_p{0.0};
    double E_p{0.0};
    double theta_p{0.0};  // NaN when not RUDD
    double unitarity{0.0};
    double max_trace_defect{0.0};
    std::vector<std::string> warnings;
};

struct DroppedRow {
    double sweep_value{0.0};
    SequenceKind kind{SequenceKind::UDD};
    std::string reason;
};

struct SweepTable {
    std::vector<SweepRow> rows;  // sorted by (kind order in the config, sweep value)
    std::vector<DroppedRow> dropped;
    std::vector<std::pair<std::string, std::string>> header;

    std::vector<SweepRow> rows_for(SequenceKind kind) const;
    double max_unitarity() const;
};

// DDSIM_WORKERS, else the hardware concurrency (at least 1).
int default_workers();

// workers <= 0 picks default_workers(). `catalog` overrides cfg.catalog when given.
SweepTable run_sweep(const SweepConfig& cfg, int workers = 0);
SweepTable run_sweep(const SweepConfig& cfg, const std::vector<CatalogEntry>& catalog, int workers = 0);

void write_csv(std::ostream& out, const SweepTable& table);
SweepTable read_csv(const std::string& path);

enum class WindowPolicy { FromSmallEnd, FromLargeEnd };

struct FitOptions {
    WindowPolicy policy{WindowPolicy::FromSmallEnd};
    double rms_bound{0.05};  // log10 units
    int min_points{4};
    double floor{0.0};       // points with y <= floor are excluded (roundoff)
};

struct FitResult {
    double exponent{0.0};
    double intercept{0.0};  // log10 y at x = 1
    int first{0}, last{0};  // window, inclusive indices into the x-sorted usable points
    double rms{0.0};
    int points{0};
    std::optional<double> kappa;
};

struct FitError : NumericError {
    FitError(const std::string& what, FitResult best) : NumericError(what), best(best) {}
    FitResult best;
};

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                        const FitOptions& opt = {});
FitResult fit_power_law(const SweepTable& table, SequenceKind kind, const FitOptions& opt = {});

// kappa minimising mean (log y_a(x) - log y_b(x/kappa))^2 over the overlap, with
// y_b interpolated linearly in log-log; requires at least 6 overlapping points.
// Values at or below `floor` are ignored on both curves.
FitResult estimate_kappa(const std::vector<double>& xa, const std::vector<double>& ya,
                         const std::vector<double>& xb, const std::vector<double>& yb, double floor = 0.0);
FitResult estimate_kappa(const SweepTable& a, SequenceKind kind_a, const SweepTable& b, SequenceKind kind_b,
                         double floor = 0.0);

} // namespace ddsim
