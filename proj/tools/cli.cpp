#include "ddsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ddsim/filter.hpp"
#include "ddsim/harness.hpp"

namespace ddsim {

namespace {

std::string num(double x, int digits = 12)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    return buf;
}

double parse_angle(const std::string& s)
{
    if (s == "pi") return kPi;
    if (s == "2pi") return 2.0 * kPi;
    throw ConfigError("angle must be pi or 2pi");
}

struct SweepArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::string output;
    std::string catalog;
    int workers{0};
};

int run_sweep_cmd(const SweepArgs& a, std::ostream& out, std::ostream& err)
{
    SweepConfig cfg = load_sweep_config(a.config);
    for (const auto& o : a.overrides) apply_override(cfg, o);
    if (!a.catalog.empty()) cfg.catalog = a.catalog;
    if (!a.output.empty()) cfg.output = a.output;
    const SweepTable table = run_sweep(cfg, a.workers);
    if (cfg.output.empty() || cfg.output == "-") {
        write_csv(out, table);
    } else {
        std::ofstream f(cfg.output);
        if (!f) throw ConfigError("cannot write " + cfg.output);
        write_csv(f, table);
        err << "wrote " << table.rows.size() << " rows (" << table.dropped.size() << " dropped) to "
            << cfg.output << "\n";
    }
    return 0;
}

struct DesignArgs {
    int order{2};
    std::string angle{"pi"};
    std::string name;
    std::string catalog;
    bool dry_run{false};
    DesignConfig cfg;
};

int run_design_cmd(DesignArgs a, std::ostream& out, std::ostream& err)
{
    a.cfg.order_target = a.order;
    a.cfg.angle = parse_angle(a.angle);
    if (!(a.cfg.a_max > 0.0)) a.cfg.a_max = 4.0 * kPi / a.cfg.tau;
    const DesignResult r = design_pulse(a.cfg, pulse_test_bath());
    CatalogEntry e = to_entry(r.shape, r.config_hash, a.cfg.seed + std::uint64_t(r.best_start));
    if (!a.name.empty()) e.name = a.name;
    out << "shape " << e.name << ": objective " << num(r.objective, 4) << ", residual exponent "
        << num(r.report.fitted_exponent, 5) << ", verdict " << r.report.verdict << "\n";
    for (const auto& s : e.segments) out << "  " << num(s.amplitude, 17) << "  " << num(s.fraction, 17) << "\n";
    if (a.dry_run) return 0;
    const std::string path = a.catalog.empty() ? default_catalog_path() : a.catalog;
    std::vector<CatalogEntry> entries;
    if (std::ifstream(path).good()) entries = read_catalog(path);
    bool replaced = false;
    for (auto& old : entries) {
        if (old.name == e.name) {
            old = e;
            replaced = true;
        }
    }
    if (!replaced) entries.push_back(e);
    write_catalog(path, entries);
    err << (replaced ? "replaced " : "added ") << e.name << " in " << path << "\n";
    return 0;
}

struct VerifyArgs {
    std::string shape{"scorpse"};
    double tau{0.02};
    int ladder{5};
    std::string catalog;
};

int run_verify_cmd(const VerifyArgs& a, std::ostream& out)
{
    std::vector<CatalogEntry> catalog;
    if (a.shape != "rect" && a.shape != "scorpse") {
        catalog = read_catalog(a.catalog.empty() ? default_catalog_path() : a.catalog);
    }
    const PulseShape s = named_shape(a.shape, a.tau, 0.0, catalog);
    const OrderReport r = order_verify(s, pulse_test_bath(), a.ladder);
    out << "shape " << s.name << " (claimed order " << s.order << ")\n";
    out << "tau,residual\n";
    for (const auto& [t, res] : r.residuals) out << num(t) << "," << num(res) << "\n";
    for (const auto& w : r.warnings) out << "# warning: " << w << "\n";
    out << "fitted exponent " << num(r.fitted_exponent, 5) << "\n";
    out << "certified order " << r.verdict << "\n";
    return 0;
}

struct FilterArgs {
    std::string sequence{"UDD"};
    int N{4};
    double width{0.0};
    double z_max{50.0};
    int z_points{201};
    bool oracle{false};
    bool without_alternation{false};
    std::string spectrum;
    double amplitude{1.0};
    double cutoff{10.0};
    std::string table;
    double T_min{0.1}, T_max{10.0};
    int T_points{20};
};

int run_filter_cmd(const FilterArgs& a, std::ostream& out)
{
    const SequenceKind kind = sequence_kind_from_string(a.sequence);
    FilterSpec spec;
    if (a.N > 0) {
        spec = ideal_filter_spec(ideal_instants(kind, a.N, 1.0), 1.0);
        spec.widths.assign(std::size_t(a.N), a.width);
        spec.validate();
    }
    if (a.spectrum.empty()) {
        out << "z,F_closed" << (a.oracle ? ",F_oracle" : "") << "\n";
        for (int k = 0; k < a.z_points; ++k) {
            const double z = a.z_points > 1 ? a.z_max * k / (a.z_points - 1) : a.z_max;
            out << num(z) << "," << num(filter_closed_form(spec, z, a.without_alternation));
            if (a.oracle) out << "," << num(filter_oracle(spec, z));
            out << "\n";
        }
        return 0;
    }
    SpectralDensity S;
    switch (spectrum_kind_from_string(a.spectrum)) {
    case SpectrumKind::Ohmic: S = SpectralDensity::ohmic(a.amplitude, a.cutoff); break;
    case SpectrumKind::OneOverF: S = SpectralDensity::one_over_f(a.amplitude, a.cutoff); break;
    case SpectrumKind::Lorentzian: S = SpectralDensity::lorentzian(a.amplitude, a.cutoff); break;
    case SpectrumKind::Tabulated:
        if (a.table.empty()) throw ConfigError("tabulated spectrum needs --table");
        S = SpectralDensity::from_file(a.table);
        break;
    }
    out << "T,chi,s\n";
    for (int k = 0; k < a.T_points; ++k) {
        const double T = a.T_points > 1 ? a.T_min * std::pow(a.T_max / a.T_min, double(k) / (a.T_points - 1)) : a.T_min;
        const FilterEval e = chi(spec, S, T);
        out << num(T) << "," << num(e.chi) << "," << num(e.s) << "\n";
    }
    return 0;
}

struct EnergyArgs {
    int n_max{100};
    int n_min{1};
    double tau_star{1e-3};
    double A{1.0};
};

int run_energy_cmd(const EnergyArgs& a, std::ostream& out)
{
    if (a.n_min < 1 || a.n_max < a.n_min) throw ConfigError("need 1 <= n-min <= n-max");
    if (!(a.tau_star > 0.0) || !(a.A > 0.0)) throw ConfigError("tau-star and A must be positive");
    out << "N,T,T_p_UDD,T_p_RUDD,T_p_RUDD_closed,E_p_UDD,E_p_RUDD,E_p_RUDD_closed,E_p_RUDD_asymptote\n";
    const PulseShape pi = rect_pi(a.tau_star, 0.0);
    for (int n = a.n_min; n <= a.n_max; ++n) {
        // the shortest T admitting both sequences
        const double T = std::max(rudd_min_duration(n, a.tau_star), (n + 1) * a.tau_star) * (1.0 + 1e-9);
        const Schedule rudd = rudd_schedule(n, T, a.tau_star, pi, pi, false);
        const double tp_udd = n * a.tau_star, ep_udd = a.A * n / a.tau_star;
        out << n << "," << num(T) << "," << num(tp_udd) << "," << num(total_pulse_time(rudd)) << ","
            << num(rudd_pulse_time_closed(n, a.tau_star)) << "," << num(ep_udd) << ","
            << num(total_energy(rudd, a.A)) << "," << num(rudd_energy_closed(n, a.tau_star, a.A)) << ","
            << num(rudd_energy_asymptote(n, a.tau_star, a.A)) << "\n";
    }
    return 0;
}

struct FitArgs {
    std::string csv;
    std::string kind{"UDD"};
    std::string policy{"small"};
    double floor{1e-13};
    double rms{0.05};
    int min_points{4};
    std::string kappa_csv;
    std::string kappa_kind;
};

int run_fit_cmd(const FitArgs& a, std::ostream& out)
{
    const SweepTable table = read_csv(a.csv);
    const SequenceKind kind = sequence_kind_from_string(a.kind);
    if (!a.kappa_csv.empty()) {
        const SweepTable other = read_csv(a.kappa_csv);
        const SequenceKind kb = a.kappa_kind.empty() ? kind : sequence_kind_from_string(a.kappa_kind);
        const FitResult k = estimate_kappa(table, kind, other, kb, a.floor);
        out << "kappa " << num(*k.kappa, 6) << " (rms " << num(k.rms, 3) << " in log10)\n";
        return 0;
    }
    FitOptions opt;
    opt.policy = a.policy == "large" ? WindowPolicy::FromLargeEnd : WindowPolicy::FromSmallEnd;
    if (a.policy != "small" && a.policy != "large") throw ConfigError("policy must be small or large");
    opt.floor = a.floor;
    opt.rms_bound = a.rms;
    opt.min_points = a.min_points;
    const FitResult f = fit_power_law(table, kind, opt);
    out << "kind " << a.kind << ": exponent " << num(f.exponent, 6) << ", intercept " << num(f.intercept, 6)
        << ", window " << f.first << ".." << f.last << " (" << f.points << " points), rms " << num(f.rms, 3)
        << "\n";
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"ddsim: dynamical decoupling with finite-width pulses on spin baths"};
    app.require_subcommand(1);

    SweepArgs sweep;
    auto* sw = app.add_subcommand("sweep", "run a sweep config and write CSV");
    sw->add_option("config", sweep.config, "sweep config file")->required()->check(CLI::ExistingFile);
    sw->add_option("--set", sweep.overrides, "override section.key=value");
    sw->add_option("-o,--output", sweep.output, "CSV path (- for stdout)");
    sw->add_option("--catalog", sweep.catalog, "shapes catalog");
    sw->add_option("--workers", sweep.workers, "worker threads (default: DDSIM_WORKERS or all cores)");

    DesignArgs design;
    auto* dp = app.add_subcommand("design-pulse", "design a symmetric shape of given order and store it");
    dp->add_option("--order", design.order, "target order (0, 1, 2)");
    dp->add_option("--angle", design.angle, "pi or 2pi");
    dp->add_option("--segments", design.cfg.n_segments, "number of segments");
    dp->add_option("--tau", design.cfg.tau, "design duration (1/lambda)");
    dp->add_option("--a-max", design.cfg.a_max, "amplitude cap at tau (default 4 pi/tau)");
    dp->add_option("--ladder", design.cfg.ladder_size, "ladder size");
    dp->add_option("--starts", design.cfg.starts, "multistart count");
    dp->add_option("--evals", design.cfg.max_evals, "objective evaluations per start");
    dp->add_option("--seed", design.cfg.seed, "base seed");
    dp->add_option("--name", design.name, "catalog name (default pi<j> or twopi<j>)");
    dp->add_option("--catalog", design.catalog, "shapes catalog to update");
    dp->add_flag("--dry-run", design.dry_run, "print the shape without touching the catalog");

    VerifyArgs verify;
    auto* vp = app.add_subcommand("verify-pulse", "certify a shape's order by residual scaling");
    vp->add_option("--shape", verify.shape, "rect, scorpse or a catalog name");
    vp->add_option("--tau", verify.tau, "nominal duration of the ladder");
    vp->add_option("--ladder", verify.ladder, "ladder size");
    vp->add_option("--catalog", verify.catalog, "shapes catalog");

    FilterArgs filt;
    auto* fp = app.add_subcommand("filter", "filter function table, or chi(T) with --spectrum");
    fp->add_option("--sequence", filt.sequence, "CPMG, UDD or CDD");
    fp->add_option("--N", filt.N, "pulse count");
    fp->add_option("--width", filt.width, "pulse width over T");
    fp->add_option("--z-max", filt.z_max, "largest z");
    fp->add_option("--z-points", filt.z_points, "number of z values");
    fp->add_flag("--oracle", filt.oracle, "add the switching-function quadrature column");
    fp->add_flag("--without-alternation", filt.without_alternation, "omit the (-1)^j signs");
    fp->add_option("--spectrum", filt.spectrum, "ohmic, 1/f, lorentzian or tabulated");
    fp->add_option("--amplitude", filt.amplitude, "spectral prefactor");
    fp->add_option("--cutoff", filt.cutoff, "hard cutoff, or Lorentzian width");
    fp->add_option("--table", filt.table, "two-column (w, S) file for tabulated spectra");
    fp->add_option("--T-min", filt.T_min, "smallest T");
    fp->add_option("--T-max", filt.T_max, "largest T");
    fp->add_option("--T-points", filt.T_points, "number of T values");

    EnergyArgs energy;
    auto* ep = app.add_subcommand("energy", "T_p and E_p of UDD and RUDD versus N");
    ep->add_option("--n-max", energy.n_max, "largest N");
    ep->add_option("--n-min", energy.n_min, "smallest N");
    ep->add_option("--tau-star", energy.tau_star, "minimum pulse width");
    ep->add_option("--A", energy.A, "shape constant of the energy law");

    FitArgs fit;
    auto* ft = app.add_subcommand("fit", "power-law fit (or kappa shift) of sweep CSVs");
    ft->add_option("csv", fit.csv, "sweep CSV")->required()->check(CLI::ExistingFile);
    ft->add_option("--kind", fit.kind, "sequence kind to fit");
    ft->add_option("--policy", fit.policy, "window grown from the small or large end");
    ft->add_option("--floor", fit.floor, "ignore values at or below this");
    ft->add_option("--rms", fit.rms, "window residual bound (log10)");
    ft->add_option("--min-points", fit.min_points, "smallest window");
    ft->add_option("--kappa-with", fit.kappa_csv, "estimate the T shift against this CSV");
    ft->add_option("--kappa-kind", fit.kappa_kind, "kind in the second CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sw) return run_sweep_cmd(sweep, out, err);
        if (*dp) return run_design_cmd(design, out, err);
        if (*vp) return run_verify_cmd(verify, out);
        if (*fp) return run_filter_cmd(filt, out);
        if (*ep) return run_energy_cmd(energy, out);
        if (*ft) return run_fit_cmd(fit, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

} // namespace ddsim
