#include "ddsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <boost/math/tools/minima.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ddsim {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v)
{
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("config: " + key + " expects an integer");
    return int(x);
}

bool to_bool(const std::string& key, const std::string& v)
{
    const std::string s = lower(trim(v));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config: " + key + " expects true/false");
}

void set_key(SweepConfig& c, const std::string& section, const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    const std::string full = section + "." + key;
    if (section == "model") {
        if (key == "topology") c.model.topology = topology_from_string(v);
        else if (key == "spins") c.model.spins = to_int(full, v);
        else if (key == "alpha") c.model.alpha = to_double(full, v);
        else if (key == "lambda") c.model.lambda = to_double(full, v);
        else if (key == "closure") {
            const std::string s = lower(v);
            if (s == "periodic") c.model.closure = ChainClosure::Periodic;
            else if (s == "open") c.model.closure = ChainClosure::Open;
            else throw ConfigError("config: model.closure must be periodic or open");
        } else if (key == "qubit_site") c.model.qubit_site = to_int(full, v);
        else throw ConfigError("config: unknown key " + full);
    } else if (section == "sequence") {
        if (key == "kinds") {
            c.kinds.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!trim(item).empty()) c.kinds.push_back(sequence_kind_from_string(trim(item)));
            }
        } else if (key == "N") c.N = to_int(full, v);
        else if (key == "ideal") c.ideal = to_bool(full, v);
        else if (key == "pi_shape") c.pi_shape = v;
        else if (key == "twopi_shape") c.twopi_shape = v;
        else if (key == "a_max") c.a_max = to_double(full, v);
        else if (key == "energy_A") c.energy_A = to_double(full, v);
        else throw ConfigError("config: unknown key " + full);
    } else if (section == "sweep") {
        if (key == "variable") {
            const std::string s = lower(v);
            if (s == "t") c.variable = SweepVariable::T;
            else if (s == "tau_star") c.variable = SweepVariable::TauStar;
            else throw ConfigError("config: sweep.variable must be T or tau_star");
        } else if (key == "min") c.grid_min = to_double(full, v);
        else if (key == "max") c.grid_max = to_double(full, v);
        else if (key == "points") c.points = to_int(full, v);
        else if (key == "T") c.fixed_T = to_double(full, v);
        else if (key == "tau_star") c.fixed_tau_star = to_double(full, v);
        else throw ConfigError("config: unknown key " + full);
    } else if (section == "output") {
        if (key == "path") c.output = v;
        else if (key == "catalog") c.catalog = v;
        else throw ConfigError("config: unknown key " + full);
    } else {
        throw ConfigError("config: unknown section [" + section + "]");
    }
}

std::string fmt(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

std::string shortest(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct LogPoint {
    double lx, ly;
};

std::vector<LogPoint> usable_points(const std::vector<double>& x, const std::vector<double>& y, double floor)
{
    if (x.size() != y.size()) throw ContractError("fit: x and y differ in length");
    std::vector<LogPoint> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > floor && y[i] > 0.0 && std::isfinite(y[i])) {
            pts.push_back({std::log10(x[i]), std::log10(y[i])});
        }
    }
    std::sort(pts.begin(), pts.end(), [](const LogPoint& a, const LogPoint& b) { return a.lx < b.lx; });
    return pts;
}

FitResult line_fit(const std::vector<LogPoint>& pts, int first, int last)
{
    const int n = last - first + 1;
    double sx = 0, sy = 0;
    for (int i = first; i <= last; ++i) {
        sx += pts[std::size_t(i)].lx;
        sy += pts[std::size_t(i)].ly;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = first; i <= last; ++i) {
        const double dx = pts[std::size_t(i)].lx - mx;
        sxx += dx * dx;
        sxy += dx * (pts[std::size_t(i)].ly - my);
    }
    FitResult f;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    double ss = 0;
    for (int i = first; i <= last; ++i) {
        const double r = pts[std::size_t(i)].ly - (f.intercept + f.exponent * pts[std::size_t(i)].lx);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    f.first = first;
    f.last = last;
    f.points = n;
    return f;
}

// log10 y_b at log10 x, linear interpolation; NaN outside the table
double interp(const std::vector<LogPoint>& pts, double lx)
{
    if (pts.empty() || lx < pts.front().lx || lx > pts.back().lx) return NAN;
    auto it = std::lower_bound(pts.begin(), pts.end(), lx, [](const LogPoint& p, double v) { return p.lx < v; });
    if (it == pts.begin()) return it->ly;
    const auto& b = *it;
    const auto& a = *(it - 1);
    return a.ly + (b.ly - a.ly) * (lx - a.lx) / (b.lx - a.lx);
}

} // namespace

std::vector<double> SweepConfig::grid() const
{
    std::vector<double> g;
    if (points == 1) return {grid_min};
    for (int k = 0; k < points; ++k) {
        g.push_back(grid_min * std::pow(grid_max / grid_min, double(k) / double(points - 1)));
    }
    g.back() = grid_max;
    return g;
}

void SweepConfig::validate() const
{
    if (kinds.empty()) throw ConfigError("config: no sequence kinds");
    if (N < 0) throw ConfigError("config: N must be non-negative");
    if (!(grid_min > 0.0) || !(grid_max > 0.0)) throw ConfigError("config: grid bounds must be positive");
    if (points < 1) throw ConfigError("config: need at least one grid point");
    if (points == 1 ? grid_max < grid_min : !(grid_min < grid_max)) {
        throw ConfigError("config: grid min must be below max");
    }
    if (ideal) {
        for (auto k : kinds) {
            if (is_rudd(k)) throw ConfigError("config: ideal pulses cannot be combined with RUDD (its ideal limit is UDD)");
        }
        if (variable == SweepVariable::TauStar) throw ConfigError("config: ideal pulses have no tau* to sweep");
    }
    if (variable == SweepVariable::T && !ideal && !(fixed_tau_star > 0.0)) {
        throw ConfigError("config: sweep.tau_star must be positive");
    }
    if (variable == SweepVariable::TauStar && !(fixed_T > 0.0)) throw ConfigError("config: sweep.T must be positive");
}

std::vector<std::pair<std::string, std::string>> SweepConfig::echo() const
{
    std::string ks;
    for (std::size_t i = 0; i < kinds.size(); ++i) ks += (i ? "," : "") + to_string(kinds[i]);
    return {
        {"model.topology", to_string(model.topology)},
        {"model.spins", std::to_string(model.spins)},
        {"model.alpha", shortest(model.alpha)},
        {"model.lambda", shortest(model.lambda)},
        {"model.closure", model.closure == ChainClosure::Periodic ? "periodic" : "open"},
        {"model.qubit_site", std::to_string(model.qubit_site)},
        {"sequence.kinds", ks},
        {"sequence.N", std::to_string(N)},
        {"sequence.ideal", ideal ? "true" : "false"},
        {"sequence.pi_shape", pi_shape},
        {"sequence.twopi_shape", twopi_shape},
        {"sequence.a_max", shortest(a_max)},
        {"sequence.energy_A", shortest(energy_A)},
        {"sweep.variable", variable == SweepVariable::T ? "T" : "tau_star"},
        {"sweep.min", shortest(grid_min)},
        {"sweep.max", shortest(grid_max)},
        {"sweep.points", std::to_string(points)},
        {"sweep.T", shortest(fixed_T)},
        {"sweep.tau_star", shortest(fixed_tau_star)},
        {"output.catalog", catalog.empty() ? default_catalog_path() : catalog},
    };
}

SweepConfig load_sweep_config(const std::string& path)
{
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    SweepConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, value] : body) set_key(cfg, section, key, value.data());
    }
    cfg.validate();
    return cfg;
}

void apply_override(SweepConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    const std::string lhs = trim(assignment.substr(0, eq));
    const auto dot = lhs.find('.');
    if (eq == std::string::npos || dot == std::string::npos) {
        throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
    }
    set_key(cfg, lhs.substr(0, dot), lhs.substr(dot + 1), assignment.substr(eq + 1));
    cfg.validate();
}

std::vector<SweepRow> SweepTable::rows_for(SequenceKind kind) const
{
    std::vector<SweepRow> out;
    for (const auto& r : rows) {
        if (r.kind == kind) out.push_back(r);
    }
    return out;
}

double SweepTable::max_unitarity() const
{
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.unitarity);
    return m;
}

int default_workers()
{
    if (const char* env = std::getenv("DDSIM_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1, int(std::thread::hardware_concurrency()));
}

SweepTable run_sweep(const SweepConfig& cfg, int workers)
{
    const std::string path = cfg.catalog.empty() ? default_catalog_path() : cfg.catalog;
    const bool needs_catalog = !cfg.ideal;
    return run_sweep(cfg, needs_catalog ? read_catalog(path) : std::vector<CatalogEntry>{}, workers);
}

SweepTable run_sweep(const SweepConfig& cfg, const std::vector<CatalogEntry>& catalog, int workers)
{
    cfg.validate();
    const Evolver evolver(build_model(cfg.model));
    const std::vector<double> grid = cfg.grid();
    const std::size_t n_tasks = cfg.kinds.size() * grid.size();

    struct Outcome {
        bool ok{false};
        SweepRow row;
        std::string reason;
    };
    std::vector<Outcome> results(n_tasks);

    auto evaluate = [&](std::size_t task) {
        const SequenceKind kind = cfg.kinds[task / grid.size()];
        const double value = grid[task % grid.size()];
        const double T = cfg.variable == SweepVariable::T ? value : cfg.fixed_T;
        const double tau = cfg.variable == SweepVariable::TauStar ? value : cfg.fixed_tau_star;
        Outcome& out = results[task];
        out.row.sweep_value = value;
        out.row.kind = kind;
        try {
            DistanceResult d;
            if (cfg.ideal) {
                d = evolver.ideal_distance(kind, cfg.N, T);
                out.row.T_p = 0.0;
                out.row.E_p = NAN;
                out.row.theta_p = NAN;
            } else {
                PulseShape pi = named_shape(cfg.pi_shape, tau, 0.0, catalog);
                const double a_max = cfg.a_max > 0.0 ? cfg.a_max : pi.max_amplitude() * (1.0 + 1e-12);
                if (pi.max_amplitude() > a_max) throw AmplitudeError("pi shape exceeds a_max at tau*");
                pi.a_max = a_max;
                PulseShape twopi = pi;
                if (is_rudd(kind)) {
                    twopi = named_shape(cfg.twopi_shape, tau, 0.0, catalog);
                    twopi.a_max = a_max;
                }
                const Schedule s = make_schedule(kind, cfg.N, T, pi, twopi);
                d = evolver.distance(s);
                out.row.T_p = total_pulse_time(s);
                out.row.E_p = total_energy(s, cfg.energy_A);
                out.row.theta_p = is_rudd(kind) ? s.theta_p : NAN;
                out.row.warnings = s.warnings;
            }
            out.row.delta_pF = d.delta_pF;
            out.row.unitarity = d.unitarity;
            for (const auto& ax : d.per_axis) {
                out.row.max_trace_defect = std::max(out.row.max_trace_defect, std::abs(ax.trace_qB - 1.0));
            }
            out.ok = true;
        } catch (const ScheduleError& e) {
            out.reason = e.what();
        } catch (const AmplitudeError& e) {
            out.reason = e.what();
        }
    };

    const int n_workers = std::max(1, std::min<int>(workers > 0 ? workers : default_workers(), int(n_tasks)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < n_tasks;) {
            try {
                evaluate(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // task order is already (kind order, ascending sweep value)
    SweepTable table;
    table.header = cfg.echo();
    for (auto& r : results) {
        if (r.ok) table.rows.push_back(std::move(r.row));
        else table.dropped.push_back({r.row.sweep_value, r.row.kind, r.reason});
    }
    if (table.rows.empty()) throw ConfigError("sweep produced no valid grid points");
    return table;
}

void write_csv(std::ostream& out, const SweepTable& table)
{
    for (const auto& [k, v] : table.header) out << "# " << k << "=" << v << "\n";
    out << "# rows_attempted=" << table.rows.size() + table.dropped.size() << "\n";
    out << "# rows_emitted=" << table.rows.size() << "\n";
    out << "# rows_dropped=" << table.dropped.size() << "\n";
    for (const auto& d : table.dropped) {
        out << "# dropped kind=" << to_string(d.kind) << " sweep_value=" << fmt(d.sweep_value)
            << " reason=" << d.reason << "\n";
    }
    for (const auto& r : table.rows) {
        for (const auto& w : r.warnings) {
            out << "# warning kind=" << to_string(r.kind) << " sweep_value=" << fmt(r.sweep_value) << " " << w << "\n";
        }
    }
    out << "sweep_value,kind,delta_pF,T_p,E_p,theta_p\n";
    for (const auto& r : table.rows) {
        out << fmt(r.sweep_value) << "," << to_string(r.kind) << "," << fmt(r.delta_pF) << "," << fmt(r.T_p)
            << "," << fmt(r.E_p) << "," << fmt(r.theta_p) << "\n";
    }
}

SweepTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    SweepTable table;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos && line.find(' ', 2) > eq) {
                table.header.emplace_back(trim(line.substr(1, eq - 1)), line.substr(eq + 1));
            }
            continue;
        }
        if (!header_seen) {
            if (trim(line) != "sweep_value,kind,delta_pF,T_p,E_p,theta_p") {
                throw ConfigError(path + ": unexpected column header");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (cells.size() != 6) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 6 columns");
        SweepRow r;
        r.sweep_value = std::strtod(cells[0].c_str(), nullptr);
        r.kind = sequence_kind_from_string(cells[1]);
        r.delta_pF = std::strtod(cells[2].c_str(), nullptr);
        r.T_p = std::strtod(cells[3].c_str(), nullptr);
        r.E_p = std::strtod(cells[4].c_str(), nullptr);
        r.theta_p = std::strtod(cells[5].c_str(), nullptr);
        table.rows.push_back(r);
    }
    if (!header_seen) throw ConfigError(path + ": no column header");
    return table;
}

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y, const FitOptions& opt)
{
    const std::vector<LogPoint> pts = usable_points(x, y, opt.floor);
    const int n = int(pts.size());
    if (n < opt.min_points) {
        throw FitError("fit: only " + std::to_string(n) + " usable points", FitResult{});
    }
    std::optional<FitResult> best_ok;
    FitResult best_any;
    best_any.rms = INFINITY;
    for (int len = opt.min_points; len <= n; ++len) {
        const int first = opt.policy == WindowPolicy::FromSmallEnd ? 0 : n - len;
        const FitResult f = line_fit(pts, first, first + len - 1);
        if (f.rms < best_any.rms) best_any = f;
        if (f.rms < opt.rms_bound) best_ok = f;
    }
    if (!best_ok) throw FitError("fit: no window meets the residual bound", best_any);
    return *best_ok;
}

FitResult fit_power_law(const SweepTable& table, SequenceKind kind, const FitOptions& opt)
{
    std::vector<double> x, y;
    for (const auto& r : table.rows_for(kind)) {
        x.push_back(r.sweep_value);
        y.push_back(r.delta_pF);
    }
    return fit_power_law(x, y, opt);
}

FitResult estimate_kappa(const std::vector<double>& xa, const std::vector<double>& ya,
                         const std::vector<double>& xb, const std::vector<double>& yb, double floor)
{
    constexpr int kMinOverlap = 6;
    const std::vector<LogPoint> a = usable_points(xa, ya, floor);
    const std::vector<LogPoint> b = usable_points(xb, yb, floor);
    if (int(a.size()) < kMinOverlap || int(b.size()) < 2) {
        throw EstimationError("estimate_kappa: too few points");
    }
    // cost at log10 kappa = k; NaN when fewer than 6 points overlap
    auto cost = [&](double k) {
        double ss = 0.0;
        int n = 0;
        for (const auto& p : a) {
            const double yb_at = interp(b, p.lx - k);
            if (std::isnan(yb_at)) continue;
            const double r = p.ly - yb_at;
            ss += r * r;
            ++n;
        }
        return n >= kMinOverlap ? ss / n : NAN;
    };
    const double lo = a.front().lx - b.back().lx, hi = a.back().lx - b.front().lx;
    const int steps = 400;
    double best_k = NAN, best_c = INFINITY;
    for (int i = 0; i <= steps; ++i) {
        const double k = lo + (hi - lo) * i / steps;
        const double c = cost(k);
        if (!std::isnan(c) && c < best_c) {
            best_c = c;
            best_k = k;
        }
    }
    if (std::isnan(best_k)) throw EstimationError("estimate_kappa: curves overlap in fewer than 6 points");
    const double h = (hi - lo) / steps;
    auto guarded = [&](double k) {
        const double c = cost(k);
        return std::isnan(c) ? 1e300 : c;
    };
    const auto [k, c] = boost::math::tools::brent_find_minima(guarded, best_k - h, best_k + h, 40);
    FitResult out;
    out.kappa = std::pow(10.0, k);
    out.rms = std::sqrt(c);
    out.points = int(a.size());
    return out;
}

FitResult estimate_kappa(const SweepTable& a, SequenceKind kind_a, const SweepTable& b, SequenceKind kind_b,
                         double floor)
{
    std::vector<double> xa, ya, xb, yb;
    for (const auto& r : a.rows_for(kind_a)) {
        xa.push_back(r.sweep_value);
        ya.push_back(r.delta_pF);
    }
    for (const auto& r : b.rows_for(kind_b)) {
        xb.push_back(r.sweep_value);
        yb.push_back(r.delta_pF);
    }
    return estimate_kappa(xa, ya, xb, yb, floor);
}

} // namespace ddsim
