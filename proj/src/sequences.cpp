#include "ddsim/sequences.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ddsim {

namespace {

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

void check_common(int N, double T)
{
    if (N < 1) throw ScheduleError("sequence needs at least one pulse");
    if (!(T > 0.0)) throw ScheduleError("sequence duration must be positive");
}

// Pulses of the shape's own width centred on the given instants.
Schedule centred(SequenceKind kind, const std::vector<double>& centers, double T, const PulseShape& shape)
{
    Schedule s;
    s.kind = kind;
    s.N = int(centers.size());
    s.T = T;
    s.tau_star = shape.tau_nom;
    const double tau = shape.tau_nom;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        PulseEvent e;
        e.index = int(i) + 1;
        e.center = centers[i];
        e.duration = tau;
        e.t_start = centers[i] - tau / 2.0;
        e.t_stop = centers[i] + tau / 2.0;
        e.shape = shape;
        e.kind = EventKind::Pi;
        s.events.push_back(std::move(e));
    }
    s.validate();
    return s;
}

void cdd_expand(int level, double t0, double T, std::vector<double>& out)
{
    if (level == 0) return;
    // level k+1 inserts a pi pulse between the halves when k is even
    cdd_expand(level - 1, t0, T / 2.0, out);
    if ((level - 1) % 2 == 0) out.push_back(t0 + T / 2.0);
    cdd_expand(level - 1, t0 + T / 2.0, T / 2.0, out);
}

} // namespace

std::string to_string(SequenceKind kind)
{
    switch (kind) {
    case SequenceKind::CPMG: return "CPMG";
    case SequenceKind::UDD: return "UDD";
    case SequenceKind::CDD: return "CDD";
    case SequenceKind::RUDD: return "RUDD";
    case SequenceKind::RUDD_NoBoundary: return "RUDD_NoBoundary";
    }
    return "?";
}

SequenceKind sequence_kind_from_string(const std::string& name)
{
    const std::string key = upper(name);
    if (key == "CPMG") return SequenceKind::CPMG;
    if (key == "UDD") return SequenceKind::UDD;
    if (key == "CDD") return SequenceKind::CDD;
    if (key == "RUDD") return SequenceKind::RUDD;
    if (key == "RUDD_NOBOUNDARY" || key == "RUDD-NOBOUNDARY") return SequenceKind::RUDD_NoBoundary;
    throw ConfigError("unknown sequence kind '" + name + "'");
}

bool is_rudd(SequenceKind kind)
{
    return kind == SequenceKind::RUDD || kind == SequenceKind::RUDD_NoBoundary;
}

int Schedule::pi_count() const
{
    return int(std::count_if(events.begin(), events.end(), [](const PulseEvent& e) { return e.kind == EventKind::Pi; }));
}

void Schedule::validate() const
{
    const double slack = 1e-12 * T;
    for (std::size_t k = 0; k < events.size(); ++k) {
        const auto& e = events[k];
        if (!(e.duration > 0.0)) throw ScheduleError("pulse " + std::to_string(e.index) + " has no duration");
        if (e.t_start < -slack || e.t_stop > T + slack) {
            throw ScheduleError("pulse " + std::to_string(e.index) + " extends outside [0, T]");
        }
        if (k + 1 < events.size() && e.t_stop > events[k + 1].t_start + slack) {
            throw ScheduleError("pulses " + std::to_string(e.index) + " and " +
                                std::to_string(events[k + 1].index) + " overlap");
        }
    }
    if (total_pulse_time(*this) > T * (1.0 + 1e-12)) {
        throw ScheduleError("total pulse time exceeds T");
    }
}

std::vector<double> cpmg_instants(int N, double T)
{
    check_common(N, T);
    std::vector<double> t;
    for (int i = 1; i <= N; ++i) t.push_back(T * double(2 * i - 1) / double(2 * N));
    return t;
}

std::vector<double> udd_instants(int N, double T)
{
    check_common(N, T);
    std::vector<double> t;
    for (int i = 1; i <= N; ++i) {
        const double s = std::sin(kPi * i / (2.0 * (N + 1)));
        t.push_back(T * s * s);
    }
    return t;
}

std::vector<double> cdd_instants(int level, double T)
{
    if (level < 1) throw ScheduleError("CDD level must be at least 1");
    if (level > 20) throw ScheduleError("CDD level too large");
    if (!(T > 0.0)) throw ScheduleError("sequence duration must be positive");
    std::vector<double> t;
    cdd_expand(level, 0.0, T, t);
    for (double c : t) {
        if (!(c > 0.0 && c < T)) throw ScheduleError("CDD recursion placed a pulse at the sequence boundary");
    }
    return t;
}

int cdd_pulse_count(int level)
{
    if (level < 0) throw ScheduleError("CDD level must be non-negative");
    int n = 0;
    for (int k = 0; k < level; ++k) n = 2 * n + (k % 2 == 0 ? 1 : 0);
    return n;
}

int cdd_level_for(int N)
{
    for (int level = 1; level <= 20; ++level) {
        const int n = cdd_pulse_count(level);
        if (n == N) return level;
        if (n > N) break;
    }
    throw ScheduleError("no CDD level has " + std::to_string(N) + " pulses");
}

std::vector<double> ideal_instants(SequenceKind kind, int N, double T)
{
    switch (kind) {
    case SequenceKind::CPMG: return cpmg_instants(N, T);
    case SequenceKind::UDD: return udd_instants(N, T);
    case SequenceKind::CDD: return cdd_instants(cdd_level_for(N), T);
    default: throw ContractError("RUDD has no ideal-pulse form of its own; use UDD");
    }
}

Schedule cpmg_schedule(int N, double T, const PulseShape& shape)
{
    return centred(SequenceKind::CPMG, cpmg_instants(N, T), T, shape);
}

Schedule udd_schedule(int N, double T, const PulseShape& shape)
{
    return centred(SequenceKind::UDD, udd_instants(N, T), T, shape);
}

Schedule cdd_schedule(int level, double T, const PulseShape& shape)
{
    return centred(SequenceKind::CDD, cdd_instants(level, T), T, shape);
}

double solve_theta_p(int N, double T, double tau_star)
{
    check_common(N, T);
    if (!(tau_star > 0.0)) throw ScheduleError("tau* must be positive");
    const double arg = tau_star / (T * std::sin(kPi / (N + 1)));
    if (arg > 1.0) throw ScheduleError("theta_p: arcsin argument exceeds 1 (T far too small)");
    if (arg > std::sin(kPi / (2.0 * (N + 1))) * (1.0 + 1e-12)) {
        throw ScheduleError("theta_p beyond the back-to-back limit: T too small for tau*");
    }
    return std::min(std::asin(arg), kPi / (2.0 * (N + 1)));
}

double rudd_min_duration(int N, double tau_star)
{
    return tau_star / (std::sin(kPi / (N + 1)) * std::sin(kPi / (2.0 * (N + 1))));
}

Schedule rudd_schedule(int N, double T, double tau_star, const PulseShape& pi_shape,
                       const PulseShape& twopi_shape, bool with_boundary)
{
    Schedule s;
    s.kind = with_boundary ? SequenceKind::RUDD : SequenceKind::RUDD_NoBoundary;
    s.N = N;
    s.T = T;
    s.tau_star = tau_star;
    s.theta_p = solve_theta_p(N, T, tau_star);
    const double th = s.theta_p;
    const PulseShape base = pi_shape.rescaled(tau_star);
    if (base.a_max > 0.0 && base.max_amplitude() > base.a_max * (1.0 + 1e-12)) {
        throw AmplitudeError("RUDD: pi pulse of width tau* exceeds a_max");
    }

    auto boundary = [&](double t0, double t1, int index) {
        PulseEvent e;
        e.index = index;
        e.t_start = t0;
        e.t_stop = t1;
        e.duration = t1 - t0;
        e.center = 0.5 * (t0 + t1);
        e.shape = twopi_shape.rescaled(e.duration);
        e.kind = EventKind::TwoPi;
        if (e.shape.a_max > 0.0 && e.shape.max_amplitude() > e.shape.a_max) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "boundary 2pi pulse %d needs amplitude %.6g > a_max %.6g", index,
                          e.shape.max_amplitude(), e.shape.a_max);
            s.warnings.push_back(buf);
        }
        return e;
    };

    // sin^2 rather than (1 - cos)/2: no cancellation for small windows
    const double sh = std::sin(0.5 * th);
    const double w = T * sh * sh;
    if (with_boundary) s.events.push_back(boundary(0.0, w, 0));
    for (int i = 1; i <= N; ++i) {
        const double a2 = kPi * i / (N + 1.0);  // twice the sin^2 argument
        const double sa = std::sin(0.5 * (a2 - th));
        PulseEvent e;
        e.index = i;
        e.t_start = T * sa * sa;
        e.duration = i == 1 ? tau_star : T * std::sin(a2) * std::sin(th);
        e.t_stop = e.t_start + e.duration;
        e.center = e.t_start + 0.5 * e.duration;
        e.shape = base.rescaled(e.duration);
        e.kind = EventKind::Pi;
        s.events.push_back(std::move(e));
    }
    if (with_boundary) s.events.push_back(boundary(T - w, T, N + 1));
    s.validate();
    return s;
}

Schedule make_schedule(SequenceKind kind, int N, double T, const PulseShape& pi_shape,
                       const PulseShape& twopi_shape)
{
    switch (kind) {
    case SequenceKind::CPMG: return cpmg_schedule(N, T, pi_shape);
    case SequenceKind::UDD: return udd_schedule(N, T, pi_shape);
    case SequenceKind::CDD: return cdd_schedule(cdd_level_for(N), T, pi_shape);
    case SequenceKind::RUDD: return rudd_schedule(N, T, pi_shape.tau_nom, pi_shape, twopi_shape, true);
    case SequenceKind::RUDD_NoBoundary:
        return rudd_schedule(N, T, pi_shape.tau_nom, pi_shape, twopi_shape, false);
    }
    throw ContractError("unknown sequence kind");
}

double total_pulse_time(const Schedule& s)
{
    double sum = 0.0;
    for (const auto& e : s.events) {
        if (e.kind == EventKind::Pi) sum += e.duration;
    }
    return sum;
}

double total_energy(const Schedule& s, double A)
{
    double sum = 0.0;
    for (const auto& e : s.events) {
        if (e.kind == EventKind::Pi) sum += A / e.duration;
    }
    return sum;
}

double rudd_pulse_time_closed(int N, double tau_star)
{
    return tau_star / std::tan(kPi / (2.0 * (N + 1))) / std::sin(kPi / (N + 1));
}

double rudd_pulse_time_asymptote(int N, double tau_star)
{
    return tau_star * 2.0 * (N + 1.0) * (N + 1.0) / (kPi * kPi);
}

double rudd_energy_closed(int N, double tau_star, double A)
{
    double sum = 0.0;
    for (int j = 1; j <= N; ++j) sum += 1.0 / std::sin(kPi * j / (N + 1));
    return A * std::sin(kPi / (N + 1)) / tau_star * sum;
}

double rudd_energy_asymptote(int N, double tau_star, double A)
{
    return 2.0 * A / tau_star * std::log(2.0 * (N + 1) / kPi);
}

void write_schedule(std::ostream& out, const Schedule& s)
{
    char buf[256];
    out << "kind = " << to_string(s.kind) << "\n";
    out << "N = " << s.N << "\n";
    std::snprintf(buf, sizeof buf, "T = %.15e\ntau_star = %.15e\n", s.T, s.tau_star);
    out << buf;
    if (is_rudd(s.kind)) {
        std::snprintf(buf, sizeof buf, "theta_p = %.15e\n", s.theta_p);
        out << buf;
    }
    out << "events = " << s.events.size() << "\n";
    out << "# index kind t_start t_stop center duration shape\n";
    for (const auto& e : s.events) {
        std::snprintf(buf, sizeof buf, "%d %s %.15e %.15e %.15e %.15e %s\n", e.index,
                      e.kind == EventKind::Pi ? "pi" : "2pi", e.t_start, e.t_stop, e.center, e.duration,
                      e.shape.name.c_str());
        out << buf;
    }
}

} // namespace ddsim
