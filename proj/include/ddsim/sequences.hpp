// CPMG, UDD, CDD and RUDD pulse schedules
//
// Type (i) sequences (CPMG, UDD, CDD) centre identical pulses of width tau* on their
// ideal instants. RUDD runs pulse i over [t_i^-, t_i^+] with
//   t_i^+- = T sin^2(pi i/(2(N+1)) +- theta_p/2),   tau^(i) = T sin(pi i/(N+1)) sin(theta_p)
// and theta_p fixed by tau^(1) = tau*.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ddsim/pulses.hpp"

namespace ddsim {

enum class SequenceKind { CPMG, UDD, CDD, RUDD, RUDD_NoBoundary };
enum class EventKind { Pi, TwoPi };

std::string to_string(SequenceKind kind);
SequenceKind sequence_kind_from_string(const std::string& name);
bool is_rudd(SequenceKind kind);

struct PulseEvent {
    int index{0};  // 1-based among pi pulses; 0 and N+1 for the boundary 2 pi pulses
    double t_start{0.0};
    double t_stop{0.0};
    double center{0.0};
    double duration{0.0};
    PulseShape shape;  // already scaled to `duration`
    EventKind kind{EventKind::Pi};
};

struct Schedule {
    SequenceKind kind{SequenceKind::UDD};
    int N{0};
    double T{0.0};
    std::vector<PulseEvent> events;  // time ordered
    double theta_p{0.0};             // RUDD only
    double tau_star{0.0};
    std::vector<std::string> warnings;

    int pi_count() const;
    // Non-overlap (1e-12 T slack), containment in [0, T], T >= T_p.
    void validate() const;
};

// Ideal instants
std::vector<double> cpmg_instants(int N, double T);
std::vector<double> udd_instants(int N, double T);
std::vector<double> cdd_instants(int level, double T);
int cdd_pulse_count(int level);
// The level whose pulse count is N; throws ScheduleError if there is none.
int cdd_level_for(int N);
// Instants for CPMG, UDD and CDD (by pulse count); RUDD is a contract error.
std::vector<double> ideal_instants(SequenceKind kind, int N, double T);

Schedule cpmg_schedule(int N, double T, const PulseShape& shape);
Schedule udd_schedule(int N, double T, const PulseShape& shape);
Schedule cdd_schedule(int level, double T, const PulseShape& shape);
Schedule rudd_schedule(int N, double T, double tau_star, const PulseShape& pi_shape,
                       const PulseShape& twopi_shape, bool with_boundary);

// Dispatch on kind; pi_shape.tau_nom is tau*. twopi_shape is used by RUDD only.
Schedule make_schedule(SequenceKind kind, int N, double T, const PulseShape& pi_shape,
                       const PulseShape& twopi_shape);

double solve_theta_p(int N, double T, double tau_star);
// Smallest T for which RUDD with N pulses of minimum width tau* exists (back-to-back).
double rudd_min_duration(int N, double tau_star);

double total_pulse_time(const Schedule& s);
double total_energy(const Schedule& s, double A);

// Closed forms and large-N asymptotes of the RUDD cost laws
double rudd_pulse_time_closed(int N, double tau_star);
double rudd_pulse_time_asymptote(int N, double tau_star);
double rudd_energy_closed(int N, double tau_star, double A);
double rudd_energy_asymptote(int N, double tau_star, double A);

void write_schedule(std::ostream& out, const Schedule& s);

} // namespace ddsim
