#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qslsim/bloch.hpp"
#include "qslsim/decay.hpp"
#include "qslsim/propagate.hpp"

namespace qsl {

struct ScheduleSegment {
    double duration = 0.0;
    // Polar angle held on the segment (0 or pi for the shipped strategies);
    // empty means the angle is left to evolve freely.
    std::optional<double> theta;
};

struct ScheduleEvent {
    enum class Type { pulse, segment_end };
    double t = 0.0;
    Type type = Type::segment_end;
    Rotation rotation = Rotation::identity();  // meaningful for pulses only
};

struct ControlSchedule {
    Rotation initial_rotation = Rotation::identity();
    std::vector<ScheduleSegment> segments;
    std::vector<std::pair<double, Rotation>> intermediate_rotations;
    Rotation final_rotation = Rotation::identity();
    // True exactly when intermediate_rotations is non-empty; such schedules
    // certify a lower bound on the reachable time, not the optimum.
    bool requires_intermediate = false;

    double total_duration() const;
    // Canonical time-ordered event list (at equal times a segment end sorts
    // before a pulse, so pulses act on the segment's final state).
    std::vector<ScheduleEvent> events() const;
};

struct StrategyResult {
    ControlSchedule schedule;
    std::optional<double> t_qsl;  // empty when the target is unreachable
    Trajectory trajectory;        // sampled controlled evolution when reachable
    bool bound_only = false;
};

// Rotate to theta = pi at t = 0, then relax until rz meets -(r_fp - eps).
// Needs |initial| < r_fp.
StrategyResult strategy_cool(const BlochVector& initial, const DecayProfile& profile,
                             const BathSpec& bath, double eps);

// Rotate to theta = 0 at t = 0, relax until rz meets r_fp + eps, finish with
// a pi pulse into the ball. Needs |initial| > r_fp.
StrategyResult strategy_heat(const BlochVector& initial, const DecayProfile& profile,
                             const BathSpec& bath, double eps);

// Damped-cosine cooling with sign harvesting: theta = pi while gamma > 0,
// theta = 0 while gamma < 0, flipping at the rate's zeros (2n+1)pi/(2 omega).
// Results that used an intermediate flip carry bound_only = true.
StrategyResult strategy_classB_flip(const BlochVector& initial, const DecayProfile& profile,
                                    const BathSpec& bath, double eps);

// Angle minimizing the purity speed over [0, pi] during a gamma < 0 window
// of a heating schedule: arccos(-r_fp/r) once r >= r_fp, else pi.
double heat_backflow_mitigation_angle(double r, const BathSpec& bath);

struct PulseWidthBound {
    double scale = 0.0;       // the raw timescale the pulse must beat
    double admissible = 0.0;  // scale / 100, the "much smaller than" margin
};

PulseWidthBound pulse_width_bound(const DecayProfile& profile, const BathSpec& bath);

// Replay an event list: free evolution between events, rotations applied at
// pulse instants (post-pulse states are the ones recorded at those times).
Trajectory execute_schedule(const BlochVector& initial, const std::vector<ScheduleEvent>& events,
                            const DecayProfile& profile, const BathSpec& bath,
                            int samples_per_span = 64);

}  // namespace qsl
