#pragma once

#include <optional>
#include <vector>

#include "qslsim/bloch.hpp"
#include "qslsim/decay.hpp"

namespace qsl {

// Relaxation map for an accumulated-rate increment dlam (may be negative
// during backflow windows): transverse components scale by exp(-G dlam/2),
// the longitudinal offset from the fixed point by exp(-G dlam), G = gamma_sum.
BlochVector propagate_by_dlambda(const BlochVector& s, double dlam, const BathSpec& bath);

// Exact free evolution from t0 to t1. The profile enters only through
// Lambda(t1) - Lambda(t0).
BlochVector propagate_closed(const BlochVector& s, const DecayProfile& profile,
                             const BathSpec& bath, double t0, double t1);

// Independent verification channel: adaptive embedded Runge-Kutta on the
// full 2x2 density matrix with the raising/lowering operators written out.
// tol is used as both absolute and relative local error target.
BlochVector integrate_oracle(const BlochVector& s, const DecayProfile& profile,
                             const BathSpec& bath, double t0, double t1, double tol);

// Same integrator, returning states at the given ascending sample times in
// [t0, t1]. Steps are forced to land on the sample times, so each returned
// state carries the integrator's own accuracy, not an interpolation error.
std::vector<BlochVector> integrate_oracle_path(const BlochVector& s, const DecayProfile& profile,
                                               const BathSpec& bath, double t0, double t1,
                                               double tol, const std::vector<double>& sample_ts);

// Accumulated rate needed to bring the state within trace distance eps of
// the bath fixed point. Zero if already inside the ball.
double lambda_for_distance_ball(const BlochVector& s, const BathSpec& bath, double eps);

// Signed accumulated rate that puts rz exactly on the given level. Negative
// when the level lies further from the fixed point than the state (backflow
// needed). The level must be strictly on the state's side of the fixed point.
double lambda_for_rz_level(const BlochVector& s, const BathSpec& bath, double level);

struct HitSpec {
    enum class Mode { distance_ball, rz_level };
    Mode mode = Mode::distance_ball;
    double eps = 0.0;
    double level = 0.0;
    static HitSpec ball(double eps) { return {Mode::distance_ball, eps, 0.0}; }
    static HitSpec rz(double level) { return {Mode::rz_level, 0.0, level}; }
};

// Earliest t >= 0 at which free evolution meets the target; none when the
// accumulated rate saturates below the required value.
std::optional<double> hit_time(const BlochVector& s, const DecayProfile& profile,
                               const BathSpec& bath, const HitSpec& target);

struct Trajectory {
    std::vector<double> t;
    std::vector<BlochVector> state;
    std::vector<double> distance;  // trace distance to the bath fixed point
    std::vector<double> purity;
    std::vector<double> gamma;
    std::vector<double> lambda;

    size_t size() const { return t.size(); }
    void push(double time, const BlochVector& s, const BathSpec& bath, const DecayProfile& p);
};

// Uniform sampling of the free evolution on [t0, t1]; the final time is
// always included exactly.
Trajectory sample_free_evolution(const BlochVector& s, const DecayProfile& profile,
                                 const BathSpec& bath, double t0, double t1, double dt);

}  // namespace qsl
