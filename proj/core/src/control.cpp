#include "qslsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsl {

namespace {

const double kPi = std::acos(-1.0);

// First t in [a, b] with Lambda(t) == target, Lambda monotone on [a, b].
double solve_lambda_on_window(const DecayProfile& p, double a, double b, double target,
                              bool increasing) {
    double lo = a, hi = b;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = p.accumulated_rate(mid);
        const bool before = increasing ? v < target : v > target;
        (before ? lo : hi) = mid;
    }
    return hi;
}

StrategyResult unreachable_result(ControlSchedule schedule, bool bound_only) {
    StrategyResult res;
    res.schedule = std::move(schedule);
    res.t_qsl = std::nullopt;
    res.bound_only = bound_only;
    return res;
}

StrategyResult finalize(ControlSchedule schedule, double t_qsl, const BlochVector& initial,
                        const DecayProfile& profile, const BathSpec& bath, bool bound_only) {
    StrategyResult res;
    res.schedule = std::move(schedule);
    res.schedule.requires_intermediate = !res.schedule.intermediate_rotations.empty();
    res.t_qsl = t_qsl;
    res.bound_only = bound_only;
    res.trajectory = execute_schedule(initial, res.schedule.events(), profile, bath);
    return res;
}

}  // namespace

double ControlSchedule::total_duration() const {
    double total = 0.0;
    for (const auto& seg : segments) total += seg.duration;
    return total;
}

std::vector<ScheduleEvent> ControlSchedule::events() const {
    std::vector<ScheduleEvent> ev;
    if (!initial_rotation.is_identity())
        ev.push_back({0.0, ScheduleEvent::Type::pulse, initial_rotation});
    double cursor = 0.0;
    for (const auto& seg : segments) {
        cursor += seg.duration;
        ev.push_back({cursor, ScheduleEvent::Type::segment_end, Rotation::identity()});
    }
    for (const auto& [t, rot] : intermediate_rotations)
        ev.push_back({t, ScheduleEvent::Type::pulse, rot});
    if (!final_rotation.is_identity())
        ev.push_back({cursor, ScheduleEvent::Type::pulse, final_rotation});
    std::stable_sort(ev.begin(), ev.end(), [](const ScheduleEvent& a, const ScheduleEvent& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.type == ScheduleEvent::Type::segment_end &&
               b.type == ScheduleEvent::Type::pulse;
    });
    return ev;
}

Trajectory execute_schedule(const BlochVector& initial, const std::vector<ScheduleEvent>& events,
                            const DecayProfile& profile, const BathSpec& bath,
                            int samples_per_span) {
    if (samples_per_span < 1) throw std::invalid_argument("need at least one sample per span");
    std::vector<ScheduleEvent> ev = events;
    std::stable_sort(ev.begin(), ev.end(), [](const ScheduleEvent& a, const ScheduleEvent& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.type == ScheduleEvent::Type::segment_end &&
               b.type == ScheduleEvent::Type::pulse;
    });
    if (!ev.empty() && ev.front().t < 0.0)
        throw std::invalid_argument("schedule events need t >= 0");

    Trajectory traj;
    BlochVector s = initial;
    double tc = 0.0;
    double lam_c = 0.0;  // Lambda(tc)
    size_t i = 0;
    bool pushed_origin = false;
    while (i < ev.size()) {
        const double te = ev[i].t;
        if (te > tc) {
            if (!pushed_origin) {
                traj.push(tc, s, bath, profile);
                pushed_origin = true;
            }
            const double lam_e = profile.accumulated_rate(te);
            for (int k = 1; k < samples_per_span; ++k) {
                const double ts = tc + (te - tc) * k / samples_per_span;
                traj.push(ts, propagate_by_dlambda(s, profile.accumulated_rate(ts) - lam_c, bath),
                          bath, profile);
            }
            s = propagate_by_dlambda(s, lam_e - lam_c, bath);
            tc = te;
            lam_c = lam_e;
        }
        // Apply every event in this time group; pulses act on the evolved state.
        while (i < ev.size() && ev[i].t == te) {
            if (ev[i].type == ScheduleEvent::Type::pulse) s = ev[i].rotation.apply(s);
            ++i;
        }
        traj.push(tc, s, bath, profile);
        pushed_origin = true;
    }
    if (!pushed_origin) traj.push(0.0, s, bath, profile);
    return traj;
}

StrategyResult strategy_cool(const BlochVector& initial, const DecayProfile& profile,
                             const BathSpec& bath, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    const double r_i = initial.norm();
    const double r_fp = bath.rfp_magnitude;
    if (r_i >= r_fp)
        throw std::domain_error("cooling applies to states with radius below the fixed point's");

    auto [s0, u_in] = rotate_to_angle(initial, kPi);
    ControlSchedule schedule;
    schedule.initial_rotation = u_in;
    const double level = -(r_fp - eps);
    if (s0.rz <= level) return finalize(std::move(schedule), 0.0, initial, profile, bath, false);

    const double lam_star = lambda_for_rz_level(s0, bath, level);
    const auto t_star = profile.first_passage(lam_star);
    if (!t_star) return unreachable_result(std::move(schedule), false);
    schedule.segments.push_back({*t_star, kPi});
    return finalize(std::move(schedule), *t_star, initial, profile, bath, false);
}

StrategyResult strategy_heat(const BlochVector& initial, const DecayProfile& profile,
                             const BathSpec& bath, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    const double r_i = initial.norm();
    const double r_fp = bath.rfp_magnitude;
    if (r_i <= r_fp)
        throw std::domain_error("heating applies to states with radius above the fixed point's");

    const double level = r_fp + eps;
    if (r_i <= level) {
        // Already pure enough: a single pulse to theta = pi enters the ball.
        auto [s_end, u] = rotate_to_angle(initial, kPi);
        ControlSchedule schedule;
        schedule.initial_rotation = u;
        return finalize(std::move(schedule), 0.0, initial, profile, bath, false);
    }

    auto [s0, u_in] = rotate_to_angle(initial, 0.0);
    ControlSchedule schedule;
    schedule.initial_rotation = u_in;
    const double lam_star = lambda_for_rz_level(s0, bath, level);
    const auto t_star = profile.first_passage(lam_star);
    if (!t_star) return unreachable_result(std::move(schedule), false);
    schedule.segments.push_back({*t_star, 0.0});
    const BlochVector pre_final = propagate_by_dlambda(s0, lam_star, bath);
    schedule.final_rotation = rotate_to_angle(pre_final, kPi).second;
    return finalize(std::move(schedule), *t_star, initial, profile, bath, false);
}

StrategyResult strategy_classB_flip(const BlochVector& initial, const DecayProfile& profile,
                                    const BathSpec& bath, double eps) {
    const auto* cosr = profile.cosine();
    if (cosr == nullptr)
        throw std::domain_error("the flip strategy is defined for damped-cosine rates");
    if (cosr->omega == 0.0) return strategy_cool(initial, profile, bath, eps);
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    const double r_i = initial.norm();
    const double r_fp = bath.rfp_magnitude;
    if (r_i >= r_fp)
        throw std::domain_error("cooling applies to states with radius below the fixed point's");

    // Window 0 alone reproduces the single-pulse schedule.
    const double gsum = bath.gamma_sum;
    const double w0 = 0.5 * kPi / cosr->omega;
    const double delta0 = r_fp - r_i;
    if (delta0 <= eps) return strategy_cool(initial, profile, bath, eps);
    const double need0 = std::log(delta0 / eps) / gsum;
    if (profile.accumulated_rate(w0) >= need0) return strategy_cool(initial, profile, bath, eps);

    auto [s0, u_in] = rotate_to_angle(initial, kPi);
    ControlSchedule schedule;
    schedule.initial_rotation = u_in;

    // Per-window magnitudes of the Lambda increment shrink by exactly this
    // factor (the envelope drops by it over each half period).
    const double rho = std::exp(-cosr->zeta * kPi / cosr->omega);

    double delta = delta0 * std::exp(-gsum * profile.accumulated_rate(w0));
    double lam_prev = profile.accumulated_rate(w0);
    double w_prev = w0;
    BlochVector edge = propagate_by_dlambda(s0, lam_prev, bath);  // theta = pi state
    schedule.segments.push_back({w0, kPi});

    for (int k = 1; k < 100000; ++k) {
        const bool backflow = (k % 2) == 1;  // gamma < 0 on odd windows
        const double theta_held = backflow ? 0.0 : kPi;
        // Flip pulse entering this window.
        auto [flipped, pulse] = rotate_to_angle(edge, theta_held);
        schedule.intermediate_rotations.emplace_back(w_prev, pulse);
        edge = flipped;

        const double w_next = w_prev + kPi / cosr->omega;
        const double lam_next = profile.accumulated_rate(w_next);
        const double dlam = lam_next - lam_prev;

        if (backflow) {
            const double s_gap = 2.0 * r_fp - delta;         // rz offset from the fixed point
            const double s_target = 2.0 * r_fp - eps;        // purity target at theta = 0
            const double dlam_need = -std::log(s_target / s_gap) / gsum;
            if (dlam <= dlam_need) {
                const double t_hit = solve_lambda_on_window(profile, w_prev, w_next,
                                                            lam_prev + dlam_need, false);
                schedule.segments.push_back({t_hit - w_prev, theta_held});
                const BlochVector pre_final = propagate_by_dlambda(edge, dlam_need, bath);
                schedule.final_rotation = rotate_to_angle(pre_final, kPi).second;
                return finalize(std::move(schedule), t_hit, initial, profile, bath, true);
            }
            edge = propagate_by_dlambda(edge, dlam, bath);
            delta = 2.0 * r_fp - s_gap * std::exp(-gsum * dlam);
        } else {
            const double need = std::log(delta / eps) / gsum;
            if (dlam >= need) {
                const double t_hit =
                    solve_lambda_on_window(profile, w_prev, w_next, lam_prev + need, true);
                schedule.segments.push_back({t_hit - w_prev, theta_held});
                return finalize(std::move(schedule), t_hit, initial, profile, bath, true);
            }
            edge = propagate_by_dlambda(edge, dlam, bath);
            delta *= std::exp(-gsum * dlam);
        }
        schedule.segments.push_back({w_next - w_prev, theta_held});
        w_prev = w_next;
        lam_prev = lam_next;

        // All future windows together cannot close the remaining gap once
        // the geometric tail of |dLambda| is too small.
        const double tail = std::fabs(dlam) * rho / (1.0 - rho);
        const double max_future_drop = 2.0 * r_fp * std::expm1(gsum * tail);
        if (delta - eps > max_future_drop) return unreachable_result(std::move(schedule), true);
    }
    throw std::domain_error("flip strategy failed to converge within the window budget");
}

double heat_backflow_mitigation_angle(double r, const BathSpec& bath) {
    if (!(r > 0.0 && r <= 1.0 + 1e-12))
        throw std::invalid_argument("radius must lie in (0, 1]");
    if (r >= bath.rfp_magnitude) return std::acos(-bath.rfp_magnitude / r);
    return kPi;
}

PulseWidthBound pulse_width_bound(const DecayProfile& profile, const BathSpec& bath) {
    const double gsum = bath.gamma_sum;
    double scale;
    if (const auto* c = profile.constant_rate()) {
        scale = 1.0 / (c->gamma0 * gsum);
    } else if (const auto* j = profile.jc()) {
        scale = j->branch == 1 ? 1.0 / (j->gamma0 * gsum)
                               : 1.0 / std::sqrt(j->lambda * j->gamma0 * gsum);
    } else if (const auto* c2 = profile.cosine()) {
        scale = std::min(1.0 / c2->zeta, 1.0 / gsum);
        if (c2->omega > 0.0) scale = std::min(scale, 1.0 / c2->omega);
    } else {
        const double peak = profile.table()->max_abs_gamma;
        scale = peak > 0.0 ? 1.0 / (peak * gsum) : std::numeric_limits<double>::infinity();
    }
    return {scale, scale / 100.0};
}

}  // namespace qsl
