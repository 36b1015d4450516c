#include <limits>
#include <stdexcept>

#include "qslsim/decay.hpp"
#include "qslsim/propagate.hpp"

namespace qsl {

Classification classify(const DecayProfile& profile, const BathSpec& bath,
                        const BlochVector& initial, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("classification needs eps in (0, 1)");
    Classification c;
    const double horizon = profile.default_horizon();
    c.markovian = profile.nonnegative_rate(horizon);
    // The class decision uses the sign change wherever it sits, horizon or not.
    c.t_first_sign_change =
        profile.first_sign_change(std::numeric_limits<double>::infinity());
    c.t_fixed_point = hit_time(initial, profile, bath, HitSpec::ball(eps));
    if (const auto* tab = profile.table()) c.divergence_like = tab->max_abs_gamma > 1e6;

    if (c.markovian) {
        c.dynamics_class = DynamicsClass::markov;
    } else if (c.t_first_sign_change) {
        const double tf =
            c.t_fixed_point ? *c.t_fixed_point : std::numeric_limits<double>::infinity();
        c.dynamics_class =
            *c.t_first_sign_change < tf ? DynamicsClass::class_b : DynamicsClass::class_a;
    } else {
        // Non-Markovian with no sign change at all: a rate negative from the
        // start (tables only), i.e. backflow before the fixed point.
        c.dynamics_class = DynamicsClass::class_b;
    }
    return c;
}

}  // namespace qsl
