#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "qslsim/decay.hpp"

using namespace qsl;

namespace {

const double kPi = std::acos(-1.0);
const double kInf = std::numeric_limits<double>::infinity();

// Excited-state amplitude for the Lorentzian-bath model. The rate family is
// defined through gamma = -2 c'/c, so Lambda = -2 ln c gives an oracle that
// never touches the library's closed forms.
double jc_amplitude(double lambda, double gamma0, double t) {
    const double disc = lambda * lambda - 2.0 * gamma0 * lambda;
    if (disc > 0.0) {
        const double g = std::sqrt(disc);
        return std::exp(-0.5 * lambda * t) *
               (std::cosh(0.5 * g * t) + lambda / g * std::sinh(0.5 * g * t));
    }
    if (disc < 0.0) {
        const double g = std::sqrt(-disc);
        return std::exp(-0.5 * lambda * t) *
               (std::cos(0.5 * g * t) + lambda / g * std::sin(0.5 * g * t));
    }
    return std::exp(-0.5 * lambda * t) * (1.0 + 0.5 * lambda * t);
}

double cosine_lambda(double zeta, double omega, double t) {
    const double den = zeta * zeta + omega * omega;
    return (zeta + std::exp(-zeta * t) * (omega * std::sin(omega * t) -
                                          zeta * std::cos(omega * t))) /
           den;
}

}  // namespace

TEST_CASE("profile spec strings parse and round trip") {
    const char* specs[] = {"const:gamma0=1.5", "jc:lambda=0.01,gamma0=100",
                           "cos:zeta=1,omega=2"};
    for (const char* s : specs) {
        const DecayProfile p = DecayProfile::parse(s);
        const DecayProfile q = DecayProfile::parse(p.spec_string());
        for (double t : {0.0, 0.3, 0.9}) {
            CHECK(q.gamma_at(t) == doctest::Approx(p.gamma_at(t)).epsilon(1e-12));
        }
    }
    const DecayProfile jc = DecayProfile::parse("jc:gamma0=0.25,lambda=1");  // order-free
    CHECK(jc.jc()->lambda == 1.0);
    CHECK(jc.jc()->gamma0 == 0.25);

    CHECK_THROWS_AS(DecayProfile::parse("exp:rate=1"), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::parse("jc:lambda=1"), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::parse("const:gamma0=-1"), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::parse("const:gamma0=abc"), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::parse("cos:zeta=1"), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::parse("cos:zeta=1,omega=2,extra=3"), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::parse("const"), std::invalid_argument);
}

TEST_CASE("constructor domains") {
    CHECK_THROWS_AS(DecayProfile::constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::jaynes_cummings(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::jaynes_cummings(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::damped_cosine(0.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(DecayProfile::damped_cosine(1.0, 0.0));
}

TEST_CASE("rate families match the amplitude-based oracle") {
    struct Case {
        double lambda, gamma0;
    } cases[] = {{5.0, 1.0}, {0.9, 1.0}, {0.01, 100.0}, {2.0, 1.0}};
    for (const auto& c : cases) {
        const DecayProfile p = DecayProfile::jaynes_cummings(c.lambda, c.gamma0);
        const double tmax = p.divergence_time() ? 0.9 * *p.divergence_time() : 2.0;
        for (int k = 1; k <= 5; ++k) {
            const double t = tmax * k / 5.0;
            const double lam_oracle = -2.0 * std::log(jc_amplitude(c.lambda, c.gamma0, t));
            CHECK(p.accumulated_rate(t) == doctest::Approx(lam_oracle).epsilon(1e-10));
            const auto logc = [&](double tt) {
                return std::log(jc_amplitude(c.lambda, c.gamma0, tt));
            };
            const double gam_oracle = -2.0 * testing_oracles::derivative(logc, t);
            CHECK(p.gamma_at(t) == doctest::Approx(gam_oracle).epsilon(1e-6));
        }
    }
}

TEST_CASE("accumulated rate is the integral of the rate") {
    const DecayProfile profiles[] = {
        DecayProfile::constant(0.7),
        DecayProfile::jaynes_cummings(5.0, 1.0),
        DecayProfile::jaynes_cummings(0.01, 100.0),
        DecayProfile::damped_cosine(1.0, 2.0),
        DecayProfile::damped_cosine(2.0, 0.0),
    };
    for (const auto& p : profiles) {
        const double tmax =
            p.divergence_time() ? 0.85 * *p.divergence_time() : 3.0;
        const auto g = [&](double t) { return p.gamma_at(t); };
        for (double t : {0.4 * tmax, tmax}) {
            const double direct = p.accumulated_rate(t);
            const double integral = testing_oracles::integrate(g, 0.0, t, 1e-12);
            CHECK(direct == doctest::Approx(integral).epsilon(1e-9));
        }
    }
}

TEST_CASE("damped cosine accumulated rate matches the explicit antiderivative") {
    const DecayProfile p = DecayProfile::damped_cosine(1.0, 2.0);
    for (double t : {0.1, 0.5, kPi / 4, 2.0, 7.0}) {
        CHECK(p.accumulated_rate(t) ==
              doctest::Approx(cosine_lambda(1.0, 2.0, t)).epsilon(1e-13));
    }
    const DecayProfile mono = DecayProfile::damped_cosine(2.0, 0.0);
    CHECK(mono.accumulated_rate(3.0) ==
          doctest::Approx((1.0 - std::exp(-6.0)) / 2.0).epsilon(1e-13));
}

TEST_CASE("branch selection and the degenerate crossover") {
    CHECK(DecayProfile::jaynes_cummings(5.0, 1.0).jc()->branch == 1);
    CHECK(DecayProfile::jaynes_cummings(0.01, 100.0).jc()->branch == -1);
    CHECK(DecayProfile::jaynes_cummings(2.0, 1.0).jc()->branch == 0);

    // The three closed forms agree where the branches meet.
    const double g0 = 1.0;
    const double mid = DecayProfile::jaynes_cummings(2.0, g0).gamma_at(1.0);
    CHECK(mid == doctest::Approx(2.0 * 2.0 * g0 * 1.0 / (2.0 + 2.0 * 1.0)).epsilon(1e-12));
    const double above = DecayProfile::jaynes_cummings(2.0 * (1 + 1e-7), g0).gamma_at(1.0);
    const double below = DecayProfile::jaynes_cummings(2.0 * (1 - 1e-7), g0).gamma_at(1.0);
    CHECK(above == doctest::Approx(mid).epsilon(1e-6));
    CHECK(below == doctest::Approx(mid).epsilon(1e-6));
}

TEST_CASE("divergence time of the oscillatory branch") {
    const DecayProfile p = DecayProfile::jaynes_cummings(0.01, 100.0);
    REQUIRE(p.divergence_time().has_value());
    const double tdiv = *p.divergence_time();
    CHECK(tdiv == doctest::Approx(2.23149734).epsilon(1e-6));
    // The divergence is the first zero of the excited-state amplitude.
    CHECK(std::abs(jc_amplitude(0.01, 100.0, tdiv)) < 1e-9);
    // The accumulated rate blows up approaching it.
    CHECK(p.accumulated_rate(tdiv * (1.0 - 1e-9)) > 15.0);
    CHECK(divergence_time(p) == tdiv);

    CHECK_THROWS_AS(divergence_time(DecayProfile::jaynes_cummings(5.0, 1.0)),
                    std::domain_error);
    CHECK_THROWS_AS(divergence_time(DecayProfile::constant(1.0)), std::domain_error);
    CHECK_FALSE(DecayProfile::damped_cosine(1.0, 2.0).divergence_time().has_value());
}

TEST_CASE("evaluation domain ends at the divergence") {
    const DecayProfile p = DecayProfile::jaynes_cummings(0.01, 100.0);
    const double tdiv = *p.divergence_time();
    CHECK_THROWS_AS(p.gamma_at(tdiv), std::domain_error);
    CHECK_THROWS_AS(p.gamma_at(tdiv + 1.0), std::domain_error);
    CHECK_THROWS_AS(p.accumulated_rate(tdiv), std::domain_error);
    CHECK_THROWS_AS(p.gamma_at(-0.1), std::domain_error);
    CHECK_THROWS_AS(p.accumulated_rate(-0.1), std::domain_error);
    CHECK(p.domain_end() == tdiv);
    CHECK(DecayProfile::constant(1.0).domain_end() == kInf);
}

TEST_CASE("first passage of the accumulated rate") {
    const DecayProfile c2 = DecayProfile::constant(2.0);
    CHECK(*c2.first_passage(1.3) == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(*c2.first_passage(0.0) == 0.0);
    CHECK(*c2.first_passage(-1.0) == 0.0);

    const DecayProfile mono = DecayProfile::damped_cosine(1.0, 0.0);  // sup = 1
    CHECK(*mono.first_passage(0.9) == doctest::Approx(-std::log1p(-0.9)).epsilon(1e-12));
    CHECK_FALSE(mono.first_passage(1.0).has_value());
    CHECK_FALSE(mono.first_passage(1.2).has_value());

    const DecayProfile osc = DecayProfile::damped_cosine(1.0, 2.0);
    const double target = 0.3;
    REQUIRE(osc.first_passage(target).has_value());
    const double t = *osc.first_passage(target);
    CHECK(osc.accumulated_rate(t) == doctest::Approx(target).epsilon(1e-9));
    CHECK(osc.accumulated_rate(t - 1e-6) < target);  // earliest crossing
    CHECK_FALSE(osc.first_passage(0.5).has_value());  // above the supremum

    const DecayProfile nm = DecayProfile::jaynes_cummings(0.01, 100.0);
    CHECK(*nm.first_passage(1e9) == *nm.divergence_time());
    const DecayProfile m = DecayProfile::jaynes_cummings(5.0, 1.0);
    CHECK(m.accumulated_rate(*m.first_passage(2.0)) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("supremum of the accumulated rate") {
    CHECK(DecayProfile::constant(1.0).sup_accumulated() == kInf);
    CHECK(DecayProfile::jaynes_cummings(5.0, 1.0).sup_accumulated() == kInf);
    CHECK(DecayProfile::jaynes_cummings(0.01, 100.0).sup_accumulated() == kInf);
    CHECK(DecayProfile::damped_cosine(2.0, 0.0).sup_accumulated() ==
          doctest::Approx(0.5).epsilon(1e-12));
    // The oscillatory supremum sits at the first zero of gamma.
    CHECK(DecayProfile::damped_cosine(1.0, 1.0).sup_accumulated() ==
          doctest::Approx(cosine_lambda(1.0, 1.0, kPi / 2)).epsilon(1e-12));
    CHECK(DecayProfile::damped_cosine(1.0, 2.0).sup_accumulated() ==
          doctest::Approx(cosine_lambda(1.0, 2.0, kPi / 4)).epsilon(1e-12));
}

TEST_CASE("first sign change honours the horizon") {
    const DecayProfile osc = DecayProfile::damped_cosine(1.0, 2.0);
    CHECK(*osc.first_sign_change(10.0) == doctest::Approx(kPi / 4).epsilon(1e-14));
    CHECK_FALSE(osc.first_sign_change(0.5).has_value());

    CHECK_FALSE(DecayProfile::constant(1.0).first_sign_change(kInf).has_value());
    CHECK_FALSE(DecayProfile::jaynes_cummings(5.0, 1.0).first_sign_change(kInf).has_value());
    CHECK_FALSE(DecayProfile::damped_cosine(1.0, 0.0).first_sign_change(kInf).has_value());

    const DecayProfile nm = DecayProfile::jaynes_cummings(0.01, 100.0);
    CHECK(*nm.first_sign_change(kInf) == *nm.divergence_time());
    CHECK_FALSE(nm.first_sign_change(1.0).has_value());
}

TEST_CASE("nonnegativity of the rate") {
    CHECK(DecayProfile::constant(3.0).nonnegative_rate(100.0));
    CHECK(DecayProfile::damped_cosine(1.0, 0.0).nonnegative_rate(100.0));
    CHECK_FALSE(DecayProfile::damped_cosine(1.0, 2.0).nonnegative_rate(10.0));
    CHECK(DecayProfile::jaynes_cummings(5.0, 1.0).nonnegative_rate(1e6));
    // The oscillatory branch counts as sign-changing whatever the horizon:
    // the boundary must sit exactly at lambda = 2 gamma0.
    CHECK_FALSE(DecayProfile::jaynes_cummings(0.01, 100.0).nonnegative_rate(0.5));
    CHECK(DecayProfile::jaynes_cummings(2.0, 1.0).nonnegative_rate(10.0));
}

TEST_CASE("characteristic times and horizons") {
    CHECK(DecayProfile::constant(4.0).characteristic_time() == doctest::Approx(0.25));
    const DecayProfile jc = DecayProfile::jaynes_cummings(0.01, 100.0);
    CHECK(jc.characteristic_time() ==
          doctest::Approx(std::max(1.0 / 0.01, 1.0 / std::sqrt(2.0))).epsilon(1e-12));
    CHECK(DecayProfile::damped_cosine(2.0, 8.0).characteristic_time() ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(DecayProfile::damped_cosine(2.0, 0.0).characteristic_time() ==
          doctest::Approx(0.5).epsilon(1e-12));
    const DecayProfile c = DecayProfile::constant(4.0);
    CHECK(c.default_horizon() == doctest::Approx(10.0 * c.characteristic_time()));
}

TEST_CASE("complete positivity check") {
    const auto ok = DecayProfile::damped_cosine(1.0, 2.0).cp_check(50.0);
    CHECK(ok.ok);
    CHECK_FALSE(ok.witness_t.has_value());
    // Lambda(0) = 0 anchors the reported minimum when nothing dips below it.
    CHECK(ok.min_lambda == 0.0);
    // Sanity on the interior: the deepest excursion stays well positive.
    CHECK(cosine_lambda(1.0, 2.0, 3 * kPi / 4) > 0.16);

    const auto bad = DecayProfile::damped_cosine(1.0, 4.0).cp_check(10.0);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.witness_t.has_value());
    CHECK(*bad.witness_t > kPi / 8);
    CHECK(*bad.witness_t < 3 * kPi / 8);
    // The witness is the earliest zero crossing of the accumulated rate.
    CHECK(std::abs(cosine_lambda(1.0, 4.0, *bad.witness_t)) < 1e-6);
    CHECK(bad.min_lambda == doctest::Approx(cosine_lambda(1.0, 4.0, 3 * kPi / 8)).epsilon(1e-4));

    const DecayProfile nm = DecayProfile::jaynes_cummings(0.01, 100.0);
    CHECK(nm.cp_check(0.99 * *nm.divergence_time()).ok);
    CHECK(DecayProfile::jaynes_cummings(5.0, 1.0).cp_check(100.0).ok);
    CHECK_THROWS_AS(nm.cp_check(0.0), std::invalid_argument);
}

TEST_CASE("tabulated rates interpolate and validate") {
    const DecayProfile p = DecayProfile::tabulated({0.0, 1.0, 2.0}, {1.0, -1.0, 1.0});
    CHECK(p.gamma_at(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p.gamma_at(0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.accumulated_rate(0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p.accumulated_rate(1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.accumulated_rate(1.5) == doctest::Approx(-0.25).epsilon(1e-12));
    // Beyond the last sample the rate is zero and Lambda freezes, so the
    // evolution stays defined forever.
    CHECK(p.gamma_at(5.0) == 0.0);
    CHECK(p.accumulated_rate(5.0) == doctest::Approx(p.accumulated_rate(2.0)).epsilon(1e-12));
    CHECK(std::isinf(p.domain_end()));

    CHECK(*p.first_sign_change(10.0) == doctest::Approx(0.5).epsilon(1e-12));
    const auto cp = p.cp_check(2.0);
    CHECK_FALSE(cp.ok);
    CHECK(cp.min_lambda == doctest::Approx(-0.25).epsilon(1e-9));
    REQUIRE(cp.witness_t.has_value());
    CHECK(*cp.witness_t == doctest::Approx(1.0).epsilon(1e-5));

    // Sign flip across an exactly-zero node reports the node itself.
    const DecayProfile z = DecayProfile::tabulated({0.0, 1.0, 2.0}, {1.0, 0.0, -1.0});
    CHECK(*z.first_sign_change(10.0) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(DecayProfile::tabulated({0.5, 1.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::tabulated({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::tabulated({0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DecayProfile::tabulated({0.0, 1.0}, {1.0, std::nan("")}),
                    std::invalid_argument);
    // Unresolved sign change: opposite-sign neighbours too far apart.
    CHECK_THROWS_AS(DecayProfile::tabulated({0.0, 10.0}, {1.0, -1.0}, 1.0),
                    std::invalid_argument);
    CHECK_NOTHROW(DecayProfile::tabulated({0.0, 0.5}, {1.0, -1.0}, 1.0));
}

TEST_CASE("classification of the stock examples") {
    const BathSpec bath = BathSpec::from_beta(2.0);
    const BlochVector s = make_state(0.3, 0.0, 0.4);

    const auto markov = classify(DecayProfile::jaynes_cummings(1.0, 0.25), bath, s, 0.01);
    CHECK(markov.markovian);
    CHECK(markov.dynamics_class == DynamicsClass::markov);
    CHECK_FALSE(markov.t_first_sign_change.has_value());
    CHECK(markov.t_fixed_point.has_value());

    const auto slow = classify(DecayProfile::jaynes_cummings(0.01, 100.0), bath, s, 0.01);
    CHECK_FALSE(slow.markovian);
    CHECK(slow.dynamics_class == DynamicsClass::class_a);
    CHECK(*slow.t_first_sign_change == doctest::Approx(2.23149734).epsilon(1e-6));
    CHECK(*slow.t_fixed_point == doctest::Approx(1.19312217).epsilon(1e-6));
    CHECK(*slow.t_fixed_point < *slow.t_first_sign_change);

    const auto osc = classify(DecayProfile::damped_cosine(1.0, 2.0), bath, s, 0.01);
    CHECK_FALSE(osc.markovian);
    CHECK(osc.dynamics_class == DynamicsClass::class_b);
    CHECK(*osc.t_first_sign_change == doctest::Approx(kPi / 4).epsilon(1e-12));
    CHECK_FALSE(osc.t_fixed_point.has_value());

    const auto flat = classify(DecayProfile::constant(1.0), bath, s, 0.01);
    CHECK(flat.markovian);
    CHECK(flat.dynamics_class == DynamicsClass::markov);

    // A rate that is negative from the start has no sign change to wait for.
    const auto neg = classify(DecayProfile::tabulated({0.0, 1.0}, {-1.0, -1.0}), bath, s, 0.01);
    CHECK_FALSE(neg.markovian);
    CHECK(neg.dynamics_class == DynamicsClass::class_b);

    const auto spiky =
        classify(DecayProfile::tabulated({0.0, 1.0, 2.0}, {1.0, 5e6, 1.0}), bath, s, 0.01);
    CHECK(spiky.divergence_like);

    CHECK_THROWS_AS(classify(DecayProfile::constant(1.0), bath, s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(classify(DecayProfile::constant(1.0), bath, s, 1.0), std::invalid_argument);
}

TEST_CASE("dynamics class names") {
    CHECK(to_string(DynamicsClass::markov) == "MARKOV");
    CHECK(to_string(DynamicsClass::class_a) == "CLASS_A");
    CHECK(to_string(DynamicsClass::class_b) == "CLASS_B");
}
