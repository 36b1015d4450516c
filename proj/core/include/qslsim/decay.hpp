#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qslsim/bloch.hpp"

namespace qsl {

struct ConstantRate {
    double gamma0;
};

/// Exact resonant Jaynes-Cummings rate for a Lorentzian bath of width lambda
/// and Markovian-limit rate gamma0. The discriminant lambda^2 - 2 gamma0 lambda
/// selects the branch: positive -> monotone rate (hyperbolic form), negative ->
/// oscillatory rate with a finite-time divergence (trigonometric form).
struct JaynesCummingsRate {
    double lambda;
    double gamma0;
    double disc;   // lambda^2 - 2 gamma0 lambda
    double root;   // sqrt(|disc|); meaningless on the degenerate branch
    int branch;    // +1 hyperbolic, -1 trigonometric, 0 degenerate (|disc| tiny)
};

/// gamma(t) = exp(-zeta t) cos(omega t).
struct DampedCosineRate {
    double zeta;
    double omega;
};

/// Piecewise-linear rate given by samples (t, gamma) with strictly increasing
/// t starting at 0. Outside the sampled range the rate is 0.
struct TabulatedRate {
    std::vector<double> t;
    std::vector<double> gamma;
    std::vector<double> lam;  // trapezoid accumulated rate at the nodes
    double max_abs_gamma;
};

struct CpCheckResult {
    bool ok;
    double min_lambda;                  // smallest accumulated rate seen
    std::optional<double> witness_t;    // earliest violating time when !ok
};

enum class DynamicsClass { markov, class_a, class_b };

std::string to_string(DynamicsClass c);

struct Classification {
    bool markovian;
    DynamicsClass dynamics_class;
    std::optional<double> t_first_sign_change;
    std::optional<double> t_fixed_point;
    /// Set for tabulated rates whose |gamma| exceeds 1e6, suggesting an
    /// undersampled divergence rather than a genuinely bounded rate.
    bool divergence_like = false;
};

class DecayProfile {
  public:
    static DecayProfile constant(double gamma0);
    static DecayProfile jaynes_cummings(double lambda, double gamma0);
    static DecayProfile damped_cosine(double zeta, double omega);
    /// `max_sign_gap`: neighboring samples of opposite sign further apart than
    /// this are rejected as unable to resolve the sign change.
    static DecayProfile tabulated(std::vector<double> t, std::vector<double> gamma,
                                  double max_sign_gap = std::numeric_limits<double>::infinity());

    /// Grammar: "const:gamma0=<v>" | "jc:lambda=<v>,gamma0=<v>" |
    ///          "cos:zeta=<v>,omega=<v>" | "table:<path>".
    static DecayProfile parse(const std::string& spec);
    std::string spec_string() const;

    /// Instantaneous rate. Throws std::domain_error at or past the divergence
    /// time of the trigonometric branch, and for t < 0.
    double gamma_at(double t) const;

    /// Accumulated rate Lambda(t) = integral of gamma over [0, t], in closed
    /// form per family. Same domain restriction as gamma_at.
    double accumulated_rate(double t) const;

    /// Finite only for the trigonometric Jaynes-Cummings branch.
    std::optional<double> divergence_time() const;

    /// Verifies Lambda(t) >= -1e-12 on [0, horizon] (complete positivity of
    /// the accumulated map). On failure reports the earliest violating time.
    CpCheckResult cp_check(double horizon) const;

    /// Earliest t with Lambda(t) >= target, or nullopt when the accumulated
    /// rate never reaches it. target <= 0 gives 0. For the trigonometric
    /// branch a target beyond all representable values returns the divergence
    /// time itself (the map reaches the fixed point exactly there).
    std::optional<double> first_passage(double target) const;

    /// Supremum of Lambda over the full domain (may be +infinity).
    double sup_accumulated() const;

    /// Earliest sign change of gamma within [0, horizon]. The trigonometric
    /// Jaynes-Cummings branch reports its divergence time: the rate flips
    /// sign through the pole.
    std::optional<double> first_sign_change(double horizon) const;

    /// True when gamma stays >= -tol on [0, horizon] with no divergence.
    bool nonnegative_rate(double horizon) const;

    /// 1/gamma0, max(1/lambda, 1/sqrt(2 lambda gamma0)), max(1/zeta, 1/omega),
    /// or the table span, respectively. Used to set default horizons.
    double characteristic_time() const;

    /// Default analysis horizon: 10 x characteristic_time().
    double default_horizon() const;

    /// End of the time domain: the divergence time of the trigonometric
    /// branch, +infinity otherwise (tabulated rates are 0 past their last
    /// node, so their evolution never ends).
    double domain_end() const;

    bool is_constant() const { return std::holds_alternative<ConstantRate>(kind_); }
    bool is_jaynes_cummings() const { return std::holds_alternative<JaynesCummingsRate>(kind_); }
    bool is_damped_cosine() const { return std::holds_alternative<DampedCosineRate>(kind_); }
    bool is_tabulated() const { return std::holds_alternative<TabulatedRate>(kind_); }

    const JaynesCummingsRate* jc() const { return std::get_if<JaynesCummingsRate>(&kind_); }
    const DampedCosineRate* cosine() const { return std::get_if<DampedCosineRate>(&kind_); }
    const ConstantRate* constant_rate() const { return std::get_if<ConstantRate>(&kind_); }
    const TabulatedRate* table() const { return std::get_if<TabulatedRate>(&kind_); }

  private:
    explicit DecayProfile(std::variant<ConstantRate, JaynesCummingsRate, DampedCosineRate,
                                       TabulatedRate> k)
        : kind_(std::move(k)) {}
    std::variant<ConstantRate, JaynesCummingsRate, DampedCosineRate, TabulatedRate> kind_;
};

/// Divergence time of the trigonometric branch,
///   T = (2/ghat) (pi - arctan(ghat/lambda)),  ghat = sqrt(2 gamma0 lambda - lambda^2).
/// Throws std::domain_error on the other branches.
double divergence_time(const DecayProfile& p);

/// Decide Markovianity and, for sign-changing rates, whether the ball of
/// radius eps around the fixed point is reached before the first sign change
/// (class A) or not (class B). The horizon is 10 characteristic times.
Classification classify(const DecayProfile& p, const BathSpec& bath, const BlochVector& initial,
                        double eps);

}  // namespace qsl
