#include "qslsim/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qslsim/propagate.hpp"

namespace qsl {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double rel_dev(double simulated, double analytic) {
    return std::abs(simulated - analytic) / std::abs(simulated);
}

}  // namespace

Strategy parse_strategy(const std::string& name) {
    if (name == "cool") return Strategy::cool;
    if (name == "heat") return Strategy::heat;
    if (name == "flip") return Strategy::flip;
    if (name == "free") return Strategy::free_evolution;
    throw std::invalid_argument("unknown strategy '" + name +
                                "' (expected cool, heat, flip, or free)");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::cool: return "cool";
        case Strategy::heat: return "heat";
        case Strategy::flip: return "flip";
        case Strategy::free_evolution: return "free";
    }
    throw std::logic_error("unhandled strategy");
}

std::optional<double> t_free(const BlochVector& initial, const DecayProfile& profile,
                             const BathSpec& bath, double eps) {
    return hit_time(initial, profile, bath, HitSpec::ball(eps));
}

QslReport speedup(const BlochVector& initial, const DecayProfile& profile, const BathSpec& bath,
                  double eps, Strategy strategy) {
    const Classification cls = classify(profile, bath, initial, eps);

    QslReport rep;
    rep.eps = eps;
    rep.markovian = cls.markovian;
    rep.dynamics_class = cls.dynamics_class;
    rep.t_free = cls.t_fixed_point;

    if (strategy != Strategy::free_evolution) {
        StrategyResult res = [&] {
            switch (strategy) {
                case Strategy::cool: return strategy_cool(initial, profile, bath, eps);
                case Strategy::heat: return strategy_heat(initial, profile, bath, eps);
                default: return strategy_classB_flip(initial, profile, bath, eps);
            }
        }();
        rep.t_qsl = res.t_qsl;
        rep.bound_only = res.bound_only;
        if (rep.t_free && rep.t_qsl && *rep.t_qsl > 0.0) rep.ratio = *rep.t_free / *rep.t_qsl;
    }

    // Analytic columns exist for the constant rate and for both proper
    // Jaynes-Cummings branches; the degenerate branch and the remaining
    // families have no closed form to compare against.
    const JaynesCummingsRate* jc = profile.jc();
    const bool model_m = profile.is_constant() || (jc && jc->branch > 0);
    const bool model_nm = jc && jc->branch < 0;
    if (!model_m && !model_nm) return rep;

    FormulaParams fp;
    fp.beta = bath.beta;
    fp.lambda = jc ? jc->lambda : 0.0;
    fp.gamma0 = jc ? jc->gamma0 : profile.constant_rate()->gamma0;
    fp.r_i = initial.norm();
    fp.rx_i = std::hypot(initial.rx, initial.ry);
    fp.rz_i = initial.rz;
    fp.eps = eps;

    std::optional<FormulaKind> kind;
    std::optional<double> simulated;
    switch (strategy) {
        case Strategy::cool:
            if (rep.t_qsl && *rep.t_qsl > 0.0) {
                kind = model_m ? FormulaKind::cool_m : FormulaKind::cool_nm;
                simulated = rep.t_qsl;
            }
            break;
        case Strategy::heat:
            if (rep.t_qsl && *rep.t_qsl > 0.0) {
                kind = model_m ? FormulaKind::heat_m : FormulaKind::heat_nm;
                simulated = rep.t_qsl;
            }
            break;
        case Strategy::free_evolution:
            if (rep.t_free && *rep.t_free > 0.0 && fp.rx_i > eps) {
                kind = model_m ? FormulaKind::free_m : FormulaKind::free_nm;
                simulated = rep.t_free;
            }
            break;
        case Strategy::flip:
            break;
    }
    if (!kind) return rep;

    const FormulaValue fv = appendix_formula(*kind, fp);
    rep.analytic_exact = fv.exact;
    rep.analytic_paper = fv.paper;
    rep.rel_dev_exact = rel_dev(*simulated, fv.exact);
    rep.rel_dev_paper = rel_dev(*simulated, fv.paper);
    return rep;
}

FormulaValue appendix_formula(FormulaKind kind, const FormulaParams& p) {
    if (!std::isfinite(p.gamma0) || p.gamma0 <= 0.0)
        throw std::invalid_argument("closed forms need gamma0 > 0");
    if (!(p.eps > 0.0 && p.eps < 1.0))
        throw std::invalid_argument("closed forms need eps in (0, 1)");

    const BathSpec bath = BathSpec::from_beta(p.beta);
    const double gsum = bath.gamma_sum;
    const double rfp = bath.rfp_magnitude;

    const bool nm = kind == FormulaKind::cool_nm || kind == FormulaKind::heat_nm ||
                    kind == FormulaKind::free_nm || kind == FormulaKind::gain_heat_nm;
    double ghat = 0.0;
    if (nm) {
        if (!(p.lambda > 0.0 && p.lambda < 2.0 * p.gamma0))
            throw std::invalid_argument("oscillatory closed forms need 0 < lambda < 2 gamma0");
        ghat = std::sqrt(p.lambda * (2.0 * p.gamma0 - p.lambda));
    }
    // sqrt(2/(lambda gamma0)) is the printed prefactor; ghat's exact
    // counterpart is 2/ghat and the two merge as lambda -> 0.
    const double pref = nm ? std::sqrt(2.0 / (p.lambda * p.gamma0)) : 0.0;

    FormulaValue out;
    out.in_regime = nm ? p.lambda / p.gamma0 <= 1e-3
                       : p.lambda <= 0.0 || p.lambda / p.gamma0 >= 1e3;

    switch (kind) {
        case FormulaKind::cool_m:
        case FormulaKind::cool_nm: {
            if (!(p.r_i >= 0.0 && rfp - p.r_i > p.eps))
                throw std::invalid_argument("cooling forms need r_i + eps < r_fp");
            const double lam_star = std::log((rfp - p.r_i) / p.eps) / gsum;
            if (kind == FormulaKind::cool_m) {
                out.paper = out.exact = lam_star / p.gamma0;
            } else {
                const double q = std::pow(p.eps / (rfp - p.r_i), 1.0 / (2.0 * gsum));
                out.paper = pref * (kPi / 2.0 - q);
                out.exact = (2.0 / ghat) * std::acos(q);
            }
            break;
        }
        case FormulaKind::heat_m:
        case FormulaKind::heat_nm: {
            if (!(p.r_i > rfp + p.eps))
                throw std::invalid_argument("heating forms need r_i > r_fp + eps");
            const double lam_star = std::log((p.r_i + rfp) / (2.0 * rfp + p.eps)) / gsum;
            if (kind == FormulaKind::heat_m) {
                out.paper = out.exact = lam_star / p.gamma0;
            } else {
                const double q = std::pow((2.0 * rfp + p.eps) / (p.r_i + rfp),
                                          1.0 / (2.0 * gsum));
                out.paper = pref * std::acos(q);
                out.exact = (2.0 / ghat) * std::acos(q);
            }
            break;
        }
        case FormulaKind::free_m:
        case FormulaKind::free_nm: {
            if (!(p.rx_i > p.eps))
                throw std::invalid_argument("free-decay forms need rx_i > eps");
            const double lam_star =
                lambda_for_distance_ball(make_state(p.rx_i, 0.0, p.rz_i), bath, p.eps);
            if (kind == FormulaKind::free_m) {
                out.paper = 2.0 * std::log(p.rx_i / p.eps) / (p.gamma0 * gsum);
                out.exact = lam_star / p.gamma0;
            } else {
                out.paper = pref * (kPi / 2.0 - std::pow(p.eps / p.rx_i, 2.0 / gsum));
                out.exact = (2.0 / ghat) * std::acos(std::exp(-lam_star / 2.0));
            }
            break;
        }
        case FormulaKind::gain_heat_m:
        case FormulaKind::gain_heat_nm: {
            if (!(p.r_i > rfp + p.eps))
                throw std::invalid_argument("heating gains need r_i > r_fp + eps");
            const double lam_star =
                lambda_for_distance_ball(make_state(p.rx_i, 0.0, p.rz_i), bath, p.eps);
            if (kind == FormulaKind::gain_heat_m) {
                out.paper = 2.0 * std::abs(std::log(p.eps)) /
                            std::log((rfp + p.r_i) / (2.0 * rfp));
                out.exact = gsum * lam_star /
                            std::log((p.r_i + rfp) / (2.0 * rfp + p.eps));
            } else {
                const double q = std::pow((2.0 * rfp + p.eps) / (p.r_i + rfp),
                                          1.0 / (2.0 * gsum));
                out.paper = (kPi / 2.0) /
                            std::acos(std::pow(2.0 * rfp / (p.r_i + rfp), 1.0 / (2.0 * gsum)));
                out.exact = std::acos(std::exp(-lam_star / 2.0)) / std::acos(q);
            }
            break;
        }
    }
    return out;
}

RegimeReport regime_scan_gamma0(double lambda, double gamma0_lo, double gamma0_hi, int n,
                                const BathSpec& bath, const BlochVector& initial, double eps) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("regime scan needs lambda > 0");
    if (!(gamma0_lo > 0.0 && gamma0_hi > gamma0_lo))
        throw std::invalid_argument("regime scan needs 0 < gamma0_lo < gamma0_hi");
    if (n < 2) throw std::invalid_argument("regime scan needs at least 2 points");

    RegimeReport rep;
    rep.points.reserve(static_cast<size_t>(n));
    std::vector<double> xs, ys;
    xs.reserve(rep.points.capacity());
    ys.reserve(rep.points.capacity());

    const double step = std::log(gamma0_hi / gamma0_lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double g0 = i + 1 == n ? gamma0_hi : gamma0_lo * std::exp(step * i);
        const DecayProfile profile = DecayProfile::jaynes_cummings(lambda, g0);
        const StrategyResult res = strategy_cool(initial, profile, bath, eps);
        if (!res.t_qsl) throw std::logic_error("cooling target unreachable in regime scan");
        rep.points.push_back({lambda, g0, profile.nonnegative_rate(profile.default_horizon()),
                              *res.t_qsl});
        xs.push_back(g0);
        ys.push_back(*res.t_qsl);
    }
    rep.slope_vs_gamma0 = loglog_slope(xs, ys);
    return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope needs two same-length samples at least");
    const size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0))
            throw std::invalid_argument("log-log slope needs positive samples");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw std::invalid_argument("degenerate abscissa for slope");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace qsl
