#include "qslsim/decay.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qsl {

namespace {

constexpr double kCpTol = 1e-12;
// Relative discriminant threshold below which the two branches are
// numerically indistinguishable and the degenerate forms are used.
constexpr double kBranchTol = 1e-12;

double log_cosh(double x) {
    x = std::fabs(x);
    return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

double parse_number(std::string_view s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw std::invalid_argument("bad number '" + std::string(s) + "'");
    return v;
}

std::string format_number(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// First t in [lo, hi] with f(t) >= target, assuming f nondecreasing and
// f(lo) <= target <= f(hi).
template <class F>
double bisect_up(F&& f, double lo, double hi, double target) {
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace

DecayProfile DecayProfile::constant(double gamma0) {
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
        throw std::invalid_argument("constant rate must be positive");
    return DecayProfile{ConstantRate{gamma0}};
}

DecayProfile DecayProfile::jaynes_cummings(double lambda, double gamma0) {
    if (!(lambda > 0.0) || !(gamma0 > 0.0) || !std::isfinite(lambda) || !std::isfinite(gamma0))
        throw std::invalid_argument("jc profile needs lambda > 0 and gamma0 > 0");
    JaynesCummingsRate r{lambda, gamma0, lambda * lambda - 2.0 * gamma0 * lambda, 0.0, 0};
    if (std::fabs(r.disc) < kBranchTol * lambda * lambda) {
        r.branch = 0;
    } else if (r.disc > 0.0) {
        r.branch = 1;
        r.root = std::sqrt(r.disc);
    } else {
        r.branch = -1;
        r.root = std::sqrt(-r.disc);
    }
    return DecayProfile{r};
}

DecayProfile DecayProfile::damped_cosine(double zeta, double omega) {
    if (!(zeta > 0.0) || !(omega >= 0.0) || !std::isfinite(zeta) || !std::isfinite(omega))
        throw std::invalid_argument("cosine profile needs zeta > 0 and omega >= 0");
    return DecayProfile{DampedCosineRate{zeta, omega}};
}

DecayProfile DecayProfile::tabulated(std::vector<double> t, std::vector<double> gamma,
                                     double max_sign_gap) {
    if (t.size() != gamma.size() || t.size() < 2)
        throw std::invalid_argument("tabulated rate needs at least two (t, gamma) samples");
    if (t.front() != 0.0) throw std::invalid_argument("tabulated rate must start at t = 0");
    for (size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(gamma[i]))
            throw std::invalid_argument("tabulated samples must be finite");
        if (i > 0 && t[i] <= t[i - 1])
            throw std::invalid_argument("tabulated times must be strictly increasing");
    }
    for (size_t i = 0; i + 1 < t.size(); ++i) {
        if (gamma[i] * gamma[i + 1] < 0.0 && t[i + 1] - t[i] > max_sign_gap) {
            std::ostringstream os;
            os << "sign change between t = " << t[i] << " and t = " << t[i + 1]
               << " is not resolved by the samples";
            throw std::invalid_argument(os.str());
        }
    }
    TabulatedRate r;
    r.lam.resize(t.size(), 0.0);
    r.max_abs_gamma = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        r.max_abs_gamma = std::max(r.max_abs_gamma, std::fabs(gamma[i]));
        if (i > 0)
            r.lam[i] = r.lam[i - 1] + 0.5 * (gamma[i] + gamma[i - 1]) * (t[i] - t[i - 1]);
    }
    r.t = std::move(t);
    r.gamma = std::move(gamma);
    return DecayProfile{std::move(r)};
}

namespace {

std::vector<std::pair<std::string, double>> parse_kv(std::string_view body) {
    std::vector<std::pair<std::string, double>> out;
    size_t pos = 0;
    while (pos < body.size()) {
        size_t comma = body.find(',', pos);
        if (comma == std::string_view::npos) comma = body.size();
        std::string_view item = body.substr(pos, comma - pos);
        const size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("expected key=value in profile spec");
        out.emplace_back(std::string(item.substr(0, eq)), parse_number(item.substr(eq + 1)));
        pos = comma + 1;
    }
    return out;
}

double take(std::vector<std::pair<std::string, double>>& kv, const std::string& key) {
    for (auto it = kv.begin(); it != kv.end(); ++it) {
        if (it->first == key) {
            const double v = it->second;
            kv.erase(it);
            return v;
        }
    }
    throw std::invalid_argument("profile spec is missing '" + key + "'");
}

}  // namespace

DecayProfile DecayProfile::parse(const std::string& spec) {
    const size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("profile spec needs the form family:params");
    const std::string family = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);
    if (family == "const") {
        auto kv = parse_kv(body);
        const double g0 = take(kv, "gamma0");
        if (!kv.empty()) throw std::invalid_argument("unknown key in const profile spec");
        return constant(g0);
    }
    if (family == "jc") {
        auto kv = parse_kv(body);
        const double l = take(kv, "lambda");
        const double g0 = take(kv, "gamma0");
        if (!kv.empty()) throw std::invalid_argument("unknown key in jc profile spec");
        return jaynes_cummings(l, g0);
    }
    if (family == "cos") {
        auto kv = parse_kv(body);
        const double z = take(kv, "zeta");
        const double w = take(kv, "omega");
        if (!kv.empty()) throw std::invalid_argument("unknown key in cos profile spec");
        return damped_cosine(z, w);
    }
    if (family == "table") {
        std::ifstream in(body);
        if (!in) throw std::invalid_argument("cannot open rate table '" + body + "'");
        std::vector<double> ts, gs;
        std::string line;
        while (std::getline(in, line)) {
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            double tv, gv;
            if (ls >> tv >> gv) {
                ts.push_back(tv);
                gs.push_back(gv);
            }
        }
        return tabulated(std::move(ts), std::move(gs));
    }
    throw std::invalid_argument("unknown profile family '" + family + "'");
}

std::string DecayProfile::spec_string() const {
    if (const auto* c = constant_rate()) return "const:gamma0=" + format_number(c->gamma0);
    if (const auto* j = jc())
        return "jc:lambda=" + format_number(j->lambda) + ",gamma0=" + format_number(j->gamma0);
    if (const auto* c = cosine())
        return "cos:zeta=" + format_number(c->zeta) + ",omega=" + format_number(c->omega);
    return "table:";
}

double divergence_time(const DecayProfile& p) {
    const auto* j = p.jc();
    if (j == nullptr || j->branch != -1)
        throw std::domain_error("rate has no finite-time divergence");
    return 2.0 / j->root * (std::acos(-1.0) - std::atan(j->root / j->lambda));
}

std::optional<double> DecayProfile::divergence_time() const {
    const auto* j = jc();
    if (j == nullptr || j->branch != -1) return std::nullopt;
    return qsl::divergence_time(*this);
}

double DecayProfile::gamma_at(double t) const {
    if (!(t >= 0.0)) throw std::domain_error("rate is defined for t >= 0");
    if (const auto* c = constant_rate()) return c->gamma0;
    if (const auto* j = jc()) {
        if (j->branch == 1) {
            const double th = std::tanh(0.5 * j->root * t);
            return 2.0 * j->lambda * j->gamma0 * th / (j->root + j->lambda * th);
        }
        if (j->branch == 0)
            return 2.0 * j->lambda * j->gamma0 * t / (2.0 + j->lambda * t);
        const double tdiv = qsl::divergence_time(*this);
        if (t >= tdiv) throw std::domain_error("rate evaluated at or past its divergence time");
        const double x = 0.5 * j->root * t;
        const double den = j->root * std::cos(x) + j->lambda * std::sin(x);
        if (den <= 0.0) throw std::domain_error("rate evaluated at or past its divergence time");
        return 2.0 * j->lambda * j->gamma0 * std::sin(x) / den;
    }
    if (const auto* c = cosine()) return std::exp(-c->zeta * t) * std::cos(c->omega * t);
    const auto& tab = std::get<TabulatedRate>(kind_);
    if (t >= tab.t.back()) return t == tab.t.back() ? tab.gamma.back() : 0.0;
    const auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    const size_t i = static_cast<size_t>(it - tab.t.begin()) - 1;
    const double w = (t - tab.t[i]) / (tab.t[i + 1] - tab.t[i]);
    return tab.gamma[i] + w * (tab.gamma[i + 1] - tab.gamma[i]);
}

double DecayProfile::accumulated_rate(double t) const {
    if (!(t >= 0.0)) throw std::domain_error("accumulated rate is defined for t >= 0");
    if (const auto* c = constant_rate()) return c->gamma0 * t;
    if (const auto* j = jc()) {
        if (j->branch == 1) {
            const double x = 0.5 * j->root * t;
            return j->lambda * t - 2.0 * log_cosh(x) -
                   2.0 * std::log1p(j->lambda / j->root * std::tanh(x));
        }
        if (j->branch == 0)
            return 2.0 * j->gamma0 * t -
                   4.0 * j->gamma0 / j->lambda * std::log1p(0.5 * j->lambda * t);
        const double tdiv = qsl::divergence_time(*this);
        if (t >= tdiv)
            throw std::domain_error("accumulated rate evaluated at or past the divergence time");
        const double x = 0.5 * j->root * t;
        const double d = std::cos(x) + j->lambda / j->root * std::sin(x);
        if (d <= 0.0)
            throw std::domain_error("accumulated rate evaluated at or past the divergence time");
        return j->lambda * t - 2.0 * std::log(d);
    }
    if (const auto* c = cosine()) {
        const double z = c->zeta, w = c->omega;
        return (z + std::exp(-z * t) * (w * std::sin(w * t) - z * std::cos(w * t))) /
               (z * z + w * w);
    }
    const auto& tab = std::get<TabulatedRate>(kind_);
    if (t >= tab.t.back()) return tab.lam.back();
    const auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    const size_t i = static_cast<size_t>(it - tab.t.begin()) - 1;
    const double dt = t - tab.t[i];
    const double w = dt / (tab.t[i + 1] - tab.t[i]);
    const double g = tab.gamma[i] + w * (tab.gamma[i + 1] - tab.gamma[i]);
    return tab.lam[i] + 0.5 * (tab.gamma[i] + g) * dt;
}

double DecayProfile::characteristic_time() const {
    if (const auto* c = constant_rate()) return 1.0 / c->gamma0;
    if (const auto* j = jc())
        return std::max(1.0 / j->lambda, 1.0 / std::sqrt(2.0 * j->lambda * j->gamma0));
    if (const auto* c = cosine())
        return c->omega > 0.0 ? std::max(1.0 / c->zeta, 1.0 / c->omega) : 1.0 / c->zeta;
    return std::get<TabulatedRate>(kind_).t.back();
}

double DecayProfile::default_horizon() const { return 10.0 * characteristic_time(); }

double DecayProfile::domain_end() const {
    if (const auto* j = jc(); j != nullptr && j->branch == -1) return qsl::divergence_time(*this);
    return std::numeric_limits<double>::infinity();
}

double DecayProfile::sup_accumulated() const {
    if (is_constant()) return std::numeric_limits<double>::infinity();
    if (jc() != nullptr) return std::numeric_limits<double>::infinity();
    if (const auto* c = cosine()) {
        if (c->omega == 0.0) return 1.0 / c->zeta;
        // Peaks sit at omega t = pi/2 + 2 pi k and decrease strictly, so the
        // first one is the supremum.
        return accumulated_rate(0.5 * std::acos(-1.0) / c->omega);
    }
    const auto& tab = std::get<TabulatedRate>(kind_);
    double best = 0.0;
    for (size_t i = 0; i + 1 < tab.t.size(); ++i) {
        best = std::max(best, tab.lam[i + 1]);
        // Interior extremum where the interpolated rate crosses zero.
        if (tab.gamma[i] * tab.gamma[i + 1] < 0.0) {
            const double dt = tab.t[i + 1] - tab.t[i];
            const double tz = tab.t[i] + dt * tab.gamma[i] / (tab.gamma[i] - tab.gamma[i + 1]);
            best = std::max(best, accumulated_rate(tz));
        }
    }
    return best;
}

std::optional<double> DecayProfile::first_passage(double target) const {
    if (target <= 0.0) return 0.0;
    if (const auto* c = constant_rate()) return target / c->gamma0;
    if (const auto* j = jc()) {
        if (j->branch == -1) {
            const double tdiv = qsl::divergence_time(*this);
            const double hi = tdiv * (1.0 - 1e-13);
            if (accumulated_rate(hi) < target) return tdiv;
            return bisect_up([this](double t) { return accumulated_rate(t); }, 0.0, hi, target);
        }
        const double rate_inf =
            j->branch == 1 ? 2.0 * j->lambda * j->gamma0 / (j->root + j->lambda)
                           : 2.0 * j->gamma0;
        double hi = std::max(characteristic_time(), target / rate_inf);
        for (int i = 0; i < 400 && accumulated_rate(hi) < target; ++i) hi *= 2.0;
        return bisect_up([this](double t) { return accumulated_rate(t); }, 0.0, hi, target);
    }
    if (const auto* c = cosine()) {
        if (c->omega == 0.0) {
            if (target >= 1.0 / c->zeta) return std::nullopt;
            return -std::log1p(-c->zeta * target) / c->zeta;
        }
        const double tpk = 0.5 * std::acos(-1.0) / c->omega;
        if (accumulated_rate(tpk) < target) return std::nullopt;
        return bisect_up([this](double t) { return accumulated_rate(t); }, 0.0, tpk, target);
    }
    const auto& tab = std::get<TabulatedRate>(kind_);
    for (size_t i = 0; i + 1 < tab.t.size(); ++i) {
        // Lambda is quadratic on the interval; find its first crossing.
        const double dt = tab.t[i + 1] - tab.t[i];
        const double m = (tab.gamma[i + 1] - tab.gamma[i]) / dt;
        const double need = target - tab.lam[i];
        // 0.5 m u^2 + g u = need, u in (0, dt]
        const double g = tab.gamma[i];
        double best = std::numeric_limits<double>::infinity();
        if (std::fabs(m) < 1e-300) {
            if (g > 0.0) {
                const double u = need / g;
                if (u > 0.0 && u <= dt) best = u;
            }
        } else {
            const double disc = g * g + 2.0 * m * need;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                for (const double u : {(-g + sq) / m, (-g - sq) / m})
                    if (u > 0.0 && u <= dt) best = std::min(best, u);
            }
        }
        if (std::isfinite(best)) return tab.t[i] + best;
    }
    return std::nullopt;
}

namespace {

// Scan an ordered list of breakpoints between which lambda(t) is monotone;
// report the earliest crossing below -tol if any.
CpCheckResult scan_cp(const DecayProfile& p, const std::vector<double>& pts) {
    CpCheckResult res{true, 0.0, std::nullopt};
    double prev = 0.0;
    for (const double t : pts) {
        const double lam = p.accumulated_rate(t);
        res.min_lambda = std::min(res.min_lambda, lam);
        if (lam < -kCpTol && !res.witness_t) {
            res.ok = false;
            res.witness_t = bisect_up(
                [&p](double u) { return -p.accumulated_rate(u); }, prev, t, kCpTol);
        }
        prev = t;
    }
    return res;
}

}  // namespace

CpCheckResult DecayProfile::cp_check(double horizon) const {
    if (!(horizon > 0.0)) throw std::invalid_argument("cp check needs a positive horizon");
    if (is_constant() || jc() != nullptr) {
        // Monotone accumulated rate starting at zero (on its domain).
        return {true, 0.0, std::nullopt};
    }
    std::vector<double> pts;
    if (const auto* c = cosine()) {
        if (c->omega > 0.0) {
            const double pi = std::acos(-1.0);
            for (int k = 0;; ++k) {
                const double t = (2.0 * k + 1.0) * pi / (2.0 * c->omega);
                if (t >= horizon) break;
                pts.push_back(t);
                if (pts.size() > 4000000) break;  // envelope long dead by now
            }
        }
        pts.push_back(horizon);
        return scan_cp(*this, pts);
    }
    const auto& tab = std::get<TabulatedRate>(kind_);
    for (size_t i = 0; i + 1 < tab.t.size() && tab.t[i] < horizon; ++i) {
        if (tab.gamma[i] * tab.gamma[i + 1] < 0.0) {
            const double dt = tab.t[i + 1] - tab.t[i];
            pts.push_back(tab.t[i] + dt * tab.gamma[i] / (tab.gamma[i] - tab.gamma[i + 1]));
        }
        if (tab.t[i + 1] < horizon) pts.push_back(tab.t[i + 1]);
    }
    pts.push_back(horizon);
    std::sort(pts.begin(), pts.end());
    return scan_cp(*this, pts);
}

std::optional<double> DecayProfile::first_sign_change(double horizon) const {
    if (is_constant()) return std::nullopt;
    if (const auto* j = jc()) {
        if (j->branch != -1) return std::nullopt;
        const double tdiv = qsl::divergence_time(*this);
        return tdiv <= horizon ? std::optional<double>(tdiv) : std::nullopt;
    }
    if (const auto* c = cosine()) {
        if (c->omega == 0.0) return std::nullopt;
        const double t = 0.5 * std::acos(-1.0) / c->omega;
        return t <= horizon ? std::optional<double>(t) : std::nullopt;
    }
    const auto& tab = std::get<TabulatedRate>(kind_);
    // Samples with |gamma| below this are zero-crossing boundary points.
    const double tol = 1e-12 * tab.max_abs_gamma;
    int sign0 = 0;
    size_t last_signed = 0;
    for (size_t i = 0; i < tab.t.size(); ++i) {
        if (std::fabs(tab.gamma[i]) <= tol) continue;
        const int sign = tab.gamma[i] > 0.0 ? 1 : -1;
        if (sign0 == 0) {
            sign0 = sign;
        } else if (sign != sign0) {
            double tz;
            if (tab.gamma[last_signed] * tab.gamma[i] < 0.0 && i == last_signed + 1) {
                const double dt = tab.t[i] - tab.t[last_signed];
                tz = tab.t[last_signed] +
                     dt * tab.gamma[last_signed] / (tab.gamma[last_signed] - tab.gamma[i]);
            } else {
                tz = tab.t[i - 1];  // sign flips across zero-valued samples
            }
            if (tz <= horizon) return tz;
            return std::nullopt;
        }
        last_signed = i;
    }
    return std::nullopt;
}

bool DecayProfile::nonnegative_rate(double horizon) const {
    if (is_constant()) return true;
    // The trigonometric branch always leaves the nonnegative class at its
    // divergence, however far out; the flag follows the branch sign so that
    // the Markov boundary sits exactly at lambda = 2 gamma0.
    if (const auto* j = jc()) return j->branch >= 0;
    if (const auto* c = cosine()) return c->omega == 0.0;
    // Piecewise-linear gamma attains its window minimum at a node or at the
    // horizon itself.
    const auto& tab = std::get<TabulatedRate>(kind_);
    const double tol = 1e-12 * tab.max_abs_gamma;
    for (size_t i = 0; i < tab.t.size() && tab.t[i] <= horizon; ++i)
        if (tab.gamma[i] < -tol) return false;
    if (horizon < tab.t.back() && gamma_at(horizon) < -tol) return false;
    return true;
}

std::string to_string(DynamicsClass c) {
    switch (c) {
        case DynamicsClass::markov: return "MARKOV";
        case DynamicsClass::class_a: return "CLASS_A";
        case DynamicsClass::class_b: return "CLASS_B";
    }
    return "?";
}

}  // namespace qsl
