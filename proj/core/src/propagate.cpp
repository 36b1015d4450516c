#include "qslsim/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace qsl {

BlochVector propagate_by_dlambda(const BlochVector& s, double dlam, const BathSpec& bath) {
    const double rz_fp = bath.fixed_point.rz;
    const double half = std::exp(-0.5 * bath.gamma_sum * dlam);
    return BlochVector{s.rx * half, s.ry * half, rz_fp + (s.rz - rz_fp) * half * half};
}

BlochVector propagate_closed(const BlochVector& s, const DecayProfile& profile,
                             const BathSpec& bath, double t0, double t1) {
    if (!(t0 <= t1)) throw std::invalid_argument("propagation needs t0 <= t1");
    const double dlam = profile.accumulated_rate(t1) - profile.accumulated_rate(t0);
    return propagate_by_dlambda(s, dlam, bath);
}

namespace {

// Dense 2x2 complex matrices; the oracle works on the density matrix itself
// so that it shares no algebra with the Bloch closed form.
struct Mat2 {
    std::complex<double> a00, a01, a10, a11;
};

Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a00 * y.a00 + x.a01 * y.a10, x.a00 * y.a01 + x.a01 * y.a11,
            x.a10 * y.a00 + x.a11 * y.a10, x.a10 * y.a01 + x.a11 * y.a11};
}
Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a00 + y.a00, x.a01 + y.a01, x.a10 + y.a10, x.a11 + y.a11};
}
Mat2 operator*(double c, const Mat2& x) { return {c * x.a00, c * x.a01, c * x.a10, c * x.a11}; }

constexpr Mat2 kSigmaPlus{0.0, 1.0, 0.0, 0.0};
constexpr Mat2 kSigmaMinus{0.0, 0.0, 1.0, 0.0};

Mat2 dissipator(const Mat2& jump, const Mat2& rho) {
    const Mat2 jdag{std::conj(jump.a00), std::conj(jump.a10), std::conj(jump.a01),
                    std::conj(jump.a11)};
    const Mat2 sandwich = jump * rho * jdag;
    const Mat2 jj = jdag * jump;
    return sandwich + (-0.5) * (jj * rho + rho * jj);
}

Mat2 master_rhs(double gamma, double e_beta, const Mat2& rho) {
    return gamma * (dissipator(kSigmaPlus, rho) + e_beta * dissipator(kSigmaMinus, rho));
}

Mat2 bloch_to_rho(const BlochVector& s) {
    const std::complex<double> i(0.0, 1.0);
    return {0.5 * (1.0 + s.rz), 0.5 * (s.rx - i * s.ry), 0.5 * (s.rx + i * s.ry),
            0.5 * (1.0 - s.rz)};
}

BlochVector rho_to_bloch(const Mat2& rho) {
    return BlochVector{2.0 * rho.a01.real(), -2.0 * rho.a01.imag(),
                       rho.a00.real() - rho.a11.real()};
}

double error_norm(const Mat2& err, const Mat2& y0, const Mat2& y1, double tol) {
    const std::complex<double>* e = &err.a00;
    const std::complex<double>* a = &y0.a00;
    const std::complex<double>* b = &y1.a00;
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double sc = tol + tol * std::max(std::abs(a[k]), std::abs(b[k]));
        const double r = std::abs(e[k]) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / 4.0);
}

struct StepCallback {
    // Called with the endpoints and derivatives of each accepted step.
    virtual void accepted(double ta, const Mat2& ya, const Mat2& fa, double tb, const Mat2& yb,
                          const Mat2& fb) = 0;
    // Next time the integrator must not step across; +inf when unconstrained.
    virtual double next_stop() const { return std::numeric_limits<double>::infinity(); }
    virtual ~StepCallback() = default;
};

// Dormand-Prince 5(4) with FSAL and PI step-size control.
Mat2 dopri_integrate(const BlochVector& s, const DecayProfile& profile, const BathSpec& bath,
                     double t0, double t1, double tol, StepCallback* cb) {
    if (!(tol >= 1e-12 && tol <= 1e-4))
        throw std::invalid_argument("oracle tolerance must lie in [1e-12, 1e-4]");
    if (!(t0 <= t1)) throw std::invalid_argument("oracle needs t0 <= t1");
    const double e_beta = std::exp(bath.beta);
    Mat2 y = bloch_to_rho(s);
    if (t0 == t1) return y;

    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double E[7] = {71.0 / 57600,     0.0,         -71.0 / 16695, 71.0 / 1920,
                                -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

    double t = t0;
    const double span = t1 - t0;
    double h = span / 100.0;
    double err_prev = 1.0;
    Mat2 k[7];
    k[0] = master_rhs(profile.gamma_at(t), e_beta, y);
    for (long steps = 0; t < t1; ++steps) {
        if (steps > 10'000'000)
            throw std::domain_error("oracle integration exceeded the step budget");
        h = std::min(h, t1 - t);
        if (h < 1e-14 * std::max({1.0, std::fabs(t0), std::fabs(t1)}))
            throw std::domain_error("oracle step size underflow (rate too stiff here)");
        if (cb != nullptr) {
            // Land on pending sample times exactly; gaps below resolution are
            // left to the interpolant.
            const double stop = cb->next_stop();
            const double gap = stop - t;
            if (gap > 1e-13 * std::max({1.0, std::fabs(t), std::fabs(t1)}) && gap < h) h = gap;
        }
        for (int i = 1; i < 7; ++i) {
            Mat2 acc = y;
            for (int j = 0; j < i; ++j) acc = acc + (h * A[i][j]) * k[j];
            k[i] = master_rhs(profile.gamma_at(t + C[i] * h), e_beta, acc);
        }
        Mat2 ynew = y;
        for (int j = 0; j < 6; ++j) ynew = ynew + (h * A[6][j]) * k[j];
        Mat2 errm{0.0, 0.0, 0.0, 0.0};
        for (int j = 0; j < 7; ++j) errm = errm + (h * E[j]) * k[j];
        const double err = error_norm(errm, y, ynew, tol);
        if (err <= 1.0) {
            if (cb != nullptr) cb->accepted(t, y, k[0], t + h, ynew, k[6]);
            t += h;
            y = ynew;
            k[0] = k[6];  // FSAL
            err_prev = std::max(err, 1e-4);
        }
        double factor;
        if (err == 0.0)
            factor = 5.0;
        else
            factor = std::clamp(0.9 * std::pow(err, -0.2) * std::pow(err_prev, 0.04), 0.2, 5.0);
        h *= factor;
    }
    return y;
}

}  // namespace

BlochVector integrate_oracle(const BlochVector& s, const DecayProfile& profile,
                             const BathSpec& bath, double t0, double t1, double tol) {
    return rho_to_bloch(dopri_integrate(s, profile, bath, t0, t1, tol, nullptr));
}

namespace {

struct HermiteSampler final : StepCallback {
    const std::vector<double>* ts;
    size_t next = 0;
    std::vector<BlochVector> out;

    double next_stop() const override {
        return next < ts->size() ? (*ts)[next] : std::numeric_limits<double>::infinity();
    }

    void accepted(double ta, const Mat2& ya, const Mat2& fa, double tb, const Mat2& yb,
                  const Mat2& fb) override {
        const double h = tb - ta;
        while (next < ts->size() && (*ts)[next] <= tb + 1e-15 * std::max(1.0, std::fabs(tb))) {
            const double th = ((*ts)[next] - ta) / h;
            const double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
            const double h10 = th * (1.0 - th) * (1.0 - th);
            const double h01 = th * th * (3.0 - 2.0 * th);
            const double h11 = th * th * (th - 1.0);
            const Mat2 v = h00 * ya + (h10 * h) * fa + h01 * yb + (h11 * h) * fb;
            out.push_back(rho_to_bloch(v));
            ++next;
        }
    }
};

}  // namespace

std::vector<BlochVector> integrate_oracle_path(const BlochVector& s, const DecayProfile& profile,
                                               const BathSpec& bath, double t0, double t1,
                                               double tol, const std::vector<double>& sample_ts) {
    for (size_t i = 0; i < sample_ts.size(); ++i) {
        const bool ordered = i == 0 || sample_ts[i - 1] <= sample_ts[i];
        if (!ordered || sample_ts[i] < t0 || sample_ts[i] > t1)
            throw std::invalid_argument("oracle sample times must ascend within [t0, t1]");
    }
    HermiteSampler sampler;
    sampler.ts = &sample_ts;
    // Samples exactly at t0 need no interpolation.
    BlochVector first = s;
    while (sampler.next < sample_ts.size() && sample_ts[sampler.next] <= t0) {
        sampler.out.push_back(first);
        ++sampler.next;
    }
    dopri_integrate(s, profile, bath, t0, t1, tol, &sampler);
    return sampler.out;
}

double lambda_for_distance_ball(const BlochVector& s, const BathSpec& bath, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("ball radius must be positive");
    const double rz_fp = bath.fixed_point.rz;
    const double a = s.rx * s.rx + s.ry * s.ry;
    const double dz = s.rz - rz_fp;
    const double b = dz * dz;
    if (a + b <= eps * eps) return 0.0;
    // Solve a*x + b*x^2 = eps^2 for x = exp(-G lambda); written to avoid
    // cancellation at small eps.
    const double x = 2.0 * eps * eps / (a + std::sqrt(a * a + 4.0 * b * eps * eps));
    if (x >= 1.0) return 0.0;
    return -std::log(x) / bath.gamma_sum;
}

double lambda_for_rz_level(const BlochVector& s, const BathSpec& bath, double level) {
    const double rz_fp = bath.fixed_point.rz;
    const double dz0 = s.rz - rz_fp;
    const double dz1 = level - rz_fp;
    if (dz0 == 0.0) {
        if (dz1 == 0.0) return 0.0;
        throw std::invalid_argument("state sits at the fixed-point level already");
    }
    const double x = dz1 / dz0;
    if (x <= 0.0)
        throw std::invalid_argument("level lies on the far side of the fixed point");
    return -std::log(x) / bath.gamma_sum;
}

std::optional<double> hit_time(const BlochVector& s, const DecayProfile& profile,
                               const BathSpec& bath, const HitSpec& target) {
    const double lam_star = target.mode == HitSpec::Mode::distance_ball
                                ? lambda_for_distance_ball(s, bath, target.eps)
                                : lambda_for_rz_level(s, bath, target.level);
    if (lam_star < 0.0)
        throw std::invalid_argument("target needs backflow; no forward passage exists");
    if (lam_star == 0.0) return 0.0;
    return profile.first_passage(lam_star);
}

void Trajectory::push(double time, const BlochVector& s, const BathSpec& bath,
                      const DecayProfile& p) {
    if (!t.empty() && time <= t.back())
        throw std::invalid_argument("trajectory times must strictly increase");
    t.push_back(time);
    state.push_back(s);
    distance.push_back(trace_distance(s, bath.fixed_point));
    purity.push_back(qsl::purity(s));
    gamma.push_back(p.gamma_at(time));
    lambda.push_back(p.accumulated_rate(time));
}

Trajectory sample_free_evolution(const BlochVector& s, const DecayProfile& profile,
                                 const BathSpec& bath, double t0, double t1, double dt) {
    if (!(t0 <= t1)) throw std::invalid_argument("sampling needs t0 <= t1");
    if (!(dt > 0.0)) throw std::invalid_argument("sampling step must be positive");
    Trajectory traj;
    const double lam0 = profile.accumulated_rate(t0);
    double time = t0;
    for (long i = 0;; ++i) {
        const BlochVector here =
            propagate_by_dlambda(s, profile.accumulated_rate(time) - lam0, bath);
        traj.push(time, here, bath, profile);
        if (time >= t1) break;
        time = t0 + dt * static_cast<double>(i + 1);
        if (time > t1 - 1e-12 * std::max(1.0, t1 - t0)) time = t1;
    }
    return traj;
}

}  // namespace qsl
