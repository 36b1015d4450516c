#pragma once

// Small self-contained reference implementations used to cross-check the
// library. Deliberately written from first principles, sharing no code with
// the implementations under test.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "qslsim/bloch.hpp"

namespace testing_oracles {

// Five-point central difference for f'(x).
inline double derivative(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

namespace detail {
inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-11) {
    if (!(b >= a)) throw std::invalid_argument("integrate: needs a <= b");
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return detail::adaptive(f, a, b, fa, fm, fb, detail::simpson(a, b, fa, fm, fb), tol, 48);
}

// Trace norm of rho(a) - rho(b) computed through the eigenvalues of the
// explicit 2x2 matrix difference, not through Bloch coordinates.
inline double trace_norm_gap(const qsl::BlochVector& a, const qsl::BlochVector& b) {
    using C = std::complex<double>;
    const C m00(0.5 * (a.rz - b.rz), 0.0);
    const C m01(0.5 * (a.rx - b.rx), -0.5 * (a.ry - b.ry));
    const C m10 = std::conj(m01);
    const C m11 = -m00;
    // Hermitian and traceless, so the eigenvalues are +-sqrt(-det).
    const C det = m00 * m11 - m01 * m10;
    const double lam = std::sqrt(std::max(0.0, -det.real()));
    return 2.0 * lam;
}

// Purity change rate in the variable-grouping used by the thermal-bath
// appendix: v = -gamma (e^b - 1) r [cos(theta) + r (1 + cos^2) / (2 rfp)].
// Valid for b > 0 only (rfp != 0).
inline double purity_speed_grouped(double gamma, double r, double theta, double beta) {
    const double rfp = std::tanh(beta / 2.0);
    const double c = std::cos(theta);
    return -gamma * (std::exp(beta) - 1.0) * r * (c + r * (1.0 + c * c) / (2.0 * rfp));
}

}  // namespace testing_oracles
