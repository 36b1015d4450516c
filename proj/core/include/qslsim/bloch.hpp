#pragma once

#include <array>
#include <utility>
#include <vector>

namespace qsl {

/// State of a single qubit in the Bloch-vector picture, rho = (I + r.sigma)/2.
/// Physical states satisfy |r| <= 1; a slack of 1e-12 absorbs rounding.
struct BlochVector {
    double rx = 0.0;
    double ry = 0.0;
    double rz = 0.0;

    double norm() const;
    double norm2() const;

    /// (r, theta) with theta = arccos(rz/r) in [0, pi]; theta = 0 at r = 0.
    std::pair<double, double> polar() const;

    bool operator==(const BlochVector&) const = default;
};

/// Throws std::invalid_argument if |r| > 1 + 1e-12 or any component is non-finite.
BlochVector make_state(double rx, double ry, double rz);

/// P = tr(rho^2) = (1 + |r|^2)/2.
double purity(const BlochVector& s);

/// Trace distance between the two density operators. For qubits this equals
/// the Euclidean norm of the Bloch-vector difference: the difference operator
/// (dr.sigma)/2 has eigenvalues +-|dr|/2, so its trace norm is |dr|.
double trace_distance(const BlochVector& a, const BlochVector& b);

/// Thermal-bath parameters for a fixed inverse temperature beta >= 0.
/// The stationary state sits on the -z axis at distance rfp_magnitude.
struct BathSpec {
    double beta = 0.0;
    double rfp_magnitude = 0.0;  // tanh(beta/2) = (e^b - 1)/(e^b + 1)
    double gamma_sum = 2.0;      // 1 + e^beta, the total dissipation weight
    BlochVector fixed_point{0.0, 0.0, 0.0};

    static BathSpec from_beta(double beta);
};

/// Unitary pulse, idealized as instantaneous: rotation of the Bloch vector
/// about a unit axis. Purity is exactly preserved.
struct Rotation {
    std::array<double, 3> axis{0.0, 0.0, 1.0};
    double angle = 0.0;

    BlochVector apply(const BlochVector& s) const;
    bool is_identity(double tol = 1e-15) const { return angle > -tol && angle < tol; }

    static Rotation identity() { return {}; }
};

/// Instantaneous purity change dP/dt under the thermal dissipator with rate
/// gamma, for a state at radius r and polar angle theta:
///   v = -gamma * (1+e^b) * r * [ r (1+cos^2 theta)/2 + rfp cos theta ].
/// This form stays finite at beta = 0.
double purity_speed(double gamma, double r, double theta, const BathSpec& bath);

/// Angles where d(purity_speed)/d(theta) vanishes, ascending. Always contains
/// {0, pi}; for r >= rfp > 0 also the interior root arccos(-rfp/r), which
/// collapses to pi/2 when beta = 0. Requires r in (0, 1].
std::vector<double> extremal_angles(double r, const BathSpec& bath);

/// Rotate `s` into the x-z plane at polar angle theta_target (same radius).
/// Returns the rotated state and the pulse that achieves it. theta_target
/// must lie in [0, pi]. A zero vector returns unchanged with the identity.
std::pair<BlochVector, Rotation> rotate_to_angle(const BlochVector& s, double theta_target);

}  // namespace qsl
