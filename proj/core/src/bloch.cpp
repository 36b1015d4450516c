#include "qslsim/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsl {

double BlochVector::norm2() const { return rx * rx + ry * ry + rz * rz; }

double BlochVector::norm() const { return std::sqrt(norm2()); }

std::pair<double, double> BlochVector::polar() const {
    const double r = norm();
    if (r == 0.0) return {0.0, 0.0};
    return {r, std::acos(std::clamp(rz / r, -1.0, 1.0))};
}

BlochVector make_state(double rx, double ry, double rz) {
    if (!std::isfinite(rx) || !std::isfinite(ry) || !std::isfinite(rz))
        throw std::invalid_argument("Bloch components must be finite");
    BlochVector s{rx, ry, rz};
    if (s.norm() > 1.0 + 1e-12)
        throw std::invalid_argument("Bloch vector lies outside the unit ball");
    return s;
}

double purity(const BlochVector& s) { return 0.5 * (1.0 + s.norm2()); }

double trace_distance(const BlochVector& a, const BlochVector& b) {
    const double dx = a.rx - b.rx, dy = a.ry - b.ry, dz = a.rz - b.rz;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

BathSpec BathSpec::from_beta(double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("inverse temperature must be >= 0");
    BathSpec b;
    b.beta = beta;
    b.rfp_magnitude = std::tanh(0.5 * beta);
    b.gamma_sum = 1.0 + std::exp(beta);
    b.fixed_point = {0.0, 0.0, -b.rfp_magnitude};
    return b;
}

BlochVector Rotation::apply(const BlochVector& s) const {
    double ax = axis[0], ay = axis[1], az = axis[2];
    const double n = std::sqrt(ax * ax + ay * ay + az * az);
    if (n == 0.0) throw std::invalid_argument("rotation axis must be nonzero");
    ax /= n;
    ay /= n;
    az /= n;
    const double c = std::cos(angle), si = std::sin(angle);
    // Rodrigues: r' = r c + (a x r) s + a (a.r)(1-c)
    const double dot = ax * s.rx + ay * s.ry + az * s.rz;
    const double cx = ay * s.rz - az * s.ry;
    const double cy = az * s.rx - ax * s.rz;
    const double cz = ax * s.ry - ay * s.rx;
    return {s.rx * c + cx * si + ax * dot * (1.0 - c),
            s.ry * c + cy * si + ay * dot * (1.0 - c),
            s.rz * c + cz * si + az * dot * (1.0 - c)};
}

double purity_speed(double gamma, double r, double theta, const BathSpec& bath) {
    const double ct = std::cos(theta);
    return -gamma * bath.gamma_sum * r *
           (0.5 * r * (1.0 + ct * ct) + bath.rfp_magnitude * ct);
}

std::vector<double> extremal_angles(double r, const BathSpec& bath) {
    if (!(r > 0.0) || r > 1.0 + 1e-12)
        throw std::invalid_argument("radius must lie in (0, 1]");
    const double pi = std::acos(-1.0);
    std::vector<double> out{0.0};
    // dv/dtheta ~ sin(theta) (r cos(theta) + rfp): interior root needs r >= rfp.
    if (r >= bath.rfp_magnitude) {
        const double interior = std::acos(std::clamp(-bath.rfp_magnitude / r, -1.0, 1.0));
        if (interior > 0.0 && interior < pi - 1e-12) out.push_back(interior);
    }
    out.push_back(pi);
    return out;
}

std::pair<BlochVector, Rotation> rotate_to_angle(const BlochVector& s, double theta_target) {
    const double pi = std::acos(-1.0);
    if (!(theta_target >= 0.0) || theta_target > pi)
        throw std::invalid_argument("target polar angle must lie in [0, pi]");
    const double r = s.norm();
    if (r == 0.0) return {s, Rotation::identity()};
    const double ux = s.rx / r, uy = s.ry / r, uz = s.rz / r;
    const double vx = std::sin(theta_target), vz = std::cos(theta_target);
    const double dot = ux * vx + uz * vz;  // v has no y component
    if (dot >= 1.0 - 1e-15) return {{r * vx, 0.0, r * vz}, Rotation::identity()};
    if (dot <= -1.0 + 1e-15) {
        // Antipodal, so u is already in the x-z plane: any perpendicular axis
        // works; (uz, 0, -ux) keeps the rotation in that plane.
        Rotation rot{{uz, 0.0, -ux}, pi};
        return {{r * vx, 0.0, r * vz}, rot};
    }
    const double cx = uy * vz - uz * 0.0;
    const double cy = uz * vx - ux * vz;
    const double cz = ux * 0.0 - uy * vx;
    const double cn = std::sqrt(cx * cx + cy * cy + cz * cz);
    Rotation rot{{cx / cn, cy / cn, cz / cn}, std::atan2(cn, dot)};
    return {{r * vx, 0.0, r * vz}, rot};
}

}  // namespace qsl
