#pragma once

// Explicit Riemannian surfaces.
//
// Sphere-like surfaces use ambient R^3 coordinates (no polar-chart singularities),
// tori use fundamental-domain chart coordinates in R^2 with wraparound. Every
// builtin exposes the same duck-typed surface consumed by the generic geodesic
// machinery in geodesic.hpp:
//
//   project(x)                 nearest point on the manifold / fundamental domain
//   constraint_residual(x)     distance-like measure of x being off the manifold
//   project_tangent(x, v)      tangential part of v at x
//   inner(x, u, v)             metric g_x(u, v)
//   acceleration(x, v)         x'' for the geodesic through (x, v)
//   transport_rate(x, xd, w)   w' for w parallel along a curve with velocity xd
//   displacement(p, q)         ambient chord, or nearest-image chart difference
//   tangent_frame(x)           g-orthonormal basis of T_x
//
// Builtins with closed-form geodesics additionally provide exact_shoot,
// exact_connect, exact_transport and exact_distance.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geonet/errors.hpp"

namespace geonet {

inline constexpr double kPi = std::numbers::pi;

template <class M>
concept RiemannianSurface = requires(const M& m, const typename M::Vec& x, const typename M::Vec& v) {
    typename M::Vec;
    { M::kAmbientDim } -> std::convertible_to<int>;
    { m.inj() } -> std::convertible_to<double>;
    { m.diam() } -> std::convertible_to<double>;
    { m.project(x) } -> std::convertible_to<typename M::Vec>;
    { m.constraint_residual(x) } -> std::convertible_to<double>;
    { m.project_tangent(x, v) } -> std::convertible_to<typename M::Vec>;
    { m.inner(x, v, v) } -> std::convertible_to<double>;
    { m.acceleration(x, v) } -> std::convertible_to<typename M::Vec>;
    { m.transport_rate(x, v, v) } -> std::convertible_to<typename M::Vec>;
    { m.displacement(x, x) } -> std::convertible_to<typename M::Vec>;
    { m.tangent_frame(x) } -> std::convertible_to<std::array<typename M::Vec, 2>>;
    { m.kind_name() } -> std::convertible_to<std::string_view>;
};

template <class M>
concept HasExactGeodesics = RiemannianSurface<M> && requires(const M& m, const typename M::Vec& x) {
    { m.exact_shoot(x, x, 1.0) } -> std::convertible_to<std::pair<typename M::Vec, typename M::Vec>>;
    { m.exact_connect(x, x) } -> std::convertible_to<typename M::Vec>;
    { m.exact_transport(x, x, 1.0, x) } -> std::convertible_to<typename M::Vec>;
    { m.exact_distance(x, x) } -> std::convertible_to<double>;
};

/// Sphere-like surfaces expose level sets of a height function (latitude circles).
template <class M>
concept SphereLike = RiemannianSurface<M> && requires(const M& m, double s) {
    { m.level_point(s, s) } -> std::convertible_to<typename M::Vec>;
};

/// Tori expose generators of the fundamental group as closed chart displacements.
template <class M>
concept TorusLike = RiemannianSurface<M> && requires(const M& m) {
    { m.loop_generators() } -> std::convertible_to<std::vector<std::pair<typename M::Vec, typename M::Vec>>>;
};

template <class M>
double norm(const M& m, const typename M::Vec& x, const typename M::Vec& v) {
    return std::sqrt(std::max(0.0, m.inner(x, v, v)));
}

namespace detail {

inline Eigen::Vector3d any_orthogonal(const Eigen::Vector3d& n) {
    Eigen::Index i = 0;
    n.cwiseAbs().minCoeff(&i);
    return n.cross(Eigen::Vector3d::Unit(i)).normalized();
}

inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    if (a >= 2.0 * kPi) a = 0.0;
    return a;
}

inline double wrap_symmetric(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Round sphere of radius R in R^3.

class RoundSphere {
public:
    using Vec = Eigen::Vector3d;
    static constexpr int kAmbientDim = 3;

    explicit RoundSphere(double radius = 1.0) : RoundSphere(radius, kPi * radius, kPi * radius) {}
    RoundSphere(double radius, double inj, double diam) : radius_(radius), inj_(inj), diam_(diam) {
        if (!(radius > 0) || !(inj > 0) || !(diam > 0))
            throw ValidationError("RoundSphere: radius, inj and diam must be positive");
    }

    std::string_view kind_name() const { return "RoundSphere"; }
    double radius() const { return radius_; }
    double inj() const { return inj_; }
    double diam() const { return diam_; }

    Vec project(const Vec& x) const { return radius_ * x.normalized(); }
    double constraint_residual(const Vec& x) const { return std::abs(x.norm() - radius_); }
    Vec project_tangent(const Vec& x, const Vec& v) const {
        const Vec n = x.normalized();
        return v - v.dot(n) * n;
    }
    double inner(const Vec&, const Vec& u, const Vec& v) const { return u.dot(v); }
    Vec acceleration(const Vec& x, const Vec& v) const { return -(v.squaredNorm() / (radius_ * radius_)) * x; }
    Vec transport_rate(const Vec& x, const Vec& xd, const Vec& w) const {
        return -(w.dot(xd) / (radius_ * radius_)) * x;
    }
    Vec displacement(const Vec& p, const Vec& q) const { return q - p; }
    std::array<Vec, 2> tangent_frame(const Vec& x) const {
        const Vec n = x.normalized();
        const Vec e1 = detail::any_orthogonal(n);
        return {e1, n.cross(e1)};
    }
    Eigen::Matrix3d metric_matrix(const Vec& x) const {
        const Vec n = x.normalized();
        return Eigen::Matrix3d::Identity() - n * n.transpose();
    }

    Vec level_point(double s, double angle) const {
        const double rho = radius_ * std::sqrt(std::max(0.0, 1.0 - s * s));
        return {rho * std::cos(angle), rho * std::sin(angle), radius_ * s};
    }

    std::pair<Vec, Vec> exact_shoot(const Vec& x, const Vec& v, double t) const {
        const double speed = v.norm();
        if (speed == 0.0 || t == 0.0) return {x, v};
        const Vec u = v / speed;
        const double th = speed * t / radius_;
        const Vec p = std::cos(th) * x + radius_ * std::sin(th) * u;
        const Vec w = speed * (-std::sin(th) * x / radius_ + std::cos(th) * u);
        return {project(p), w};
    }
    /// Initial velocity (parameter time 1) of the minimizing arc p -> q.
    Vec exact_connect(const Vec& p, const Vec& q) const {
        const Vec pn = p.normalized();
        const Vec qn = q.normalized();
        const double th = std::atan2(pn.cross(qn).norm(), pn.dot(qn));
        if (th == 0.0) return Vec::Zero();
        Vec dir = qn - qn.dot(pn) * pn;
        if (dir.norm() < 1e-300) throw PreconditionError("RoundSphere: antipodal points have no unique geodesic");
        return radius_ * th * dir.normalized();
    }
    Vec exact_transport(const Vec& x, const Vec& v, double t, const Vec& w) const {
        const double speed = v.norm();
        if (speed == 0.0 || t == 0.0) return w;
        const Vec tan0 = v / speed;
        const Vec bin = x.normalized().cross(tan0);
        const auto [xt, vt] = exact_shoot(x, v, t);
        return w.dot(tan0) * (vt / speed) + w.dot(bin) * bin;
    }
    double exact_distance(const Vec& p, const Vec& q) const {
        const Vec pn = p.normalized();
        const Vec qn = q.normalized();
        return radius_ * std::atan2(pn.cross(qn).norm(), pn.dot(qn));
    }

private:
    double radius_;
    double inj_;
    double diam_;
};

// ---------------------------------------------------------------------------
// Ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 with the induced metric.

class Ellipsoid {
public:
    using Vec = Eigen::Vector3d;
    static constexpr int kAmbientDim = 3;

    Ellipsoid(double a, double b, double c) : Ellipsoid(a, b, c, default_inj(a, b, c), default_diam(a, b, c)) {}
    Ellipsoid(double a, double b, double c, double inj, double diam) : axes_(a, b, c), inj_(inj), diam_(diam) {
        if (!(a > 0 && b > 0 && c > 0) || !(inj > 0) || !(diam > 0))
            throw ValidationError("Ellipsoid: axes, inj and diam must be positive");
        inv_sq_ = axes_.cwiseProduct(axes_).cwiseInverse();
    }

    /// pi / sqrt(K_max); K_max = c^2/(a^2 b^2) for sorted axes a <= b <= c.
    static double default_inj(double a, double b, double c) {
        std::array<double, 3> s{a, b, c};
        std::sort(s.begin(), s.end());
        return kPi * s[0] * s[1] / s[2];
    }
    /// Intrinsic diameter of a convex surface is at most pi/2 times its extrinsic diameter.
    static double default_diam(double a, double b, double c) { return kPi * std::max({a, b, c}); }

    std::string_view kind_name() const { return "Ellipsoid"; }
    const Eigen::Vector3d& axes() const { return axes_; }
    double inj() const { return inj_; }
    double diam() const { return diam_; }

    double implicit(const Vec& x) const { return x.cwiseProduct(x).dot(inv_sq_) - 1.0; }
    Vec gradient(const Vec& x) const { return 2.0 * x.cwiseProduct(inv_sq_); }

    Vec project(const Vec& x) const {
        // Radial rescale then Newton along the gradient.
        Vec y = x / std::sqrt(x.cwiseProduct(x).dot(inv_sq_));
        for (int it = 0; it < 4; ++it) {
            const Vec g = gradient(y);
            y -= implicit(y) * g / g.squaredNorm();
        }
        return y;
    }
    double constraint_residual(const Vec& x) const {
        return std::abs(implicit(x)) / gradient(x).norm();
    }
    Vec normal(const Vec& x) const { return gradient(x).normalized(); }
    Vec project_tangent(const Vec& x, const Vec& v) const {
        const Vec n = normal(x);
        return v - v.dot(n) * n;
    }
    double inner(const Vec&, const Vec& u, const Vec& v) const { return u.dot(v); }
    Vec acceleration(const Vec& x, const Vec& v) const {
        const Vec g = gradient(x);
        const double vhv = 2.0 * v.cwiseProduct(v).dot(inv_sq_);
        return -(vhv / g.squaredNorm()) * g;
    }
    Vec transport_rate(const Vec& x, const Vec& xd, const Vec& w) const {
        const Vec g = gradient(x);
        const double whx = 2.0 * w.cwiseProduct(xd).dot(inv_sq_);
        return -(whx / g.squaredNorm()) * g;
    }
    Vec displacement(const Vec& p, const Vec& q) const { return q - p; }
    std::array<Vec, 2> tangent_frame(const Vec& x) const {
        const Vec n = normal(x);
        const Vec e1 = detail::any_orthogonal(n);
        return {e1, n.cross(e1)};
    }
    Eigen::Matrix3d metric_matrix(const Vec& x) const {
        const Vec n = normal(x);
        return Eigen::Matrix3d::Identity() - n * n.transpose();
    }
    Vec level_point(double s, double angle) const {
        const double rho = std::sqrt(std::max(0.0, 1.0 - s * s));
        return {axes_.x() * rho * std::cos(angle), axes_.y() * rho * std::sin(angle), axes_.z() * s};
    }

private:
    Eigen::Vector3d axes_;
    Eigen::Vector3d inv_sq_;
    double inj_;
    double diam_;
};

// ---------------------------------------------------------------------------
// Sphere of radius R with metric e^{2 phi} g_round; phi is a real spherical
// harmonic expansion of degree <= 2 in Cartesian form, clamped so the conformal
// factor stays in [0.5, 2].

struct HarmonicTerm {
    int l = 0;
    int m = 0;
    double coeff = 0.0;
};

class ConformalSphere {
public:
    using Vec = Eigen::Vector3d;
    static constexpr int kAmbientDim = 3;

    static constexpr double kPhiMin = -0.5 * std::numbers::ln2;
    static constexpr double kPhiMax = 0.5 * std::numbers::ln2;

    ConformalSphere(double radius, std::vector<HarmonicTerm> terms)
        : radius_(radius), terms_(std::move(terms)) {
        validate();
        inj_ = default_inj();
        diam_ = kPi * radius_ * std::exp(phi_upper_bound());
    }
    ConformalSphere(double radius, std::vector<HarmonicTerm> terms, double inj, double diam)
        : radius_(radius), terms_(std::move(terms)), inj_(inj), diam_(diam) {
        validate();
        if (!(inj > 0) || !(diam > 0)) throw ValidationError("ConformalSphere: inj and diam must be positive");
    }

    std::string_view kind_name() const { return "ConformalSphere"; }
    double radius() const { return radius_; }
    const std::vector<HarmonicTerm>& terms() const { return terms_; }
    double inj() const { return inj_; }
    double diam() const { return diam_; }

    /// Bounds of the unclamped expansion over the unit sphere (term-wise).
    double phi_upper_bound() const { return std::min(kPhiMax, bound(+1)); }
    double phi_lower_bound() const { return std::max(kPhiMin, bound(-1)); }

    /// Term-wise bounds on the Gaussian curvature e^{-2 phi} (1 - R^2 lap phi) / R^2;
    /// each degree-l term satisfies R^2 lap Y = -l(l+1) Y. Only meaningful when
    /// the clamp is inactive.
    std::pair<double, double> curvature_bounds() const {
        const double lo = (1.0 + bound(-1, true)) * std::exp(-2.0 * phi_upper_bound()) / (radius_ * radius_);
        const double hi = (1.0 + bound(+1, true)) * std::exp(-2.0 * phi_lower_bound()) / (radius_ * radius_);
        return {lo, hi};
    }

    /// pi / sqrt(K_max) when the metric is smooth and positively curved
    /// (Klingenberg); otherwise pi R e^{phi_min} / 2.
    double default_inj() const {
        const bool clamped = bound(+1) > kPhiMax || bound(-1) < kPhiMin;
        const auto [kmin, kmax] = curvature_bounds();
        if (!clamped && kmin > 0.0) return kPi / std::sqrt(kmax);
        return 0.5 * kPi * radius_ * std::exp(phi_lower_bound());
    }

    /// Clamped phi at x and its ambient gradient (zero where clamped).
    std::pair<double, Vec> phi(const Vec& x) const {
        const Vec u = x / radius_;
        double value = 0.0;
        Vec grad = Vec::Zero();
        for (const auto& t : terms_) {
            const auto [p, dp] = basis(t.l, t.m, u);
            value += t.coeff * p;
            grad += t.coeff * dp;
        }
        grad /= radius_;
        if (value > kPhiMax) return {kPhiMax, Vec::Zero()};
        if (value < kPhiMin) return {kPhiMin, Vec::Zero()};
        return {value, grad};
    }
    double conformal_factor(const Vec& x) const { return std::exp(2.0 * phi(x).first); }

    Vec project(const Vec& x) const { return radius_ * x.normalized(); }
    double constraint_residual(const Vec& x) const { return std::abs(x.norm() - radius_); }
    Vec project_tangent(const Vec& x, const Vec& v) const {
        const Vec n = x.normalized();
        return v - v.dot(n) * n;
    }
    double inner(const Vec& x, const Vec& u, const Vec& v) const { return conformal_factor(x) * u.dot(v); }

    Vec acceleration(const Vec& x, const Vec& v) const {
        const auto [ph, gamb] = phi(x);
        const Vec n = x.normalized();
        const Vec grad = gamb - gamb.dot(n) * n;
        const double dphi_v = gamb.dot(v);
        const Vec tangential = -2.0 * dphi_v * v + v.squaredNorm() * grad;
        return tangential - (v.squaredNorm() / (radius_ * radius_)) * x;
    }
    Vec transport_rate(const Vec& x, const Vec& xd, const Vec& w) const {
        const auto [ph, gamb] = phi(x);
        const Vec n = x.normalized();
        const Vec grad = gamb - gamb.dot(n) * n;
        const Vec tangential = -gamb.dot(xd) * w - gamb.dot(w) * xd + xd.dot(w) * grad;
        return tangential - (w.dot(xd) / (radius_ * radius_)) * x;
    }
    Vec displacement(const Vec& p, const Vec& q) const { return q - p; }
    std::array<Vec, 2> tangent_frame(const Vec& x) const {
        const Vec n = x.normalized();
        const double s = std::exp(-phi(x).first);
        const Vec e1 = detail::any_orthogonal(n);
        return {s * e1, s * n.cross(e1)};
    }
    Eigen::Matrix3d metric_matrix(const Vec& x) const {
        const Vec n = x.normalized();
        return conformal_factor(x) * (Eigen::Matrix3d::Identity() - n * n.transpose());
    }
    Vec level_point(double s, double angle) const {
        const double rho = radius_ * std::sqrt(std::max(0.0, 1.0 - s * s));
        return {rho * std::cos(angle), rho * std::sin(angle), radius_ * s};
    }

    /// Real spherical harmonic (unnormalized Cartesian form) and its gradient.
    static std::pair<double, Vec> basis(int l, int m, const Vec& u) {
        const double x = u.x(), y = u.y(), z = u.z();
        switch (l * 10 + (m + 5)) {
            case 5: return {1.0, Vec::Zero()};
            case 14: return {y, Vec(0, 1, 0)};
            case 15: return {z, Vec(0, 0, 1)};
            case 16: return {x, Vec(1, 0, 0)};
            case 23: return {x * y, Vec(y, x, 0)};
            case 24: return {y * z, Vec(0, z, y)};
            case 25: return {3 * z * z - 1, Vec(0, 0, 6 * z)};
            case 26: return {x * z, Vec(z, 0, x)};
            case 27: return {x * x - y * y, Vec(2 * x, -2 * y, 0)};
            default: throw ValidationError("ConformalSphere: harmonic (l,m) outside l <= 2");
        }
    }

private:
    void validate() const {
        if (!(radius_ > 0)) throw ValidationError("ConformalSphere: radius must be positive");
        for (const auto& t : terms_) {
            if (t.l < 0 || t.l > 2 || std::abs(t.m) > t.l)
                throw ValidationError("ConformalSphere: harmonic (l,m) outside l <= 2, |m| <= l");
        }
    }
    double bound(int sign, bool laplacian_weighted = false) const {
        double b = 0.0;
        for (const auto& t : terms_) {
            const double w = laplacian_weighted ? t.l * (t.l + 1.0) : 1.0;
            double lo = -1.0, hi = 1.0;
            if (t.l == 0) lo = hi = 1.0;
            if (t.l == 2 && t.m != 0 && t.m != 2) lo = -0.5, hi = 0.5;
            if (t.l == 2 && t.m == 0) lo = -1.0, hi = 2.0;
            const double a = w * t.coeff * lo, c = w * t.coeff * hi;
            b += sign > 0 ? std::max(a, c) : std::min(a, c);
        }
        return b;
    }

    double radius_;
    std::vector<HarmonicTerm> terms_;
    double inj_ = 0.0;
    double diam_ = 0.0;
};

// ---------------------------------------------------------------------------
// Flat torus R^2 / L for a lattice L with basis columns b1, b2.

class FlatTorus {
public:
    using Vec = Eigen::Vector2d;
    static constexpr int kAmbientDim = 2;

    explicit FlatTorus(const Eigen::Matrix2d& basis = Eigen::Matrix2d::Identity()) : basis_(basis) {
        if (std::abs(basis.determinant()) < 1e-12) throw ValidationError("FlatTorus: degenerate lattice basis");
        reduce_basis();
        inj_ = 0.5 * reduced_.col(0).norm();
        diam_ = covering_radius();
    }
    FlatTorus(const Eigen::Matrix2d& basis, double inj, double diam) : FlatTorus(basis) {
        if (!(inj > 0) || !(diam > 0)) throw ValidationError("FlatTorus: inj and diam must be positive");
        inj_ = inj;
        diam_ = diam;
    }

    std::string_view kind_name() const { return "FlatTorus"; }
    const Eigen::Matrix2d& basis() const { return basis_; }
    /// Lagrange-reduced basis: |b1| <= |b2|, 0 <= b1.b2 <= |b1|^2 / 2.
    const Eigen::Matrix2d& reduced_basis() const { return reduced_; }
    double inj() const { return inj_; }
    double diam() const { return diam_; }

    Vec project(const Vec& x) const {
        Vec c = basis_inv_ * x;
        c.x() -= std::floor(c.x());
        c.y() -= std::floor(c.y());
        if (c.x() >= 1.0) c.x() = 0.0;
        if (c.y() >= 1.0) c.y() = 0.0;
        return basis_ * c;
    }
    double constraint_residual(const Vec&) const { return 0.0; }
    Vec project_tangent(const Vec&, const Vec& v) const { return v; }
    double inner(const Vec&, const Vec& u, const Vec& v) const { return u.dot(v); }
    Vec acceleration(const Vec&, const Vec&) const { return Vec::Zero(); }
    Vec transport_rate(const Vec&, const Vec&, const Vec&) const { return Vec::Zero(); }
    /// Shortest lattice translate of q - p.
    Vec displacement(const Vec& p, const Vec& q) const {
        Vec c = reduced_inv_ * (q - p);
        c.x() -= std::round(c.x());
        c.y() -= std::round(c.y());
        const Vec d0 = reduced_ * c;
        Vec best = d0;
        for (int i = -1; i <= 1; ++i) {
            for (int j = -1; j <= 1; ++j) {
                const Vec d = d0 + i * reduced_.col(0) + j * reduced_.col(1);
                if (d.squaredNorm() < best.squaredNorm()) best = d;
            }
        }
        return best;
    }
    std::array<Vec, 2> tangent_frame(const Vec&) const { return {Vec(1, 0), Vec(0, 1)}; }
    Eigen::Matrix2d metric_matrix(const Vec&) const { return Eigen::Matrix2d::Identity(); }

    std::pair<Vec, Vec> exact_shoot(const Vec& x, const Vec& v, double t) const { return {project(x + t * v), v}; }
    Vec exact_connect(const Vec& p, const Vec& q) const { return displacement(p, q); }
    Vec exact_transport(const Vec&, const Vec&, double, const Vec& w) const { return w; }
    double exact_distance(const Vec& p, const Vec& q) const { return displacement(p, q).norm(); }

    /// (base point, closed displacement) for the two reduced generators.
    std::vector<std::pair<Vec, Vec>> loop_generators() const {
        return {{Vec::Zero(), reduced_.col(0)}, {Vec::Zero(), reduced_.col(1)}};
    }

private:
    void reduce_basis() {
        Vec b1 = basis_.col(0), b2 = basis_.col(1);
        for (int it = 0; it < 64; ++it) {
            if (b2.squaredNorm() < b1.squaredNorm()) std::swap(b1, b2);
            const double mu = std::round(b1.dot(b2) / b1.squaredNorm());
            if (mu == 0.0) break;
            b2 -= mu * b1;
        }
        if (b2.squaredNorm() < b1.squaredNorm()) std::swap(b1, b2);
        if (b1.dot(b2) < 0) b2 = -b2;
        reduced_.col(0) = b1;
        reduced_.col(1) = b2;
        basis_inv_ = basis_.inverse();
        reduced_inv_ = reduced_.inverse();
    }
    /// Circumradius of the non-obtuse Delaunay triangle (0, b1, b2).
    double covering_radius() const {
        const Vec b1 = reduced_.col(0), b2 = reduced_.col(1);
        const double a = b1.norm(), b = b2.norm(), c = (b2 - b1).norm();
        const double area = 0.5 * std::abs(b1.x() * b2.y() - b1.y() * b2.x());
        return a * b * c / (4.0 * area);
    }

    Eigen::Matrix2d basis_;
    Eigen::Matrix2d reduced_;
    Eigen::Matrix2d basis_inv_;
    Eigen::Matrix2d reduced_inv_;
    double inj_ = 0.0;
    double diam_ = 0.0;
};

// ---------------------------------------------------------------------------
// Torus of revolution with major radius R and minor radius r, chart (u, w) in
// [0, 2pi)^2: u around the symmetry axis, w around the tube (w = 0 outer equator).
// Metric diag((R + r cos w)^2, r^2).

class TorusOfRevolution {
public:
    using Vec = Eigen::Vector2d;
    static constexpr int kAmbientDim = 2;

    TorusOfRevolution(double major, double minor)
        : TorusOfRevolution(major, minor, kPi * minor, kPi * (major + minor)) {}
    TorusOfRevolution(double major, double minor, double inj, double diam)
        : major_(major), minor_(minor), inj_(inj), diam_(diam) {
        if (!(minor > 0) || !(major > minor)) throw ValidationError("TorusOfRevolution: need R > r > 0");
        if (!(inj > 0) || !(diam > 0)) throw ValidationError("TorusOfRevolution: inj and diam must be positive");
    }

    std::string_view kind_name() const { return "TorusOfRevolution"; }
    double major_radius() const { return major_; }
    double minor_radius() const { return minor_; }
    double inj() const { return inj_; }
    double diam() const { return diam_; }

    Vec project(const Vec& x) const { return {detail::wrap_angle(x.x()), detail::wrap_angle(x.y())}; }
    double constraint_residual(const Vec&) const { return 0.0; }
    Vec project_tangent(const Vec&, const Vec& v) const { return v; }
    double rho(const Vec& x) const { return major_ + minor_ * std::cos(x.y()); }
    double inner(const Vec& x, const Vec& a, const Vec& b) const {
        const double p = rho(x);
        return p * p * a.x() * b.x() + minor_ * minor_ * a.y() * b.y();
    }
    Vec acceleration(const Vec& x, const Vec& v) const {
        const double p = rho(x);
        const double s = std::sin(x.y());
        return {2.0 * minor_ * s / p * v.x() * v.y(), -p * s / minor_ * v.x() * v.x()};
    }
    Vec transport_rate(const Vec& x, const Vec& xd, const Vec& w) const {
        const double p = rho(x);
        const double s = std::sin(x.y());
        const double g_u_uw = -minor_ * s / p;
        const double g_w_uu = p * s / minor_;
        return {-g_u_uw * (xd.x() * w.y() + xd.y() * w.x()), -g_w_uu * xd.x() * w.x()};
    }
    Vec displacement(const Vec& p, const Vec& q) const {
        return {detail::wrap_symmetric(q.x() - p.x()), detail::wrap_symmetric(q.y() - p.y())};
    }
    std::array<Vec, 2> tangent_frame(const Vec& x) const { return {Vec(1.0 / rho(x), 0), Vec(0, 1.0 / minor_)}; }
    Eigen::Matrix2d metric_matrix(const Vec& x) const {
        const double p = rho(x);
        return Eigen::DiagonalMatrix<double, 2>(p * p, minor_ * minor_);
    }
    /// Embedding into R^3, used for plotting.
    Eigen::Vector3d embed(const Vec& x) const {
        const double p = rho(x);
        return {p * std::cos(x.x()), p * std::sin(x.x()), minor_ * std::sin(x.y())};
    }

    /// Parallel (u-loop through the top circle w = pi/2) and meridian (w-loop at u = 0).
    std::vector<std::pair<Vec, Vec>> loop_generators() const {
        return {{Vec(0.0, 0.5 * kPi), Vec(2.0 * kPi, 0.0)}, {Vec(0.0, 0.0), Vec(0.0, 2.0 * kPi)}};
    }

private:
    double major_;
    double minor_;
    double inj_;
    double diam_;
};

// ---------------------------------------------------------------------------

/// Metric tensor at p in the manifold's native coordinates (restricted ambient
/// form for embedded surfaces, chart form for tori).
template <RiemannianSurface M>
auto metric_at(const M& m, const typename M::Vec& p) {
    if (m.constraint_residual(p) > 1e-9 * m.diam())
        throw DomainError(std::string(m.kind_name()) + ": point is off the manifold");
    return m.metric_matrix(p);
}

/// Gram matrix g(e_i, e_j) of an explicit tangent frame at p.
template <RiemannianSurface M>
Eigen::Matrix2d metric_in_frame(const M& m, const typename M::Vec& p, const typename M::Vec& e1,
                                const typename M::Vec& e2) {
    if (m.constraint_residual(p) > 1e-9 * m.diam())
        throw DomainError(std::string(m.kind_name()) + ": point is off the manifold");
    Eigen::Matrix2d g;
    g(0, 0) = m.inner(p, e1, e1);
    g(0, 1) = g(1, 0) = m.inner(p, e1, e2);
    g(1, 1) = m.inner(p, e2, e2);
    return g;
}

}  // namespace geonet
