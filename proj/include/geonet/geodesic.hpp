#pragma once

// Exponential map, geodesic boundary-value solving, parallel transport, distance.
//
// Numeric path: fixed-step classical RK4 on (x, x') with ceil(128 * L / inj)
// steps (at least 16). After every step the position is projected back onto the
// surface and the velocity onto the tangent plane, rescaled to the initial
// speed; geodesic speed is an invariant of the flow so this only removes drift.
// Builtins with closed forms (round sphere, flat torus) bypass the integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geonet/errors.hpp"
#include "geonet/manifold.hpp"

namespace geonet {

struct IntegratorSettings {
    int steps_per_inj = 128;
    int min_steps = 16;
    int samples_exact = 16;  // polyline resolution for closed-form segments
};

template <RiemannianSurface M>
struct TangentVector {
    typename M::Vec base;
    typename M::Vec v;
};

/// Geodesic arc gamma: [0,1] -> M with constant speed |initial_velocity|_g = length.
template <RiemannianSurface M>
struct GeodesicSegment {
    using Vec = typename M::Vec;
    Vec start = Vec::Zero();
    Vec end = Vec::Zero();
    Vec initial_velocity = Vec::Zero();
    Vec end_velocity = Vec::Zero();
    double length = 0.0;
    /// Dense polyline from start to end; unwrapped (continuous) chart coordinates for tori.
    std::vector<Vec> samples;

    bool is_constant() const { return length == 0.0; }
};

namespace detail {

template <RiemannianSurface M>
struct RawShot {
    typename M::Vec x;  // unwrapped for charts, projected for embedded surfaces
    typename M::Vec v;
    typename M::Vec w;  // transported vector (if requested)
};

template <RiemannianSurface M>
int step_count(const M& m, double arc_length, const IntegratorSettings& s) {
    const double n = std::ceil(s.steps_per_inj * arc_length / m.inj());
    return std::max(s.min_steps, static_cast<int>(std::min(n, 1e7)));
}

template <RiemannianSurface M>
void stabilize(const M& m, typename M::Vec& x, typename M::Vec& v, double speed) {
    if constexpr (M::kAmbientDim == 3) x = m.project(x);
    v = m.project_tangent(x, v);
    const double s = norm(m, x, v);
    if (s > 0 && speed > 0) v *= speed / s;
}

/// RK4 integration of the geodesic (and optionally a parallel field) over time t.
template <RiemannianSurface M>
RawShot<M> rk4_integrate(const M& m, const typename M::Vec& x0, const typename M::Vec& v0, double t,
                         const typename M::Vec* w0, std::vector<typename M::Vec>* samples,
                         const IntegratorSettings& settings) {
    using Vec = typename M::Vec;
    const double speed = norm(m, x0, v0);
    Vec x = x0, v = v0;
    Vec w = w0 ? *w0 : Vec::Zero();
    if (samples) {
        samples->clear();
        samples->push_back(x0);
    }
    if (t == 0.0 || speed == 0.0) {
        if (samples) samples->push_back(x0);
        return {x, v, w};
    }
    const int n = step_count(m, speed * std::abs(t), settings);
    const double h = t / n;
    if (samples) samples->reserve(n + 1);
    for (int i = 0; i < n; ++i) {
        const Vec k1x = v;
        const Vec k1v = m.acceleration(x, v);
        const Vec x2 = x + 0.5 * h * k1x, v2 = v + 0.5 * h * k1v;
        const Vec k2x = v2;
        const Vec k2v = m.acceleration(x2, v2);
        const Vec x3 = x + 0.5 * h * k2x, v3 = v + 0.5 * h * k2v;
        const Vec k3x = v3;
        const Vec k3v = m.acceleration(x3, v3);
        const Vec x4 = x + h * k3x, v4 = v + h * k3v;
        const Vec k4x = v4;
        const Vec k4v = m.acceleration(x4, v4);
        if (w0) {
            const Vec k1w = m.transport_rate(x, k1x, w);
            const Vec k2w = m.transport_rate(x2, k2x, w + 0.5 * h * k1w);
            const Vec k3w = m.transport_rate(x3, k3x, w + 0.5 * h * k2w);
            const Vec k4w = m.transport_rate(x4, k4x, w + h * k3w);
            w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        }
        x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        stabilize(m, x, v, speed);
        if (w0) w = m.project_tangent(x, w);
        if (!x.allFinite() || !v.allFinite()) throw NumericError("geodesic integrator produced non-finite state");
        if (samples) samples->push_back(x);
    }
    return {x, v, w};
}

}  // namespace detail

/// Numeric exponential map (always RK4, even where a closed form exists).
template <RiemannianSurface M>
std::pair<typename M::Vec, typename M::Vec> rk4_shoot(const M& m, const typename M::Vec& x,
                                                      const typename M::Vec& v, double t,
                                                      const IntegratorSettings& s = {}) {
    auto r = detail::rk4_integrate(m, x, v, t, static_cast<const typename M::Vec*>(nullptr), nullptr, s);
    return {m.project(r.x), r.v};
}

/// Exponential map: follows the geodesic from v.base with initial velocity v for time t.
template <RiemannianSurface M>
std::pair<typename M::Vec, TangentVector<M>> geodesic_shoot(const M& m, const TangentVector<M>& v, double t,
                                                            const IntegratorSettings& s = {}) {
    if (t < 0) throw PreconditionError("geodesic_shoot: t must be nonnegative");
    if (t == 0.0) return {v.base, v};
    if constexpr (HasExactGeodesics<M>) {
        auto [x, w] = m.exact_shoot(v.base, v.v, t);
        return {x, TangentVector<M>{x, w}};
    } else {
        auto [x, w] = rk4_shoot(m, v.base, v.v, t, s);
        return {x, TangentVector<M>{x, w}};
    }
}

/// Point-only exponential map at time 1 (used for vertex motion).
template <RiemannianSurface M>
typename M::Vec exp_map(const M& m, const typename M::Vec& x, const typename M::Vec& v) {
    if (v.squaredNorm() == 0.0) return x;
    if constexpr (HasExactGeodesics<M>) {
        return m.exact_shoot(x, v, 1.0).first;
    } else {
        return rk4_shoot(m, x, v, 1.0).first;
    }
}

/// Builds the segment with initial velocity v0 from p, ending at the given vertex q.
template <RiemannianSurface M>
GeodesicSegment<M> make_segment(const M& m, const typename M::Vec& p, const typename M::Vec& q,
                                const typename M::Vec& v0, const IntegratorSettings& s = {}) {
    GeodesicSegment<M> seg;
    seg.start = p;
    seg.end = q;
    seg.initial_velocity = v0;
    seg.length = norm(m, p, v0);
    if (seg.length == 0.0) {
        seg.initial_velocity.setZero();
        seg.end_velocity.setZero();
        seg.samples = {p, p};
        return seg;
    }
    if constexpr (HasExactGeodesics<M>) {
        const int n = s.samples_exact;
        seg.samples.reserve(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double t = static_cast<double>(i) / n;
            if constexpr (M::kAmbientDim == 2) {
                seg.samples.push_back(p + t * v0);
            } else {
                seg.samples.push_back(m.exact_shoot(p, v0, t).first);
            }
        }
        seg.end_velocity = m.exact_shoot(p, v0, 1.0).second;
    } else {
        auto r = detail::rk4_integrate(m, p, v0, 1.0, static_cast<const typename M::Vec*>(nullptr), &seg.samples, s);
        seg.end_velocity = m.project_tangent(q, r.v);
    }
    return seg;
}

struct ShootingOptions {
    int max_iterations = 40;
    int multistart_directions = 8;
    double miss_tolerance_rel = 1e-10;  // relative to diam
    bool enforce_inj_half = true;
    bool global_minimum = false;        // run every start and keep the shortest converged arc
};

namespace detail {

template <RiemannianSurface M>
std::optional<typename M::Vec> newton_shoot(const M& m, const typename M::Vec& p, const typename M::Vec& target,
                                            const std::array<typename M::Vec, 2>& frame, Eigen::Vector2d c,
                                            const ShootingOptions& opt, const IntegratorSettings& s) {
    using Vec = typename M::Vec;
    const double tol = opt.miss_tolerance_rel * m.diam();
    auto endpoint = [&](const Eigen::Vector2d& cc) {
        const Vec v = cc.x() * frame[0] + cc.y() * frame[1];
        return detail::rk4_integrate(m, p, v, 1.0, static_cast<const Vec*>(nullptr), nullptr, s).x;
    };
    auto miss_of = [&](const Vec& x) -> Vec {
        if constexpr (M::kAmbientDim == 3) {
            return x - target;
        } else {
            return m.displacement(target, m.project(x));
        }
    };
    Vec r = miss_of(endpoint(c));
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (!r.allFinite()) return std::nullopt;
        if (r.norm() <= tol) return Vec(c.x() * frame[0] + c.y() * frame[1]);
        Eigen::Matrix<double, M::kAmbientDim, 2> jac;
        for (int j = 0; j < 2; ++j) {
            Eigen::Vector2d cj = c;
            const double h = 1e-7 * std::max(1.0, c.norm());
            cj(j) += h;
            jac.col(j) = (miss_of(endpoint(cj)) - r) / h;
        }
        const Eigen::Matrix2d jtj = jac.transpose() * jac;
        if (std::abs(jtj.determinant()) < 1e-300) return std::nullopt;
        Eigen::Vector2d delta = jtj.ldlt().solve(-jac.transpose() * r);
        bool improved = false;
        for (int k = 0; k < 12; ++k) {
            const Eigen::Vector2d cn = c + delta;
            const Vec rn = miss_of(endpoint(cn));
            if (rn.allFinite() && rn.norm() < r.norm()) {
                c = cn;
                r = rn;
                improved = true;
                break;
            }
            delta *= 0.5;
        }
        if (!improved) return r.norm() <= tol ? std::optional<Vec>(c.x() * frame[0] + c.y() * frame[1]) : std::nullopt;
    }
    if (r.norm() <= tol) return Vec(c.x() * frame[0] + c.y() * frame[1]);
    return std::nullopt;
}

}  // namespace detail

/// Shooting BVP solver: Gauss-Newton on the initial velocity with a finite
/// difference Jacobian, multi-start over rotated initial guesses on failure.
/// Returns the initial velocity of the arc from p to q.
template <RiemannianSurface M>
typename M::Vec shooting_velocity(const M& m, const typename M::Vec& p, const typename M::Vec& q,
                                  const ShootingOptions& opt = {}, const IntegratorSettings& s = {}) {
    using Vec = typename M::Vec;
    const Vec d = m.displacement(p, q);
    if (d.norm() == 0.0) return Vec::Zero();
    const Vec target = p + d;
    const auto frame = m.tangent_frame(p);
    // Initial guess: tangential part of the chord, expressed in the frame.
    const Vec dt = m.project_tangent(p, d);
    Eigen::Vector2d c0(m.inner(p, dt, frame[0]), m.inner(p, dt, frame[1]));
    if (c0.norm() == 0.0) c0 = Eigen::Vector2d(norm(m, p, d), 0.0);
    const double g_len = std::max(norm(m, p, dt), 1e-300);
    c0 *= norm(m, p, d) / g_len;

    std::optional<Vec> best;
    double best_len = std::numeric_limits<double>::infinity();
    const int starts = 1 + std::max(0, opt.multistart_directions);
    for (int k = 0; k < starts; ++k) {
        Eigen::Vector2d c = c0;
        if (k > 0) {
            const double a = 2.0 * kPi * (k - 1) / opt.multistart_directions;
            c = Eigen::Rotation2Dd(a) * c0;
            if (k % 2 == 0) c *= 1.25;
        }
        auto v = detail::newton_shoot(m, p, target, frame, c, opt, s);
        if (v) {
            const double len = norm(m, p, *v);
            if (len < best_len) {
                best = v;
                best_len = len;
            }
            if (!opt.global_minimum) break;
        }
    }
    if (!best) throw NumericError(std::string(m.kind_name()) + ": shooting did not converge after multi-start");
    return *best;
}

/// Minimizing geodesic from p to q. Requires d(p,q) <= inj/2 unless disabled in opt.
template <RiemannianSurface M>
GeodesicSegment<M> geodesic_connect(const M& m, const typename M::Vec& p, const typename M::Vec& q,
                                    const ShootingOptions& opt = {}, const IntegratorSettings& s = {}) {
    using Vec = typename M::Vec;
    Vec v0;
    if constexpr (HasExactGeodesics<M>) {
        v0 = m.exact_connect(p, q);
    } else {
        v0 = shooting_velocity(m, p, q, opt, s);
    }
    const double len = norm(m, p, v0);
    if (opt.enforce_inj_half && len > 0.5 * m.inj() * (1.0 + 1e-9))
        throw PreconditionError("geodesic_connect: distance " + std::to_string(len) + " exceeds inj/2 = " +
                                std::to_string(0.5 * m.inj()));
    return make_segment(m, p, q, v0, s);
}

/// Minimizing geodesic without the inj/2 precondition: multi-start shooting,
/// shortest converged arc (closed form where available).
template <RiemannianSurface M>
GeodesicSegment<M> geodesic_connect_global(const M& m, const typename M::Vec& p, const typename M::Vec& q,
                                           const IntegratorSettings& s = {}) {
    ShootingOptions opt;
    opt.enforce_inj_half = false;
    opt.global_minimum = true;
    return geodesic_connect(m, p, q, opt, s);
}

/// Transports v (based at along.start) along the segment to along.end.
template <RiemannianSurface M>
TangentVector<M> parallel_transport(const M& m, const TangentVector<M>& v, const GeodesicSegment<M>& along,
                                    const IntegratorSettings& s = {}) {
    using Vec = typename M::Vec;
    if (m.displacement(v.base, along.start).norm() > 1e-9 * m.diam())
        throw PreconditionError("parallel_transport: vector is not based at the segment start");
    if (along.length == 0.0) return {along.end, v.v};
    if constexpr (HasExactGeodesics<M>) {
        return {along.end, m.exact_transport(along.start, along.initial_velocity, 1.0, v.v)};
    } else {
        const Vec w0 = v.v;
        auto r = detail::rk4_integrate(m, along.start, along.initial_velocity, 1.0, &w0, nullptr, s);
        return {along.end, m.project_tangent(along.end, r.w)};
    }
}

/// Numeric parallel transport (RK4) regardless of closed forms.
template <RiemannianSurface M>
typename M::Vec rk4_transport(const M& m, const GeodesicSegment<M>& along, const typename M::Vec& w,
                              const IntegratorSettings& s = {}) {
    auto r = detail::rk4_integrate(m, along.start, along.initial_velocity, 1.0, &w, nullptr, s);
    return m.project_tangent(along.end, r.w);
}

/// Riemannian distance: closed form for builtins that have one, otherwise the
/// shortest converged shooting solution computed from a canonical endpoint order
/// (so the result is exactly symmetric).
template <RiemannianSurface M>
double distance(const M& m, const typename M::Vec& p, const typename M::Vec& q) {
    if constexpr (HasExactGeodesics<M>) {
        return m.exact_distance(p, q);
    } else {
        if (m.displacement(p, q).norm() == 0.0) return 0.0;
        const bool swap = std::lexicographical_compare(q.data(), q.data() + q.size(), p.data(), p.data() + p.size());
        const auto& a = swap ? q : p;
        const auto& b = swap ? p : q;
        ShootingOptions opt;
        opt.enforce_inj_half = false;
        opt.global_minimum = true;
        return norm(m, a, shooting_velocity(m, a, b, opt));
    }
}

/// Cheap proxy distance (ambient chord or nearest-image chart distance).
template <RiemannianSurface M>
double chord_distance(const M& m, const typename M::Vec& p, const typename M::Vec& q) {
    return m.displacement(p, q).norm();
}

}  // namespace geonet
