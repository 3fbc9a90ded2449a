#pragma once

// Hand-built configurations shared by the unit tests and the acceptance binary.

#include <cmath>
#include <vector>

#include "geonet/cycle.hpp"
#include "geonet/geodesic.hpp"
#include "geonet/manifold.hpp"

namespace geonet::fixtures {

/// Unit-speed geodesic on a torus of revolution leaving p = (0, 0) (outer
/// equator) at angle alpha above the parallel.
inline TangentVector<TorusOfRevolution> equator_start(const TorusOfRevolution& t, double alpha) {
    const double rho0 = t.major_radius() + t.minor_radius();
    return {Eigen::Vector2d(0, 0), Eigen::Vector2d(std::cos(alpha) / rho0, std::sin(alpha) / t.minor_radius())};
}

/// Arclength at which that geodesic reaches the meridian u = pi (u increases monotonically).
inline double time_to_half_turn(const TorusOfRevolution& t, double alpha) {
    const auto v0 = equator_start(t, alpha);
    auto u_at = [&](double s) {
        const auto [x, v] = geodesic_shoot(t, v0, s);
        return x(0);
    };
    double lo = 0.0, hi = 0.5;
    while (u_at(hi) < kPi) {
        lo = hi;
        hi *= 1.5;
    }
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (u_at(mid) < kPi ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Tube-direction velocity where the geodesic meets u = pi.
inline double w_speed_at_half_turn(const TorusOfRevolution& t, double alpha) {
    const auto [x, v] = geodesic_shoot(t, equator_start(t, alpha), time_to_half_turn(t, alpha));
    return v.v(1);
}

/// Smallest alpha whose geodesic turns (w' = 0) on the meridian u = pi. By the
/// reflection u -> 2 pi - u such a geodesic closes up into a loop at p whose two
/// ends make equal angles with the tube direction.
inline double symmetric_loop_angle(const TorusOfRevolution& t) {
    double lo = 0.05;
    const double f_lo = w_speed_at_half_turn(t, lo);
    double hi = lo;
    for (double a = lo + 0.02; a < 0.5 * kPi; a += 0.02) {
        if ((w_speed_at_half_turn(t, a) > 0) != (f_lo > 0)) {
            hi = a;
            break;
        }
        lo = a;
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((w_speed_at_half_turn(t, mid) > 0) == (f_lo > 0) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Figure-eight on a torus of revolution: the symmetric geodesic loop at angle
/// alpha and its mirror image under w -> -w, both based at p = (0, 0), each
/// sampled at N equally spaced arclength points. A nonzero tilt rotates the
/// first segment of the second loop about p by that angle, breaking the
/// equal-angle condition by exactly tilt.
inline PolygonalCycle<TorusOfRevolution> torus_figure_eight(const TorusOfRevolution& t, double alpha, int N,
                                                            double tilt = 0.0) {
    const double T = 2.0 * time_to_half_turn(t, alpha);
    std::vector<std::vector<Eigen::Vector2d>> chains(2);
    const double angles[2] = {alpha, -alpha};
    for (int c = 0; c < 2; ++c) {
        const auto v0 = equator_start(t, angles[c]);
        chains[c].push_back(v0.base);
        for (int j = 1; j < N; ++j) chains[c].push_back(geodesic_shoot(t, v0, T * j / N).first);
        chains[c].push_back(v0.base);
    }
    if (tilt != 0.0) chains[1][1] = geodesic_shoot(t, equator_start(t, -alpha - tilt), T / N).first;
    CycleType partition;
    partition.endpoint_block = {0, 0, 0, 0};
    partition.num_blocks = 1;
    return build_cycle(t, chains, partition);
}

/// N vertices equally spaced on the great circle in the plane spanned by e1, e2.
inline std::vector<Eigen::Vector3d> great_circle_points(int N, const Eigen::Vector3d& e1 = Eigen::Vector3d::UnitX(),
                                                        const Eigen::Vector3d& e2 = Eigen::Vector3d::UnitY(),
                                                        double radius = 1.0) {
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < N; ++i) {
        const double a = 2.0 * kPi * i / N;
        pts.push_back(radius * (std::cos(a) * e1 + std::sin(a) * e2));
    }
    return pts;
}

}  // namespace geonet::fixtures
