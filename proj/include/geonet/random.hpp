#pragma once

// Seeded random points, tangent vectors and cycles. All randomness in the
// library flows through a std::mt19937_64 supplied by the caller.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "geonet/cycle.hpp"
#include "geonet/geodesic.hpp"
#include "geonet/manifold.hpp"

namespace geonet {

using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) built from raw engine bits (portable across standard libraries).
inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

/// Standard normal via Box-Muller on portable uniforms.
inline double gaussian(Rng& rng) {
    double u1 = uniform(rng);
    while (u1 <= 0.0) u1 = uniform(rng);
    const double u2 = uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

template <RiemannianSurface M>
typename M::Vec random_point(const M& m, Rng& rng) {
    typename M::Vec x;
    if constexpr (M::kAmbientDim == 3) {
        do {
            x = Eigen::Vector3d(gaussian(rng), gaussian(rng), gaussian(rng));
        } while (x.norm() < 1e-6);
        return m.project(x);
    } else {
        const double a = uniform(rng), b = uniform(rng);
        if constexpr (requires { m.reduced_basis(); }) {
            x = a * m.reduced_basis().col(0) + b * m.reduced_basis().col(1);
        } else {
            x = typename M::Vec(2.0 * kPi * a, 2.0 * kPi * b);
        }
        return m.project(x);
    }
}

/// Random tangent vector at x with g-norm equal to len.
template <RiemannianSurface M>
typename M::Vec random_tangent(const M& m, const typename M::Vec& x, double len, Rng& rng) {
    const auto f = m.tangent_frame(x);
    const double a = uniform(rng, 0.0, 2.0 * kPi);
    typename M::Vec v = std::cos(a) * f[0] + std::sin(a) * f[1];
    return v * (len / norm(m, x, v));
}

/// Random piecewise-geodesic cycle: k closed chains of N segments, each a random
/// walk from its own random base point with steps of g-length at most max_step.
/// Chains close back on their base; each chain is its own block unless
/// shared_base, in which case all chains start and end at one multiple point.
template <RiemannianSurface M>
PolygonalCycle<M> random_cycle(const M& m, Rng& rng, std::size_t k, std::size_t N, double max_step,
                               bool shared_base = false) {
    using Vec = typename M::Vec;
    std::vector<std::vector<Vec>> chains;
    std::vector<Vec> bases;
    for (std::size_t i = 0; i < k; ++i) {
        Vec base = shared_base && !bases.empty() ? bases.front() : random_point(m, rng);
        // Keep bases of different chains apart so blocks stay distinct.
        for (int tries = 0; tries < 100 && !(shared_base && !bases.empty()); ++tries) {
            bool ok = true;
            for (const auto& b : bases) ok = ok && chord_distance(m, b, base) > 1e-3 * m.diam();
            if (ok) break;
            base = random_point(m, rng);
        }
        bases.push_back(base);
        std::vector<Vec> pts{base};
        const std::size_t half = N / 2;
        // Out along a random walk, then back along a different walk to close up.
        for (std::size_t j = 1; j < N; ++j) {
            const Vec& prev = pts.back();
            if (j <= half || N < 3) {
                pts.push_back(exp_map(m, prev, random_tangent(m, prev, uniform(rng, 0.2, 1.0) * max_step, rng)));
            } else {
                // Head back towards the base while jittering sideways.
                const auto seg = geodesic_connect_global(m, prev, base);
                const double remaining = static_cast<double>(N - j + 1);
                Vec v = seg.initial_velocity / remaining;
                v += random_tangent(m, prev, 0.3 * norm(m, prev, v) + 1e-3 * max_step, rng);
                pts.push_back(exp_map(m, prev, v));
            }
        }
        pts.push_back(base);
        chains.push_back(std::move(pts));
    }
    CycleType t;
    for (std::size_t i = 0; i < k; ++i) {
        t.endpoint_block.push_back(shared_base ? 0 : static_cast<int>(i));
        t.endpoint_block.push_back(shared_base ? 0 : static_cast<int>(i));
    }
    t.num_blocks = shared_base ? 1 : static_cast<int>(k);
    return build_cycle(m, chains, t);
}

}  // namespace geonet
