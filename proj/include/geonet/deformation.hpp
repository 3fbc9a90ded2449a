#pragma once

// Steepest-descent deformation vector of a piecewise-geodesic cycle.
//
// Multiple point (block) component: sum over the block's chain endpoints of the
// outward unit tangent of the first non-constant segment of that chain end.
// Double point component: sum of the two outward unit tangents at the junction;
// junctions joined by constant segments form a cluster sharing one component.
// A cluster joined through constant segments to a chain endpoint is negligible:
// it takes the block's component and contributes nothing to the norm.

#include <cstddef>
#include <vector>

#include "geonet/cycle.hpp"
#include "geonet/geodesic.hpp"

namespace geonet {

template <RiemannianSurface M>
struct DoublePointCluster {
    using Vec = typename M::Vec;
    std::size_t chain = 0;
    std::vector<std::size_t> vertex_ids;  // double points in the cluster
    Vec component = Vec::Zero();
    bool negligible = false;
    int attached_block = -1;  // block a negligible cluster is glued to
};

template <RiemannianSurface M>
struct DeformationVector {
    using Vec = typename M::Vec;
    std::vector<Vec> block_components;
    std::vector<DoublePointCluster<M>> clusters;
    double norm_sq = 0.0;

    /// One tangent vector per vertex of the cycle.
    std::vector<Vec> per_vertex(std::size_t num_vertices) const {
        std::vector<Vec> f(num_vertices, Vec::Zero());
        for (std::size_t b = 0; b < block_components.size(); ++b) f[b] = block_components[b];
        for (const auto& c : clusters)
            for (auto id : c.vertex_ids) f[id] = c.component;
        return f;
    }
};

namespace detail {

template <RiemannianSurface M>
typename M::Vec outward_at_start(const M& m, const GeodesicSegment<M>& s) {
    return s.initial_velocity / norm(m, s.start, s.initial_velocity);
}

template <RiemannianSurface M>
typename M::Vec outward_at_end(const M& m, const GeodesicSegment<M>& s) {
    return -s.end_velocity / norm(m, s.end, s.end_velocity);
}

}  // namespace detail

template <RiemannianSurface M>
DeformationVector<M> deformation_vector(const M& m, const PolygonalCycle<M>& c) {
    using Vec = typename M::Vec;
    DeformationVector<M> dv;
    dv.block_components.assign(c.num_blocks(), Vec::Zero());
    const auto& mask = c.type.constant_mask;

    for (std::size_t i = 0; i < c.k(); ++i) {
        const auto& ch = c.chains[i];
        const std::size_t n = ch.size();
        const int b_start = c.type.endpoint_block[2 * i];
        const int b_end = c.type.endpoint_block[2 * i + 1];
        std::size_t first = n, last = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (!mask[i][j]) {
                if (first == n) first = j;
                last = j;
            }
        }
        if (first == n) {
            // Entirely constant chain: every junction is glued to the start block.
            if (n > 1) {
                DoublePointCluster<M> cl;
                cl.chain = i;
                cl.negligible = true;
                cl.attached_block = b_start;
                for (std::size_t j = 1; j < n; ++j) cl.vertex_ids.push_back(ch.vertex_ids[j]);
                dv.clusters.push_back(std::move(cl));
            }
            continue;
        }
        dv.block_components[b_start] += detail::outward_at_start(m, ch.segments[first]);
        dv.block_components[b_end] += detail::outward_at_end(m, ch.segments[last]);

        // Junction j sits between segments j-1 and j (1 <= j <= n-1).
        if (first > 0) {
            DoublePointCluster<M> cl;
            cl.chain = i;
            cl.negligible = true;
            cl.attached_block = b_start;
            for (std::size_t j = 1; j <= first; ++j) cl.vertex_ids.push_back(ch.vertex_ids[j]);
            dv.clusters.push_back(std::move(cl));
        }
        if (last + 1 < n) {
            DoublePointCluster<M> cl;
            cl.chain = i;
            cl.negligible = true;
            cl.attached_block = b_end;
            for (std::size_t j = last + 1; j < n; ++j) cl.vertex_ids.push_back(ch.vertex_ids[j]);
            dv.clusters.push_back(std::move(cl));
        }
        std::size_t j = first + 1;
        while (j <= last) {
            // Cluster starts at junction j (segment j-1 non-constant) and extends
            // across constant segments j, j+1, ...
            DoublePointCluster<M> cl;
            cl.chain = i;
            cl.vertex_ids.push_back(ch.vertex_ids[j]);
            std::size_t jj = j;
            while (mask[i][jj]) {
                ++jj;
                cl.vertex_ids.push_back(ch.vertex_ids[jj]);
            }
            cl.component = detail::outward_at_end(m, ch.segments[j - 1]) + detail::outward_at_start(m, ch.segments[jj]);
            dv.norm_sq += m.inner(ch.segments[jj].start, cl.component, cl.component);
            dv.clusters.push_back(std::move(cl));
            j = jj + 1;
        }
    }
    for (std::size_t b = 0; b < dv.block_components.size(); ++b)
        dv.norm_sq += m.inner(c.vertices[b], dv.block_components[b], dv.block_components[b]);
    for (auto& cl : dv.clusters)
        if (cl.negligible) cl.component = dv.block_components[cl.attached_block];
    return dv;
}

/// Analytic first variation of cycle_length when every vertex moves along the
/// given field (one vector per vertex): -sum over non-constant segment ends of
/// <field, outward unit tangent>.
template <RiemannianSurface M>
double first_variation(const M& m, const PolygonalCycle<M>& c, const std::vector<typename M::Vec>& field) {
    if (field.size() != c.vertices.size())
        throw PreconditionError("first_variation: need one tangent vector per vertex");
    double d = 0.0;
    for (std::size_t i = 0; i < c.k(); ++i) {
        const auto& ch = c.chains[i];
        for (std::size_t j = 0; j < ch.size(); ++j) {
            if (c.type.constant_mask[i][j]) continue;
            const auto& s = ch.segments[j];
            d -= m.inner(s.start, field[ch.vertex_ids[j]], detail::outward_at_start(m, s));
            d -= m.inner(s.end, field[ch.vertex_ids[j + 1]], detail::outward_at_end(m, s));
        }
    }
    return d;
}

template <RiemannianSurface M>
double first_variation(const M& m, const PolygonalCycle<M>& c, const DeformationVector<M>& v) {
    return first_variation(m, c, v.per_vertex(c.vertices.size()));
}

/// Cycle with every vertex moved to exp(h * field) and segments reconnected.
template <RiemannianSurface M>
PolygonalCycle<M> displaced(const M& m, const PolygonalCycle<M>& c, const std::vector<typename M::Vec>& field,
                            double h) {
    PolygonalCycle<M> out = c;
    for (std::size_t v = 0; v < out.vertices.size(); ++v) out.vertices[v] = exp_map(m, c.vertices[v], h * field[v]);
    reconnect_segments(m, out);
    return out;
}

/// Central finite difference of cycle_length along the field.
template <RiemannianSurface M>
double length_derivative_fd(const M& m, const PolygonalCycle<M>& c, const std::vector<typename M::Vec>& field,
                            double h) {
    return (cycle_length(displaced(m, c, field, h)) - cycle_length(displaced(m, c, field, -h))) / (2.0 * h);
}

}  // namespace geonet
