#pragma once

// Piecewise-geodesic parametrized 1-cycles.
//
// A cycle of order k is k chains; chain i runs through vertices
// ids[0], ..., ids[n_i] joined by n_i minimizing geodesic segments. Vertex ids
// [0, J) are the multiple points (one per partition block of the 2k chain
// endpoints); the remaining ids are double points, each owned by exactly one
// chain junction. Chains reference shared multiple-point vertices by id, so
// moving a multiple point moves every chain endpoint in its block.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "geonet/errors.hpp"
#include "geonet/geodesic.hpp"
#include "geonet/manifold.hpp"

namespace geonet {

/// Combinatorial signature: partition of chain endpoints plus constant segments.
struct CycleType {
    /// endpoint_block[2i] is the block of chain i's start, [2i+1] of its end.
    std::vector<int> endpoint_block;
    int num_blocks = 0;
    /// constant_mask[i][j]: segment j of chain i has length <= merge_tol.
    std::vector<std::vector<bool>> constant_mask;

    std::size_t k() const { return endpoint_block.size() / 2; }
    bool operator==(const CycleType&) const = default;
};

template <RiemannianSurface M>
struct Chain {
    std::vector<std::size_t> vertex_ids;
    std::vector<GeodesicSegment<M>> segments;

    std::size_t size() const { return segments.size(); }
    double length() const {
        double s = 0.0;
        for (const auto& seg : segments) s += seg.length;
        return s;
    }
};

template <RiemannianSurface M>
struct PolygonalCycle {
    using Vec = typename M::Vec;

    std::vector<Vec> vertices;
    std::vector<Chain<M>> chains;
    CycleType type;
    double merge_tol = 0.0;

    std::size_t k() const { return chains.size(); }
    std::size_t num_blocks() const { return static_cast<std::size_t>(type.num_blocks); }
    /// Largest per-chain segment count.
    std::size_t N() const {
        std::size_t n = 0;
        for (const auto& c : chains) n = std::max(n, c.size());
        return n;
    }
    bool is_multiple_point(std::size_t vertex_id) const { return vertex_id < num_blocks(); }
};

namespace detail {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

/// Canonical block labels: blocks numbered by first appearance.
inline std::vector<int> canonical_labels(const std::vector<int>& raw, int& count) {
    std::vector<int> map_to;
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const int r = raw[i];
        if (r >= static_cast<int>(map_to.size())) map_to.resize(r + 1, -1);
        if (map_to[r] < 0) map_to[r] = count++;
        out[i] = map_to[r];
    }
    return out;
}

template <RiemannianSurface M>
std::vector<std::vector<bool>> constant_mask_of(const std::vector<Chain<M>>& chains, double merge_tol) {
    std::vector<std::vector<bool>> mask;
    mask.reserve(chains.size());
    for (const auto& c : chains) {
        std::vector<bool> row(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) row[j] = c.segments[j].length <= merge_tol;
        mask.push_back(std::move(row));
    }
    return mask;
}

}  // namespace detail

/// Default merge tolerance: 1e-6 * diam.
template <RiemannianSurface M>
double default_merge_tol(const M& m) {
    return 1e-6 * m.diam();
}

/// Reconnects every segment from the current vertex table.
template <RiemannianSurface M>
void reconnect_segments(const M& m, PolygonalCycle<M>& c) {
    for (auto& chain : c.chains) {
        chain.segments.resize(chain.vertex_ids.size() - 1);
        for (std::size_t j = 0; j + 1 < chain.vertex_ids.size(); ++j) {
            chain.segments[j] = geodesic_connect(m, c.vertices[chain.vertex_ids[j]], c.vertices[chain.vertex_ids[j + 1]]);
        }
    }
}

/// Validates the partition against the geometry and the start/end balance per block.
template <RiemannianSurface M>
void validate_partition(const M& m, const std::vector<typename M::Vec>& endpoints, const CycleType& type,
                        double merge_tol) {
    const std::size_t n = endpoints.size();
    if (type.endpoint_block.size() != n) throw ValidationError("partition size does not match 2k endpoints");
    std::vector<int> starts(type.num_blocks, 0), ends(type.num_blocks, 0);
    for (std::size_t e = 0; e < n; ++e) {
        const int b = type.endpoint_block[e];
        if (b < 0 || b >= type.num_blocks) throw ValidationError("partition block index out of range");
        (e % 2 == 0 ? starts : ends)[b]++;
    }
    for (int b = 0; b < type.num_blocks; ++b) {
        if (starts[b] != ends[b])
            throw ValidationError("partition block " + std::to_string(b) + " has unequal start/end counts");
        if (starts[b] == 0) throw ValidationError("partition block " + std::to_string(b) + " is empty");
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const bool same = type.endpoint_block[a] == type.endpoint_block[b];
            const bool close = chord_distance(m, endpoints[a], endpoints[b]) <= merge_tol;
            if (same && !close) throw ValidationError("endpoints in one partition block do not coincide");
            if (!same && close) throw ValidationError("coincident endpoints lie in different partition blocks");
        }
    }
}

/// Builds a cycle from k vertex lists (each N_i + 1 points) and an endpoint partition.
/// Only endpoint_block / num_blocks of `partition` are used; the constant mask is derived.
template <RiemannianSurface M>
PolygonalCycle<M> build_cycle(const M& m, const std::vector<std::vector<typename M::Vec>>& vertex_chains,
                              const CycleType& partition, double merge_tol = -1.0) {
    using Vec = typename M::Vec;
    if (merge_tol <= 0) merge_tol = default_merge_tol(m);
    if (vertex_chains.empty()) throw ValidationError("build_cycle: need at least one chain");
    std::vector<Vec> endpoints;
    for (const auto& ch : vertex_chains) {
        if (ch.size() < 2) throw ValidationError("build_cycle: each chain needs at least two vertices");
        endpoints.push_back(m.project(ch.front()));
        endpoints.push_back(m.project(ch.back()));
    }
    validate_partition(m, endpoints, partition, merge_tol);

    PolygonalCycle<M> c;
    c.merge_tol = merge_tol;
    c.type.endpoint_block = partition.endpoint_block;
    c.type.num_blocks = partition.num_blocks;
    c.vertices.assign(partition.num_blocks, Vec::Zero());
    std::vector<bool> seen(partition.num_blocks, false);
    for (std::size_t e = 0; e < endpoints.size(); ++e) {
        const int b = partition.endpoint_block[e];
        if (!seen[b]) {
            c.vertices[b] = endpoints[e];
            seen[b] = true;
        }
    }
    for (std::size_t i = 0; i < vertex_chains.size(); ++i) {
        const auto& pts = vertex_chains[i];
        Chain<M> chain;
        chain.vertex_ids.push_back(static_cast<std::size_t>(partition.endpoint_block[2 * i]));
        for (std::size_t j = 1; j + 1 < pts.size(); ++j) {
            chain.vertex_ids.push_back(c.vertices.size());
            c.vertices.push_back(m.project(pts[j]));
        }
        chain.vertex_ids.push_back(static_cast<std::size_t>(partition.endpoint_block[2 * i + 1]));
        c.chains.push_back(std::move(chain));
    }
    reconnect_segments(m, c);
    c.type.constant_mask = detail::constant_mask_of(c.chains, merge_tol);
    return c;
}

/// Partition of the 2k endpoints into coincidence classes (within merge_tol).
template <RiemannianSurface M>
CycleType endpoint_partition(const M& m, const std::vector<typename M::Vec>& endpoints, double merge_tol) {
    detail::UnionFind uf(endpoints.size());
    for (std::size_t a = 0; a < endpoints.size(); ++a)
        for (std::size_t b = a + 1; b < endpoints.size(); ++b)
            if (chord_distance(m, endpoints[a], endpoints[b]) <= merge_tol) uf.unite(a, b);
    std::vector<int> raw(endpoints.size());
    for (std::size_t a = 0; a < endpoints.size(); ++a) raw[a] = static_cast<int>(uf.find(a));
    CycleType t;
    t.endpoint_block = detail::canonical_labels(raw, t.num_blocks);
    return t;
}

/// build_cycle with the partition read off the geometry.
template <RiemannianSurface M>
PolygonalCycle<M> build_cycle_auto(const M& m, const std::vector<std::vector<typename M::Vec>>& vertex_chains,
                                   double merge_tol = -1.0) {
    if (merge_tol <= 0) merge_tol = default_merge_tol(m);
    std::vector<typename M::Vec> endpoints;
    for (const auto& ch : vertex_chains) {
        if (ch.size() < 2) throw ValidationError("build_cycle: each chain needs at least two vertices");
        endpoints.push_back(m.project(ch.front()));
        endpoints.push_back(m.project(ch.back()));
    }
    return build_cycle(m, vertex_chains, endpoint_partition(m, endpoints, merge_tol), merge_tol);
}

/// Closed single-chain cycle through the given points (last joins back to first).
template <RiemannianSurface M>
PolygonalCycle<M> closed_polygon(const M& m, std::vector<typename M::Vec> points, double merge_tol = -1.0) {
    points.push_back(points.front());
    CycleType t;
    t.endpoint_block = {0, 0};
    t.num_blocks = 1;
    return build_cycle(m, {points}, t, merge_tol);
}

/// Length functional l: sum of all segment lengths (no cancellation).
template <RiemannianSurface M>
double cycle_length(const PolygonalCycle<M>& c) {
    double s = 0.0;
    for (const auto& ch : c.chains) s += ch.length();
    return s;
}

/// Positions of the 2k chain endpoints in (start, end) order.
template <RiemannianSurface M>
std::vector<typename M::Vec> chain_endpoints(const PolygonalCycle<M>& c) {
    std::vector<typename M::Vec> e;
    e.reserve(2 * c.k());
    for (const auto& ch : c.chains) {
        e.push_back(c.vertices[ch.vertex_ids.front()]);
        e.push_back(c.vertices[ch.vertex_ids.back()]);
    }
    return e;
}

/// Type read off the geometry: endpoint coincidence classes and constant segments.
template <RiemannianSurface M>
CycleType classify_type(const M& m, const PolygonalCycle<M>& c, double merge_tol) {
    if (!(merge_tol > 0)) throw PreconditionError("classify_type: merge_tol must be positive");
    CycleType t = endpoint_partition(m, chain_endpoints(c), merge_tol);
    t.constant_mask = detail::constant_mask_of(c.chains, merge_tol);
    return t;
}

/// a >= b in the partial order on types: a's partition coarsens b's and every
/// constant segment of b is constant in a.
inline bool type_higher_than(const CycleType& a, const CycleType& b) {
    if (a.endpoint_block.size() != b.endpoint_block.size() || a.constant_mask.size() != b.constant_mask.size())
        throw PreconditionError("type_higher_than: types of different shape");
    // Coarsening: each b-block maps into a single a-block.
    std::vector<int> image(b.num_blocks, -1);
    for (std::size_t e = 0; e < b.endpoint_block.size(); ++e) {
        int& img = image[b.endpoint_block[e]];
        if (img < 0) img = a.endpoint_block[e];
        else if (img != a.endpoint_block[e]) return false;
    }
    for (std::size_t i = 0; i < b.constant_mask.size(); ++i) {
        if (a.constant_mask[i].size() != b.constant_mask[i].size())
            throw PreconditionError("type_higher_than: types of different shape");
        for (std::size_t j = 0; j < b.constant_mask[i].size(); ++j)
            if (b.constant_mask[i][j] && !a.constant_mask[i][j]) return false;
    }
    return true;
}

template <RiemannianSurface M>
GeodesicSegment<M> reversed_segment(const GeodesicSegment<M>& s) {
    GeodesicSegment<M> r;
    r.start = s.end;
    r.end = s.start;
    r.initial_velocity = -s.end_velocity;
    r.end_velocity = -s.initial_velocity;
    r.length = s.length;
    r.samples.assign(s.samples.rbegin(), s.samples.rend());
    if (!r.samples.empty()) {
        // Re-anchor unwrapped chart polylines at the new start.
        const auto shift = r.start - r.samples.front();
        for (auto& p : r.samples) p += shift;
    }
    return r;
}

/// Reverses the orientation of every chain.
template <RiemannianSurface M>
PolygonalCycle<M> reversed(const PolygonalCycle<M>& c) {
    PolygonalCycle<M> r = c;
    for (std::size_t i = 0; i < r.chains.size(); ++i) {
        auto& ch = r.chains[i];
        std::reverse(ch.vertex_ids.begin(), ch.vertex_ids.end());
        std::vector<GeodesicSegment<M>> segs;
        segs.reserve(ch.segments.size());
        for (auto it = c.chains[i].segments.rbegin(); it != c.chains[i].segments.rend(); ++it)
            segs.push_back(reversed_segment(*it));
        ch.segments = std::move(segs);
        std::swap(r.type.endpoint_block[2 * i], r.type.endpoint_block[2 * i + 1]);
        std::reverse(r.type.constant_mask[i].begin(), r.type.constant_mask[i].end());
    }
    return r;
}

/// Disjoint union (sum) of cycles; block ids are offset, never merged.
template <RiemannianSurface M>
PolygonalCycle<M> disjoint_union(const std::vector<PolygonalCycle<M>>& parts) {
    PolygonalCycle<M> out;
    if (parts.empty()) return out;
    out.merge_tol = parts.front().merge_tol;
    // Multiple points first, then double points, so ids [0, J) remain the blocks.
    std::vector<std::size_t> block_offset, double_offset;
    for (const auto& p : parts) {
        block_offset.push_back(static_cast<std::size_t>(out.type.num_blocks));
        out.type.num_blocks += p.type.num_blocks;
    }
    out.vertices.resize(out.type.num_blocks);
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& p = parts[pi];
        for (int b = 0; b < p.type.num_blocks; ++b) out.vertices[block_offset[pi] + b] = p.vertices[b];
    }
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& p = parts[pi];
        const std::size_t off = out.vertices.size();
        double_offset.push_back(off);
        for (std::size_t v = p.num_blocks(); v < p.vertices.size(); ++v) out.vertices.push_back(p.vertices[v]);
        for (std::size_t i = 0; i < p.chains.size(); ++i) {
            Chain<M> ch = p.chains[i];
            for (auto& id : ch.vertex_ids)
                id = p.is_multiple_point(id) ? id + block_offset[pi] : id - p.num_blocks() + off;
            out.chains.push_back(std::move(ch));
            out.type.endpoint_block.push_back(p.type.endpoint_block[2 * i] + static_cast<int>(block_offset[pi]));
            out.type.endpoint_block.push_back(p.type.endpoint_block[2 * i + 1] + static_cast<int>(block_offset[pi]));
            out.type.constant_mask.push_back(p.type.constant_mask[i]);
        }
    }
    return out;
}

/// The zero cycle: k constant chains of N segments at p, one block per chain.
template <RiemannianSurface M>
PolygonalCycle<M> constant_cycle(const M& m, const typename M::Vec& p, std::size_t k, std::size_t N,
                                 double merge_tol = -1.0) {
    std::vector<std::vector<typename M::Vec>> chains(k, std::vector<typename M::Vec>(N + 1, m.project(p)));
    CycleType t;
    t.num_blocks = 1;
    t.endpoint_block.assign(2 * k, 0);
    return build_cycle(m, chains, t, merge_tol);
}

}  // namespace geonet
