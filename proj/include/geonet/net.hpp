#pragma once

// Non-parametrized geodesic nets: the multigraph image of a piecewise-geodesic cycle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "geonet/cycle.hpp"
#include "geonet/errors.hpp"
#include "geonet/geodesic.hpp"

namespace geonet {

template <RiemannianSurface M>
struct NetEdge {
    using Vec = typename M::Vec;
    std::size_t from = 0;
    std::size_t to = 0;
    int multiplicity = 1;
    double length = 0.0;
    std::vector<Vec> polyline;
    // Outward unit tangents at `from` and `to` (used for balance and straightening).
    Vec tangent_from = Vec::Zero();
    Vec tangent_to = Vec::Zero();

    bool is_loop() const { return from == to; }
};

template <RiemannianSurface M>
struct GeodesicNet {
    using Vec = typename M::Vec;
    std::vector<Vec> vertices;
    std::vector<NetEdge<M>> edges;
    /// Max over vertices of |sum of outward unit tangents|_g, before straightening.
    double residual = 0.0;
    double total_mass = 0.0;

    /// Degree per vertex counting multiplicity, loops twice.
    std::vector<int> degrees() const {
        std::vector<int> d(vertices.size(), 0);
        for (const auto& e : edges) {
            d[e.from] += e.multiplicity;
            d[e.to] += e.multiplicity;
        }
        return d;
    }
};

struct NetOptions {
    double straighten_angle = 1e-5;  // rad
};

namespace detail {

/// Point at the given fraction of the polyline's chord length.
template <class Vec>
Vec polyline_point(const std::vector<Vec>& pl, double fraction) {
    if (pl.empty()) return Vec::Zero();
    double total = 0.0;
    for (std::size_t i = 1; i < pl.size(); ++i) total += (pl[i] - pl[i - 1]).norm();
    double rest = fraction * total;
    for (std::size_t i = 1; i < pl.size(); ++i) {
        const double len = (pl[i] - pl[i - 1]).norm();
        if (rest <= len && len > 0) return pl[i - 1] + (rest / len) * (pl[i] - pl[i - 1]);
        rest -= len;
    }
    return pl.back();
}

template <RiemannianSurface M>
bool same_trace(const M& m, const NetEdge<M>& a, const NetEdge<M>& b, bool flipped, double tol) {
    for (double f : {0.25, 0.5, 0.75}) {
        const auto pa = m.project(polyline_point(a.polyline, f));
        const auto pb = m.project(polyline_point(b.polyline, flipped ? 1.0 - f : f));
        if (chord_distance(m, pa, pb) > tol) return false;
    }
    return true;
}

template <RiemannianSurface M>
void append_polyline(std::vector<typename M::Vec>& a, const std::vector<typename M::Vec>& b) {
    if (b.empty()) return;
    if (a.empty()) {
        a = b;
        return;
    }
    const typename M::Vec shift = a.back() - b.front();
    for (std::size_t i = 1; i < b.size(); ++i) a.push_back(b[i] + shift);
}

template <RiemannianSurface M>
NetEdge<M> reversed_edge(const NetEdge<M>& e) {
    NetEdge<M> r = e;
    std::swap(r.from, r.to);
    std::swap(r.tangent_from, r.tangent_to);
    std::reverse(r.polyline.begin(), r.polyline.end());
    return r;
}

}  // namespace detail

/// Projects a cycle to its net: merges vertices within merge_tol (and across
/// constant segments), drops constant segments, joins collinear degree-2
/// junctions into single edges and collects repeated edges as multiplicities.
template <RiemannianSurface M>
GeodesicNet<M> project_to_net(const M& m, const PolygonalCycle<M>& c, double merge_tol, const NetOptions& opt = {}) {
    using Vec = typename M::Vec;
    const std::size_t nv = c.vertices.size();
    detail::UnionFind uf(nv);
    for (const auto& ch : c.chains)
        for (std::size_t j = 0; j < ch.size(); ++j)
            if (ch.segments[j].length <= merge_tol) uf.unite(ch.vertex_ids[j], ch.vertex_ids[j + 1]);
    for (std::size_t a = 0; a < nv; ++a)
        for (std::size_t b = a + 1; b < nv; ++b)
            if (chord_distance(m, c.vertices[a], c.vertices[b]) <= merge_tol) uf.unite(a, b);

    std::map<std::size_t, std::size_t> class_index;
    GeodesicNet<M> net;
    for (std::size_t a = 0; a < nv; ++a) {
        const std::size_t r = uf.find(a);
        if (!class_index.count(r)) {
            class_index[r] = net.vertices.size();
            net.vertices.push_back(c.vertices[r]);
        }
    }
    auto cls = [&](std::size_t v) { return class_index.at(uf.find(v)); };

    std::vector<NetEdge<M>> edges;
    for (const auto& ch : c.chains) {
        for (std::size_t j = 0; j < ch.size(); ++j) {
            const auto& s = ch.segments[j];
            if (s.length <= merge_tol) continue;
            NetEdge<M> e;
            e.from = cls(ch.vertex_ids[j]);
            e.to = cls(ch.vertex_ids[j + 1]);
            e.length = s.length;
            e.polyline = s.samples;
            e.tangent_from = s.initial_velocity / norm(m, s.start, s.initial_velocity);
            e.tangent_to = -s.end_velocity / norm(m, s.end, s.end_velocity);
            edges.push_back(std::move(e));
        }
    }

    // Balance residual and parity, before any straightening.
    std::vector<Vec> balance(net.vertices.size(), Vec::Zero());
    std::vector<int> degree(net.vertices.size(), 0);
    for (const auto& e : edges) {
        balance[e.from] += e.tangent_from;
        balance[e.to] += e.tangent_to;
        degree[e.from]++;
        degree[e.to]++;
    }
    net.residual = 0.0;
    for (std::size_t v = 0; v < net.vertices.size(); ++v) {
        if (degree[v] % 2 != 0)
            throw InvariantError("project_to_net: vertex " + std::to_string(v) + " has odd degree " +
                                 std::to_string(degree[v]));
        net.residual = std::max(net.residual, norm(m, net.vertices[v], balance[v]));
    }

    // Repeated geometric edges become multiplicities.
    const double same_tol = 10.0 * merge_tol;
    std::vector<NetEdge<M>> merged;
    for (auto& e : edges) {
        bool absorbed = false;
        for (auto& f : merged) {
            if (std::abs(f.length - e.length) > same_tol) continue;
            const double tol = same_tol + 1e-3 * e.length;
            const bool forward = f.from == e.from && f.to == e.to && detail::same_trace(m, f, e, false, tol);
            const bool backward = f.from == e.to && f.to == e.from && detail::same_trace(m, f, e, true, tol);
            if (!forward && !backward) continue;
            f.multiplicity += e.multiplicity;
            absorbed = true;
            break;
        }
        if (!absorbed) merged.push_back(std::move(e));
    }
    edges = std::move(merged);

    // Straighten collinear degree-2 junctions.
    const double straight = 2.0 * std::sin(0.5 * opt.straighten_angle);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::vector<std::pair<std::size_t, bool>>> inc(net.vertices.size());  // (edge, at_from)
        for (std::size_t i = 0; i < edges.size(); ++i) {
            inc[edges[i].from].push_back({i, true});
            inc[edges[i].to].push_back({i, false});
        }
        for (std::size_t v = 0; v < net.vertices.size() && !changed; ++v) {
            if (inc[v].size() != 2) continue;
            const auto [ia, a_from] = inc[v][0];
            const auto [ib, b_from] = inc[v][1];
            if (ia == ib) continue;  // closed loop at v: keep v as its base point
            if (edges[ia].multiplicity != edges[ib].multiplicity) continue;
            const Vec ta = a_from ? edges[ia].tangent_from : edges[ia].tangent_to;
            const Vec tb = b_from ? edges[ib].tangent_from : edges[ib].tangent_to;
            if (norm(m, net.vertices[v], Vec(ta + tb)) >= straight) continue;
            // Orient a to end at v and b to start at v, then concatenate.
            NetEdge<M> ea = a_from ? detail::reversed_edge(edges[ia]) : edges[ia];
            NetEdge<M> eb = b_from ? edges[ib] : detail::reversed_edge(edges[ib]);
            NetEdge<M> joined = ea;
            joined.to = eb.to;
            joined.tangent_to = eb.tangent_to;
            joined.length = ea.length + eb.length;
            detail::append_polyline<M>(joined.polyline, eb.polyline);
            std::vector<NetEdge<M>> next;
            for (std::size_t i = 0; i < edges.size(); ++i)
                if (i != ia && i != ib) next.push_back(edges[i]);
            next.push_back(std::move(joined));
            edges = std::move(next);
            changed = true;
        }
    }

    // Drop isolated vertices and renumber.
    std::vector<int> used(net.vertices.size(), 0);
    for (const auto& e : edges) used[e.from] = used[e.to] = 1;
    std::vector<std::size_t> renumber(net.vertices.size());
    std::vector<Vec> kept;
    for (std::size_t v = 0; v < net.vertices.size(); ++v) {
        renumber[v] = kept.size();
        if (used[v]) kept.push_back(net.vertices[v]);
    }
    net.vertices = std::move(kept);
    for (auto& e : edges) {
        e.from = renumber[e.from];
        e.to = renumber[e.to];
    }

    net.edges = std::move(edges);
    net.total_mass = 0.0;
    for (const auto& e : net.edges) net.total_mass += e.multiplicity * e.length;
    return net;
}

}  // namespace geonet
