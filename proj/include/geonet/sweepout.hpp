#pragma once

// One-parameter families of cycles (sweepouts), the discrete min-max pull-down
// and the diameter-bound checks built on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "geonet/cycle.hpp"
#include "geonet/errors.hpp"
#include "geonet/geodesic.hpp"
#include "geonet/net.hpp"
#include "geonet/random.hpp"
#include "geonet/shorten.hpp"

namespace geonet {

enum class BoundaryCondition { ClosedLoopInCycleSpace, Free };
enum class Provenance { Latitude, TetrahedronFaces, TwoDiscRefined, UserSupplied, Meridian };

inline const char* to_string(BoundaryCondition b) {
    return b == BoundaryCondition::ClosedLoopInCycleSpace ? "ClosedLoopInCycleSpace" : "Free";
}
inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Latitude: return "Latitude";
        case Provenance::TetrahedronFaces: return "TetrahedronFaces";
        case Provenance::TwoDiscRefined: return "TwoDiscRefined";
        case Provenance::UserSupplied: return "UserSupplied";
        case Provenance::Meridian: return "Meridian";
    }
    return "?";
}

template <RiemannianSurface M>
struct CycleFamily {
    std::vector<PolygonalCycle<M>> members;  // member i sits at parameter i / (size - 1)
    BoundaryCondition boundary = BoundaryCondition::Free;
    Provenance provenance = Provenance::UserSupplied;
    /// TetrahedronFaces: index of the member equal to the sum of the four face boundaries.
    std::optional<std::size_t> union_member;

    double parameter(std::size_t i) const {
        return members.size() < 2 ? 0.0 : static_cast<double>(i) / static_cast<double>(members.size() - 1);
    }
};

/// A contraction inside a family builder stopped at a stationary cycle instead of a point.
template <RiemannianSurface M>
struct ShortCycleFound {
    GeodesicNet<M> net;
    ShortenOutcome<M> outcome;
    std::string where;
};

template <RiemannianSurface M>
using FamilyOrCertificate = std::variant<CycleFamily<M>, ShortCycleFound<M>>;

// ---------------------------------------------------------------------------
// Small builders.

namespace detail {

/// n + 1 points along the segment, endpoints exact.
template <RiemannianSurface M>
std::vector<typename M::Vec> subdivide(const M& m, const GeodesicSegment<M>& seg, std::size_t n, double upto = 1.0) {
    std::vector<typename M::Vec> pts{seg.start};
    for (std::size_t j = 1; j < n; ++j)
        pts.push_back(exp_map(m, seg.start, typename M::Vec((upto * static_cast<double>(j) / n) * seg.initial_velocity)));
    if (n >= 1) {
        pts.push_back(upto == 1.0 ? seg.end : exp_map(m, seg.start, typename M::Vec(upto * seg.initial_velocity)));
    }
    return pts;
}

/// Segments per edge so every piece is at most inj/4.
template <RiemannianSurface M>
std::size_t pieces_for(const M& m, double length) {
    return length > 0 ? static_cast<std::size_t>(choose_N(length * (1.0 + 1e-6), m.inj())) : 1;
}

/// An oriented edge: the geodesic and a direction (+1 forward, -1 reversed).
template <RiemannianSurface M>
struct OrientedEdge {
    const GeodesicSegment<M>* seg;
    int sign;
};

/// Vertex list of the concatenated path along oriented edges.
template <RiemannianSurface M>
std::vector<typename M::Vec> path_points(const M& m, const std::vector<OrientedEdge<M>>& path) {
    std::vector<typename M::Vec> pts;
    for (const auto& e : path) {
        auto s = e.sign > 0 ? *e.seg : reversed_segment(*e.seg);
        auto p = subdivide(m, s, pieces_for(m, s.length));
        if (!pts.empty()) p.erase(p.begin());
        pts.insert(pts.end(), p.begin(), p.end());
    }
    return pts;
}

inline CycleType single_block(std::size_t k) {
    CycleType t;
    t.endpoint_block.assign(2 * k, 0);
    t.num_blocks = 1;
    return t;
}

/// Copy of c with every vertex moved to p (all segments constant). The
/// partition is kept even though blocks now coincide.
template <RiemannianSurface M>
PolygonalCycle<M> squashed(const M& m, const PolygonalCycle<M>& c, const typename M::Vec& p) {
    PolygonalCycle<M> out = c;
    for (auto& v : out.vertices) v = p;
    reconnect_segments(m, out);
    out.type.constant_mask = constant_mask_of(out.chains, out.merge_tol);
    return out;
}

/// Out-and-back chain from seg.start along seg up to the given fraction.
template <RiemannianSurface M>
std::vector<typename M::Vec> spike_points(const M& m, const GeodesicSegment<M>& seg, double fraction) {
    const std::size_t n = pieces_for(m, seg.length);
    auto out = subdivide(m, seg, n, fraction);
    std::vector<typename M::Vec> pts = out;
    for (std::size_t j = n; j-- > 0;) pts.push_back(out[j]);
    return pts;
}

/// Picks snapshot index for parameter t in [0, 1], where t = 0 is the end of
/// the contraction (a point) and t = 1 its start.
inline std::size_t snapshot_index(std::size_t count, double t) {
    return static_cast<std::size_t>(std::lround((1.0 - t) * static_cast<double>(count - 1)));
}

}  // namespace detail

/// Contracts c with the shorten loop, recording the homotopy. On Collapsed the
/// snapshots end with an exact constant cycle at the final multiple point.
template <RiemannianSurface M>
std::variant<std::vector<PolygonalCycle<M>>, ShortCycleFound<M>> contract(const M& m, const PolygonalCycle<M>& c,
                                                                           FlowConfig cfg, const std::string& name) {
    cfg.record_snapshots = true;
    // A contraction only has to reach a point; merging nearby multiple points is allowed.
    cfg.merge_and_restart = true;
    auto o = shorten(m, c, cfg);
    if (o.result == ShortenResult::Stationary) return ShortCycleFound<M>{*o.net, o, name};
    if (o.result == ShortenResult::NonConverged)
        throw NumericError("contraction of " + name + " neither collapsed nor became stationary");
    auto snaps = std::move(o.snapshots);
    snaps.push_back(detail::squashed(m, snaps.back(), snaps.back().vertices.front()));
    return snaps;
}

// ---------------------------------------------------------------------------
// Latitude and meridian families.

/// Level circles of the height function; poles are constant cycles.
template <SphereLike M>
CycleFamily<M> latitude_sweepout(const M& m, std::size_t slices) {
    using Vec = typename M::Vec;
    if (slices < 2) throw PreconditionError("latitude_sweepout: need at least 2 slices");
    // Size N from the longest level circle (polygonal g-length estimate).
    double widest = 0.0;
    for (std::size_t i = 0; i < slices; ++i) {
        const double s = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(slices - 1);
        double len = 0.0;
        for (int j = 0; j < 64; ++j) {
            const Vec a = m.project(m.level_point(s, 2 * kPi * j / 64));
            const Vec b = m.project(m.level_point(s, 2 * kPi * (j + 1) / 64));
            const Vec d = m.project_tangent(a, Vec(b - a));
            len += std::sqrt(m.inner(a, d, d));
        }
        widest = std::max(widest, len);
    }
    const std::size_t N = detail::pieces_for(m, 1.1 * widest);
    CycleFamily<M> fam;
    fam.boundary = BoundaryCondition::ClosedLoopInCycleSpace;
    fam.provenance = Provenance::Latitude;
    for (std::size_t i = 0; i < slices; ++i) {
        const double s = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(slices - 1);
        std::vector<Vec> pts;
        for (std::size_t j = 0; j < N; ++j) pts.push_back(m.project(m.level_point(s, 2 * kPi * j / N)));
        pts.push_back(pts.front());
        fam.members.push_back(build_cycle(m, {pts}, detail::single_block(1)));
    }
    return fam;
}

/// Closed loops in the class of generator `gen`, translated across the other generator.
template <TorusLike M>
CycleFamily<M> meridian_sweepout(const M& m, std::size_t slices, std::size_t gen = 1) {
    using Vec = typename M::Vec;
    const auto gens = m.loop_generators();
    if (gen >= gens.size()) throw PreconditionError("meridian_sweepout: generator index out of range");
    const Vec dir = gens[gen].second;
    const Vec across = gens[1 - gen].second;
    const std::size_t N = detail::pieces_for(m, 1.1 * std::sqrt(m.inner(gens[gen].first, dir, dir)));
    CycleFamily<M> fam;
    fam.boundary = BoundaryCondition::Free;
    fam.provenance = Provenance::Meridian;
    for (std::size_t i = 0; i < slices; ++i) {
        const Vec base = gens[gen].first + (static_cast<double>(i) / static_cast<double>(slices)) * across;
        std::vector<Vec> pts;
        for (std::size_t j = 0; j <= N; ++j) pts.push_back(m.project(Vec(base + (static_cast<double>(j) / N) * dir)));
        fam.members.push_back(build_cycle(m, {pts}, detail::single_block(1)));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Tetrahedron constructions.

/// Edge list e1..e6 (index 0..5) as vertex pairs and the four faces as signed edge
/// triples: gamma1 = e1 + e5 - e3, gamma2 = -e1 + e2 - e4, gamma3 = -e2 + e3 - e6,
/// gamma4 = e6 - e5 + e4.
inline constexpr std::array<std::array<int, 2>, 6> kTetraEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
inline constexpr std::array<std::array<int, 3>, 4> kFaceEdges{{{0, 4, 2}, {0, 1, 3}, {1, 2, 5}, {5, 4, 3}}};
inline constexpr std::array<std::array<int, 3>, 4> kFaceSigns{{{1, 1, -1}, {-1, 1, -1}, {-1, 1, -1}, {1, -1, 1}}};

template <RiemannianSurface M>
struct Tetrahedron {
    std::array<typename M::Vec, 4> vertices;
    std::array<GeodesicSegment<M>, 6> edges;
};

template <RiemannianSurface M>
Tetrahedron<M> make_tetrahedron(const M& m, const std::array<typename M::Vec, 4>& v) {
    Tetrahedron<M> t;
    for (int i = 0; i < 4; ++i) t.vertices[i] = m.project(v[i]);
    for (int e = 0; e < 6; ++e)
        t.edges[e] = geodesic_connect_global(m, t.vertices[kTetraEdges[e][0]], t.vertices[kTetraEdges[e][1]]);
    return t;
}

/// Farthest-point sampling of 4 vertices from `candidates` random points.
template <RiemannianSurface M>
std::array<typename M::Vec, 4> spread_vertices(const M& m, Rng& rng, std::size_t candidates = 512) {
    std::vector<typename M::Vec> pool;
    for (std::size_t i = 0; i < candidates; ++i) pool.push_back(random_point(m, rng));
    std::array<typename M::Vec, 4> out;
    out[0] = pool[0];
    std::vector<double> dmin(pool.size(), std::numeric_limits<double>::infinity());
    for (int k = 1; k < 4; ++k) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            dmin[i] = std::min(dmin[i], chord_distance(m, pool[i], out[k - 1]));
            if (dmin[i] > dmin[best]) best = i;
        }
        out[k] = pool[best];
    }
    return out;
}

/// Face i of the tetrahedron as a 3-chain cycle (one chain per side).
template <RiemannianSurface M>
PolygonalCycle<M> face_cycle(const M& m, const Tetrahedron<M>& t, int face, double merge_tol = -1.0) {
    std::vector<std::vector<typename M::Vec>> chains;
    std::vector<typename M::Vec> ends;
    for (int j = 0; j < 3; ++j) {
        const int e = kFaceEdges[face][j];
        const auto seg = kFaceSigns[face][j] > 0 ? t.edges[e] : reversed_segment(t.edges[e]);
        chains.push_back(detail::subdivide(m, seg, detail::pieces_for(m, seg.length)));
    }
    // Side j ends where side j+1 starts: blocks {end j, start j+1}.
    CycleType p;
    p.num_blocks = 3;
    p.endpoint_block = {0, 1, 1, 2, 2, 0};
    if (merge_tol <= 0) merge_tol = default_merge_tol(m);
    // Degenerate faces (coincident corners) collapse to one block.
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a + 1; b < 3; ++b)
            if (chord_distance(m, chains[a].front(), chains[b].front()) <= merge_tol) return build_cycle_auto(m, chains);
    return build_cycle(m, chains, p, merge_tol);
}

/// Face i as a single closed chain starting at the face's first corner.
template <RiemannianSurface M>
PolygonalCycle<M> face_loop(const M& m, const Tetrahedron<M>& t, int face) {
    std::vector<detail::OrientedEdge<M>> path;
    for (int j = 0; j < 3; ++j) path.push_back({&t.edges[kFaceEdges[face][j]], kFaceSigns[face][j]});
    auto pts = detail::path_points(m, path);
    return build_cycle(m, {pts}, detail::single_block(1));
}

/// Sum of the four face contractions, parameter 0 = four points, parameter 1 =
/// the four face boundaries (member `union_member`), followed by members in
/// which each of the six opposite edge pairs shrinks to its midpoint.
template <RiemannianSurface M>
FamilyOrCertificate<M> tetrahedron_sweepout(const M& m, const std::array<typename M::Vec, 4>& vertices,
                                            const FlowConfig& cfg = {}, std::size_t members = 17,
                                            std::size_t cancel_members = 5) {
    if (members < 2) throw PreconditionError("tetrahedron_sweepout: need at least 2 members");
    const auto t = make_tetrahedron(m, vertices);
    std::array<std::vector<PolygonalCycle<M>>, 4> snaps;
    for (int f = 0; f < 4; ++f) {
        auto r = contract(m, face_cycle(m, t, f), cfg, "face " + std::to_string(f + 1));
        if (auto* found = std::get_if<ShortCycleFound<M>>(&r)) return *found;
        snaps[f] = std::get<0>(std::move(r));
    }
    CycleFamily<M> fam;
    fam.boundary = BoundaryCondition::ClosedLoopInCycleSpace;
    fam.provenance = Provenance::TetrahedronFaces;
    for (std::size_t i = 0; i < members; ++i) {
        const double par = static_cast<double>(i) / static_cast<double>(members - 1);
        std::vector<PolygonalCycle<M>> parts;
        for (int f = 0; f < 4; ++f) parts.push_back(snaps[f][detail::snapshot_index(snaps[f].size(), par)]);
        fam.members.push_back(disjoint_union(parts));
    }
    fam.union_member = fam.members.size() - 1;

    // Cancellation: chain pairs (e, -e) shrink symmetrically to the midpoint of e.
    // Each pair forms two blocks {start of +e, end of -e} and {end of +e, start of -e}.
    for (std::size_t s = 1; s <= cancel_members; ++s) {
        const double keep = 1.0 - static_cast<double>(s) / static_cast<double>(cancel_members);
        std::vector<std::vector<typename M::Vec>> chains;
        CycleType p;
        for (int e = 0; e < 6; ++e) {
            const auto& seg = t.edges[e];
            const double a = 0.5 * (1.0 - keep);
            const auto pa = exp_map(m, seg.start, typename M::Vec(a * seg.initial_velocity));
            const auto piece = seg.length * keep > 0 ? geodesic_connect_global(m, pa, exp_map(m, seg.start, typename M::Vec((1.0 - a) * seg.initial_velocity)))
                                                     : make_segment(m, pa, pa, typename M::Vec(M::Vec::Zero()));
            auto fwd = detail::subdivide(m, piece, detail::pieces_for(m, seg.length));
            auto bwd = fwd;
            std::reverse(bwd.begin(), bwd.end());
            chains.push_back(std::move(fwd));
            chains.push_back(std::move(bwd));
            const int b0 = p.num_blocks, b1 = p.num_blocks + 1;
            if (keep > 0) {
                p.endpoint_block.insert(p.endpoint_block.end(), {b0, b1, b1, b0});
                p.num_blocks += 2;
            } else {
                p.endpoint_block.insert(p.endpoint_block.end(), {b0, b0, b0, b0});
                p.num_blocks += 1;
            }
        }
        PolygonalCycle<M> c;
        // Blocks of different pairs may coincide at shared tetrahedron corners; skip geometric validation.
        c.merge_tol = fam.members.front().merge_tol;
        c.type.endpoint_block = p.endpoint_block;
        c.type.num_blocks = p.num_blocks;
        c.vertices.assign(p.num_blocks, M::Vec::Zero());
        for (std::size_t i = 0; i < chains.size(); ++i) {
            Chain<M> ch;
            c.vertices[p.endpoint_block[2 * i]] = chains[i].front();
            c.vertices[p.endpoint_block[2 * i + 1]] = chains[i].back();
            ch.vertex_ids.push_back(p.endpoint_block[2 * i]);
            for (std::size_t j = 1; j + 1 < chains[i].size(); ++j) {
                ch.vertex_ids.push_back(c.vertices.size());
                c.vertices.push_back(chains[i][j]);
            }
            ch.vertex_ids.push_back(p.endpoint_block[2 * i + 1]);
            c.chains.push_back(std::move(ch));
        }
        reconnect_segments(m, c);
        c.type.constant_mask = detail::constant_mask_of(c.chains, c.merge_tol);
        fam.members.push_back(std::move(c));
    }
    return fam;
}

/// The refined family made of at most two closed curves: contractions of the
/// two faces sharing e2 run backwards to their union, the doubled edge e2 is
/// cancelled, leaving the common boundary Q of the two halves, an e5
/// backtracking pair grows to split Q into the other two faces, whose
/// contractions then run forwards.
template <RiemannianSurface M>
FamilyOrCertificate<M> two_disc_refined_sweepout(const M& m, const std::array<typename M::Vec, 4>& vertices,
                                                 const FlowConfig& cfg = {}, std::size_t phase_members = 17,
                                                 std::size_t bridge_members = 9) {
    if (phase_members < 2 || bridge_members < 2) throw PreconditionError("two_disc_refined_sweepout: too few members");
    const auto t = make_tetrahedron(m, vertices);
    const auto& e = t.edges;
    using OE = detail::OrientedEdge<M>;

    // Closed curves, each as a single chain: gamma2 and gamma3 from v0, -gamma1 from v0, -gamma4 from v2.
    auto loop = [&](std::vector<OE> path) { return build_cycle(m, {detail::path_points(m, path)}, detail::single_block(1)); };
    const auto g2 = loop({{&e[1], 1}, {&e[3], -1}, {&e[0], -1}});
    const auto g3 = loop({{&e[2], 1}, {&e[5], -1}, {&e[1], -1}});
    const auto g1r = loop({{&e[2], 1}, {&e[4], -1}, {&e[0], -1}});
    const auto g4r = loop({{&e[3], -1}, {&e[4], 1}, {&e[5], -1}});

    std::array<std::vector<PolygonalCycle<M>>, 4> snaps;
    const std::array<const PolygonalCycle<M>*, 4> curves{&g2, &g3, &g1r, &g4r};
    const std::array<const char*, 4> names{"face 2", "face 3", "face 1 (reversed)", "face 4 (reversed)"};
    for (int i = 0; i < 4; ++i) {
        auto r = contract(m, *curves[i], cfg, names[i]);
        if (auto* found = std::get_if<ShortCycleFound<M>>(&r)) return *found;
        snaps[i] = std::get<0>(std::move(r));
    }

    CycleFamily<M> fam;
    fam.boundary = BoundaryCondition::ClosedLoopInCycleSpace;
    fam.provenance = Provenance::TwoDiscRefined;
    auto pair_at = [&](int a, int b, double par) {
        return disjoint_union<M>({snaps[a][detail::snapshot_index(snaps[a].size(), par)],
                                  snaps[b][detail::snapshot_index(snaps[b].size(), par)]});
    };
    // Phase A: points -> gamma2 + gamma3.
    for (std::size_t i = 0; i < phase_members; ++i)
        fam.members.push_back(pair_at(0, 1, static_cast<double>(i) / static_cast<double>(phase_members - 1)));

    // Q = -e1 + e3 - e6 - e4 read from v0: v0 -> v3 -> v2 -> v1 -> v0.
    const auto q_pts = detail::path_points(m, std::vector<OE>{{&e[2], 1}, {&e[5], -1}, {&e[3], -1}, {&e[0], -1}});
    // Phase B1: Q plus the e2 backtracking pair shrinking to v0 (one block at v0).
    for (std::size_t i = 1; i < bridge_members; ++i) {
        const double frac = 1.0 - static_cast<double>(i) / static_cast<double>(bridge_members - 1);
        fam.members.push_back(build_cycle(m, {q_pts, detail::spike_points(m, e[1], frac)}, detail::single_block(2)));
    }
    // Phase B2: Q plus an e5 backtracking pair growing from v1 to v3.
    CycleType two_blocks;
    two_blocks.endpoint_block = {0, 0, 1, 1};
    two_blocks.num_blocks = 2;
    for (std::size_t i = 1; i < bridge_members; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(bridge_members - 1);
        fam.members.push_back(build_cycle(m, {q_pts, detail::spike_points(m, e[4], frac)}, two_blocks));
    }
    // Phase C: -gamma1 + -gamma4 -> points.
    for (std::size_t i = 0; i < phase_members; ++i)
        fam.members.push_back(pair_at(2, 3, 1.0 - static_cast<double>(i) / static_cast<double>(phase_members - 1)));
    return fam;
}

// ---------------------------------------------------------------------------
// Min-max.

struct BoundCheck {
    std::string name;
    double bound = 0.0;
    double measured = 0.0;
    double tol = 0.0;
    bool satisfied = false;
};

struct MinMaxOptions {
    int rounds = 40;
    double continuity_bound = -1.0;  // <= 0: inj / 8
    int candidate_attempts = 8;      // members tried (by decreasing length) for a stationary candidate
    int polish_attempts = 4;         // snapshots per candidate handed to polish_stationary
    bool enforce_continuity = false;  // hold back member updates that would exceed continuity_bound
};

template <RiemannianSurface M>
struct MinMaxReport {
    double initial_max = 0.0;
    double width_estimate = 0.0;
    std::size_t achiever = 0;
    int width_round = 0;
    std::vector<double> round_max;  // index 0 = before any round
    bool monotone = true;
    double max_continuity_gap = 0.0;
    double continuity_bound = 0.0;
    int held_updates = 0;  // member updates withheld to keep the family continuous
    bool boundary_preserved = true;
    std::size_t candidate_member = 0;
    std::optional<ShortenOutcome<M>> stationary_candidate;
    std::optional<GeodesicNet<M>> certificate;  // set when a stationary net was found
    bool certificate_from_builder = false;
    std::string certificate_method = "none";  // "shorten", "polished" or "builder"
    std::vector<BoundCheck> bounds;
};

namespace detail {

/// Hausdorff distance between the vertex sets of two cycles (chord metric).
template <RiemannianSurface M>
double vertex_hausdorff(const M& m, const PolygonalCycle<M>& a, const PolygonalCycle<M>& b) {
    auto one_way = [&](const PolygonalCycle<M>& x, const PolygonalCycle<M>& y) {
        double h = 0.0;
        for (const auto& p : x.vertices) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : y.vertices) best = std::min(best, chord_distance(m, p, q));
            h = std::max(h, best);
        }
        return h;
    };
    if (a.vertices.empty() || b.vertices.empty()) return 0.0;
    return std::max(one_way(a, b), one_way(b, a));
}

template <RiemannianSurface M>
double family_max(const std::vector<PolygonalCycle<M>>& members, std::size_t* arg = nullptr) {
    double best = -1.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const double l = cycle_length(members[i]);
        if (l > best) {
            best = l;
            if (arg) *arg = i;
        }
    }
    return best;
}

}  // namespace detail

/// Pulls the whole family down with the same operator schedule per member
/// (Birkhoff step + one flow batch per round) and shortens the member that
/// realizes the width.
template <RiemannianSurface M>
MinMaxReport<M> minmax(const M& m, const CycleFamily<M>& fam, const FlowConfig& cfg_in = {},
                       const MinMaxOptions& opt = {}) {
    if (fam.members.empty()) throw PreconditionError("minmax: empty family");
    FlowConfig cfg = cfg_in;
    if (cfg.eps_collapse <= 0) cfg.eps_collapse = 1e-4 * m.diam();
    MinMaxReport<M> rep;
    rep.continuity_bound = opt.continuity_bound > 0 ? opt.continuity_bound : m.inj() / 8.0;

    std::vector<PolygonalCycle<M>> cur = fam.members;
    std::vector<int> N(cur.size());
    std::vector<double> dt_hint(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
        double longest = 0.0;
        for (const auto& ch : cur[i].chains) longest = std::max(longest, ch.length());
        N[i] = static_cast<int>(detail::pieces_for(m, longest));
        const double k = static_cast<double>(std::max<std::size_t>(1, cur[i].k()));
        dt_hint[i] = (cfg.t_star > 0 ? cfg.t_star : m.inj() / (16.0 * k)) * 0.5;
    }
    std::size_t arg = 0;
    rep.initial_max = detail::family_max(cur, &arg);
    rep.round_max.push_back(rep.initial_max);
    rep.width_estimate = rep.initial_max;
    rep.achiever = arg;
    PolygonalCycle<M> best_member = cur[arg];
    std::vector<PolygonalCycle<M>> best_family = cur;
    const double mono_tol = 1e-9 * m.diam();
    auto check_boundary = [&]() {
        if (fam.boundary != BoundaryCondition::ClosedLoopInCycleSpace) return;
        if (cycle_length(cur.front()) > cfg.eps_collapse || cycle_length(cur.back()) > cfg.eps_collapse)
            rep.boundary_preserved = false;
    };
    check_boundary();
    for (std::size_t i = 0; i + 1 < cur.size(); ++i)
        rep.max_continuity_gap = std::max(rep.max_continuity_gap, detail::vertex_hausdorff(m, cur[i], cur[i + 1]));

    for (int r = 1; r <= opt.rounds; ++r) {
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cycle_length(cur[i]) < cfg.eps_collapse) continue;  // already a point curve
            // An update is kept only if the member stays within the continuity
            // bound of both neighbours; otherwise smaller steps are tried.
            auto continuous = [&](const PolygonalCycle<M>& c) {
                if (!opt.enforce_continuity) return true;
                return (i == 0 || detail::vertex_hausdorff(m, c, cur[i - 1]) <= rep.continuity_bound) &&
                       (i + 1 == cur.size() || detail::vertex_hausdorff(m, c, cur[i + 1]) <= rep.continuity_bound);
            };
            auto b = birkhoff_step(m, cur[i], N[i]);
            const double k = static_cast<double>(std::max<std::size_t>(1, b.k()));
            double budget = cfg.t_star > 0 ? cfg.t_star : m.inj() / (16.0 * k);
            bool moved = false;
            for (int attempt = 0; attempt < 4 && !moved; ++attempt, budget *= 0.5) {
                double hint = dt_hint[i];
                auto c = flow_batch(m, b, cfg, budget, hint, r, nullptr);
                if (continuous(c)) {
                    cur[i] = std::move(c);
                    dt_hint[i] = hint;
                    moved = true;
                }
            }
            if (!moved && continuous(b)) {
                cur[i] = std::move(b);
                moved = true;
            }
            if (!moved) ++rep.held_updates;
        }
        const double mx = detail::family_max(cur, &arg);
        if (mx > rep.round_max.back() + mono_tol) rep.monotone = false;
        rep.round_max.push_back(mx);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i)
            rep.max_continuity_gap = std::max(rep.max_continuity_gap, detail::vertex_hausdorff(m, cur[i], cur[i + 1]));
        check_boundary();
        if (mx < rep.width_estimate) {
            rep.width_estimate = mx;
            rep.achiever = arg;
            rep.width_round = r;
            best_family = cur;
        }
    }

    // Stationary candidate: the achiever first, then the next longest members.
    std::vector<std::size_t> order(best_family.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cycle_length(best_family[a]) > cycle_length(best_family[b]);
    });
    std::swap(*std::find(order.begin(), order.end(), rep.achiever), order.front());
    FlowConfig rec = cfg;
    rec.record_snapshots = true;
    for (int a = 0; a < opt.candidate_attempts && a < static_cast<int>(order.size()); ++a) {
        const std::size_t idx = order[a];
        if (cycle_length(best_family[idx]) < cfg.eps_collapse) break;
        auto o = shorten(m, best_family[idx], rec);
        if (o.result == ShortenResult::Stationary) {
            o.snapshots.clear();
            rep.candidate_member = idx;
            rep.stationary_candidate = std::move(o);
            rep.certificate = rep.stationary_candidate->net;
            rep.certificate_method = "shorten";
            break;
        }
        // Descent leaves saddle points; solve v = 0 from the most nearly stationary snapshots.
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t s = 0; s < o.snapshots.size(); ++s) {
            if (cycle_length(o.snapshots[s]) < cfg.eps_collapse) continue;
            ranked.push_back({deformation_vector(m, o.snapshots[s]).norm_sq, s});
        }
        std::sort(ranked.begin(), ranked.end());
        std::optional<PolygonalCycle<M>> polished;
        for (std::size_t t = 0; t < ranked.size() && t < static_cast<std::size_t>(opt.polish_attempts) && !polished; ++t)
            polished = polish_stationary(m, o.snapshots[ranked[t].second], cfg.eps_stationary);
        o.snapshots.clear();
        if (a == 0 || polished) {
            rep.candidate_member = idx;
            rep.stationary_candidate = std::move(o);
        }
        if (polished && cycle_length(*polished) >= cfg.eps_collapse) {
            try {
                rep.certificate = project_to_net(m, *polished, polished->merge_tol);
                rep.certificate_method = "polished";
                break;
            } catch (const InvariantError&) {
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Bound verification.

/// Refined q = 2 family + min-max; checks width and certificate mass against 4d.
template <RiemannianSurface M>
MinMaxReport<M> verify_theorem1_q2(const M& m, const std::array<typename M::Vec, 4>& vertices,
                                   const FlowConfig& cfg = {}, const MinMaxOptions& opt = {},
                                   double tol_bound = -1.0, std::size_t phase_members = 17,
                                   std::size_t bridge_members = 9) {
    if (tol_bound <= 0) tol_bound = 1e-2 * m.diam();
    const double bound = 4.0 * m.diam();
    auto fam = two_disc_refined_sweepout(m, vertices, cfg, phase_members, bridge_members);
    MinMaxReport<M> rep;
    if (auto* found = std::get_if<ShortCycleFound<M>>(&fam)) {
        rep.certificate = found->net;
        rep.certificate_from_builder = true;
        rep.certificate_method = "builder";
        rep.stationary_candidate = found->outcome;
        rep.width_estimate = found->net.total_mass;
        rep.initial_max = found->net.total_mass;
    } else {
        rep = minmax(m, std::get<CycleFamily<M>>(fam), cfg, opt);
    }
    rep.bounds.push_back({"4d (width)", bound, rep.width_estimate, tol_bound, rep.width_estimate <= bound + tol_bound});
    if (rep.certificate) {
        const double mass = rep.certificate->total_mass;
        rep.bounds.push_back({"4d (certificate mass)", bound, mass, tol_bound, mass <= bound + tol_bound});
    }
    return rep;
}

/// Shortens a perturbed loop in each generator class and checks the shortest
/// resulting closed geodesic against 2d.
template <TorusLike M>
MinMaxReport<M> verify_nonsimply_connected(const M& m, const FlowConfig& cfg, Rng& rng, double tol_bound = -1.0) {
    using Vec = typename M::Vec;
    if (tol_bound <= 0) tol_bound = 1e-2 * m.diam();
    MinMaxReport<M> rep;
    double best = std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (const auto& [base, disp] : m.loop_generators()) {
        const double len = std::sqrt(m.inner(base, disp, disp));
        const std::size_t N = detail::pieces_for(m, 2.0 * len);
        std::vector<Vec> pts;
        for (std::size_t j = 0; j <= N; ++j) {
            Vec p = base + (static_cast<double>(j) / N) * disp;
            if (j > 0 && j < N) p = exp_map(m, m.project(p), random_tangent(m, m.project(p), 1e-2 * m.inj(), rng));
            pts.push_back(m.project(p));
        }
        auto c = build_cycle(m, {pts}, detail::single_block(1));
        const double l0 = cycle_length(c);
        rep.initial_max = std::max(rep.initial_max, l0);
        auto o = shorten(m, c, cfg);
        if (o.result == ShortenResult::Stationary && o.net->total_mass < best) {
            best = o.net->total_mass;
            rep.certificate = o.net;
            rep.candidate_member = idx;
            rep.stationary_candidate = std::move(o);
        } else if (!rep.stationary_candidate) {
            rep.stationary_candidate = std::move(o);
            rep.candidate_member = idx;
        }
        ++idx;
    }
    rep.width_estimate = rep.certificate ? rep.certificate->total_mass : std::numeric_limits<double>::infinity();
    rep.achiever = rep.candidate_member;
    const double bound = 2.0 * m.diam();
    rep.bounds.push_back({"2d (closed geodesic)", bound, rep.width_estimate, tol_bound,
                          rep.certificate.has_value() && rep.width_estimate <= bound + tol_bound});
    return rep;
}

}  // namespace geonet
