#pragma once

// Birkhoff subdivision, descent flow steps and the shorten loop that either
// collapses a cycle or drives it to a strongly stationary one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geonet/cycle.hpp"
#include "geonet/deformation.hpp"
#include "geonet/errors.hpp"
#include "geonet/geodesic.hpp"
#include "geonet/net.hpp"

namespace geonet {

/// floor(4x / inj) + 1 segments per chain keep every sub-arc of a chain of length <= x below inj/4.
inline int choose_N(double x, double inj) {
    if (!(x > 0) || !(inj > 0)) throw PreconditionError("choose_N: x and inj must be positive");
    return static_cast<int>(std::floor(4.0 * x / inj)) + 1;
}

namespace detail {

/// Point at arclength s along the chain.
template <RiemannianSurface M>
typename M::Vec point_at_arclength(const M& m, const Chain<M>& ch, double s) {
    for (const auto& seg : ch.segments) {
        if (s <= seg.length) {
            if (seg.length == 0.0) return seg.start;
            const double tau = std::clamp(s / seg.length, 0.0, 1.0);
            if (tau == 1.0) return seg.end;
            return exp_map(m, seg.start, typename M::Vec(tau * seg.initial_velocity));
        }
        s -= seg.length;
    }
    return ch.segments.back().end;
}

}  // namespace detail

/// Replaces every chain by the piecewise minimizing geodesic through N equally
/// spaced points (by arclength). Multiple points and the partition are kept.
template <RiemannianSurface M>
PolygonalCycle<M> birkhoff_step(const M& m, const PolygonalCycle<M>& c, int N) {
    if (N < 1) throw PreconditionError("birkhoff_step: N must be positive");
    const double cap = N * m.inj() / 4.0 * (1.0 + 1e-9);
    for (std::size_t i = 0; i < c.k(); ++i) {
        const double L = c.chains[i].length();
        if (L > cap)
            throw PreconditionError("birkhoff_step: chain " + std::to_string(i) + " has length " + std::to_string(L) +
                                    " > N*inj/4 = " + std::to_string(cap) + "; increase N to at least " +
                                    std::to_string(choose_N(L, m.inj())));
    }
    PolygonalCycle<M> out;
    out.merge_tol = c.merge_tol;
    out.type.endpoint_block = c.type.endpoint_block;
    out.type.num_blocks = c.type.num_blocks;
    out.vertices.assign(c.vertices.begin(), c.vertices.begin() + static_cast<std::ptrdiff_t>(c.num_blocks()));
    for (const auto& ch : c.chains) {
        const double L = ch.length();
        Chain<M> nc;
        nc.vertex_ids.push_back(ch.vertex_ids.front());
        // A closed chain whose pieces would sit within a few merge tolerances is
        // a point curve; left alone, every flow step flips its constant-segment mask.
        const bool snap = ch.vertex_ids.front() == ch.vertex_ids.back() && L <= 2.0 * N * out.merge_tol;
        for (int j = 1; j < N; ++j) {
            nc.vertex_ids.push_back(out.vertices.size());
            out.vertices.push_back(snap ? c.vertices[ch.vertex_ids.front()]
                                        : detail::point_at_arclength(m, ch, L * j / N));
        }
        nc.vertex_ids.push_back(ch.vertex_ids.back());
        out.chains.push_back(std::move(nc));
    }
    reconnect_segments(m, out);
    out.type.constant_mask = detail::constant_mask_of(out.chains, out.merge_tol);
    return out;
}

/// Moves every vertex to exp(dt * v) and reconnects. Rejects the step (throws
/// StepTooLongError) if a segment would exceed inj/2 or the constant-segment
/// mask would change; the partition is untouched by construction.
template <RiemannianSurface M>
PolygonalCycle<M> flow_step(const M& m, const PolygonalCycle<M>& c, const DeformationVector<M>& v, double dt) {
    if (!(dt > 0)) throw PreconditionError("flow_step: dt must be positive");
    if (!std::isfinite(v.norm_sq)) throw PreconditionError("flow_step: deformation vector is not finite");
    const auto field = v.per_vertex(c.vertices.size());
    PolygonalCycle<M> out = c;
    for (std::size_t i = 0; i < out.vertices.size(); ++i) {
        const auto w = m.project_tangent(c.vertices[i], field[i]);
        out.vertices[i] = exp_map(m, c.vertices[i], typename M::Vec(dt * w));
    }
    try {
        reconnect_segments(m, out);
    } catch (const PreconditionError& e) {
        throw StepTooLongError(std::string("flow_step: ") + e.what());
    } catch (const NumericError& e) {
        throw StepTooLongError(std::string("flow_step: reconnection failed: ") + e.what());
    }
    if (detail::constant_mask_of(out.chains, out.merge_tol) != c.type.constant_mask)
        throw StepTooLongError("flow_step: step would change the constant-segment mask");
    return out;
}

struct FlowConfig {
    double eps_stationary = 1e-5;
    double eps_collapse = -1.0;  // <= 0: 1e-4 * diam
    double t_star = -1.0;        // <= 0: inj / (16 k)
    int max_outer_iters = 2000;
    double line_search_shrink = 0.5;
    int max_line_search = 30;
    double min_trial_fraction = 1e-4;  // smallest first trial step, relative to the batch budget
    int max_steps_per_batch = 64;
    double merge_tol = -1.0;  // <= 0: the cycle's own merge_tol
    int N = 0;                // <= 0: choose_N(cycle length, inj)
    bool merge_and_restart = false;
    bool record_snapshots = false;
};

struct TraceRow {
    int iteration = 0;
    double length = 0.0;
    double norm_sq = 0.0;
    double step_dt = 0.0;
    std::string event;
};

enum class ShortenResult { Collapsed, Stationary, NonConverged };

inline const char* to_string(ShortenResult r) {
    switch (r) {
        case ShortenResult::Collapsed: return "Collapsed";
        case ShortenResult::Stationary: return "Stationary";
        case ShortenResult::NonConverged: return "NonConverged";
    }
    return "?";
}

template <RiemannianSurface M>
struct ShortenOutcome {
    ShortenResult result = ShortenResult::NonConverged;
    std::optional<GeodesicNet<M>> net;  // set when Stationary
    PolygonalCycle<M> final_cycle;
    std::vector<TraceRow> trace;
    std::vector<PolygonalCycle<M>> snapshots;  // after each batch, if requested
    int N = 0;
    double final_length = 0.0;
    double final_norm_sq = 0.0;
};

/// Merges multiple points of different blocks that lie within tol of each other.
/// Returns true if anything changed.
template <RiemannianSurface M>
bool coarsen_blocks(const M& m, PolygonalCycle<M>& c, double tol) {
    const std::size_t J = c.num_blocks();
    detail::UnionFind uf(J);
    bool any = false;
    for (std::size_t a = 0; a < J; ++a)
        for (std::size_t b = a + 1; b < J; ++b)
            if (chord_distance(m, c.vertices[a], c.vertices[b]) <= tol && uf.find(a) != uf.find(b)) {
                uf.unite(a, b);
                any = true;
            }
    if (!any) return false;
    std::vector<int> raw(J);
    for (std::size_t a = 0; a < J; ++a) raw[a] = static_cast<int>(uf.find(a));
    int count = 0;
    const std::vector<int> label = detail::canonical_labels(raw, count);
    std::vector<typename M::Vec> verts(count);
    std::vector<bool> seen(count, false);
    for (std::size_t a = 0; a < J; ++a)
        if (!seen[label[a]]) {
            verts[label[a]] = c.vertices[a];
            seen[label[a]] = true;
        }
    const std::size_t shift = J - static_cast<std::size_t>(count);
    for (std::size_t v = J; v < c.vertices.size(); ++v) verts.push_back(c.vertices[v]);
    for (auto& ch : c.chains)
        for (auto& id : ch.vertex_ids) id = id < J ? static_cast<std::size_t>(label[id]) : id - shift;
    for (auto& b : c.type.endpoint_block) b = label[b];
    c.type.num_blocks = count;
    c.vertices = std::move(verts);
    reconnect_segments(m, c);
    c.type.constant_mask = detail::constant_mask_of(c.chains, c.merge_tol);
    return true;
}

namespace detail {

template <RiemannianSurface M>
bool blocks_in_proximity(const M& m, const PolygonalCycle<M>& c, double tol) {
    for (std::size_t a = 0; a < c.num_blocks(); ++a)
        for (std::size_t b = a + 1; b < c.num_blocks(); ++b)
            if (chord_distance(m, c.vertices[a], c.vertices[b]) <= tol) return true;
    return false;
}

}  // namespace detail

/// Vertex groups that move together under the deformation vector: one per block
/// (with its negligible clusters) and one per non-negligible cluster. Each
/// group carries one unknown tangent vector and one residual component.
template <RiemannianSurface M>
struct MotionGroups {
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::size_t> anchor;  // vertex whose tangent frame parametrizes the group
};

template <RiemannianSurface M>
MotionGroups<M> motion_groups(const PolygonalCycle<M>& c, const DeformationVector<M>& dv) {
    MotionGroups<M> g;
    for (std::size_t b = 0; b < c.num_blocks(); ++b) {
        g.members.push_back({b});
        g.anchor.push_back(b);
    }
    for (const auto& cl : dv.clusters) {
        if (cl.negligible) {
            auto& grp = g.members[static_cast<std::size_t>(cl.attached_block)];
            grp.insert(grp.end(), cl.vertex_ids.begin(), cl.vertex_ids.end());
        } else {
            g.members.push_back(cl.vertex_ids);
            g.anchor.push_back(cl.vertex_ids.front());
        }
    }
    return g;
}

namespace detail {

/// Residual vector: every group's deformation component in its anchor frame.
template <RiemannianSurface M>
Eigen::VectorXd group_residual(const M& m, const PolygonalCycle<M>& c, const DeformationVector<M>& dv,
                               const std::vector<typename M::Vec>& anchor_pos,
                               const std::vector<std::array<typename M::Vec, 2>>& frames) {
    const auto field = dv.per_vertex(c.vertices.size());
    const auto groups = motion_groups(c, dv);
    Eigen::VectorXd r(2 * groups.anchor.size());
    for (std::size_t i = 0; i < groups.anchor.size(); ++i) {
        const auto& w = field[groups.anchor[i]];
        r(2 * i) = m.inner(anchor_pos[i], w, frames[i][0]);
        r(2 * i + 1) = m.inner(anchor_pos[i], w, frames[i][1]);
    }
    return r;
}

template <RiemannianSurface M>
PolygonalCycle<M> move_groups(const M& m, const PolygonalCycle<M>& c, const MotionGroups<M>& groups,
                              const std::vector<std::array<typename M::Vec, 2>>& frames, const Eigen::VectorXd& delta) {
    PolygonalCycle<M> out = c;
    for (std::size_t i = 0; i < groups.anchor.size(); ++i) {
        const typename M::Vec w = delta(2 * i) * frames[i][0] + delta(2 * i + 1) * frames[i][1];
        for (auto v : groups.members[i])
            out.vertices[v] = exp_map(m, c.vertices[v], typename M::Vec(m.project_tangent(c.vertices[v], w)));
    }
    reconnect_segments(m, out);
    return out;
}

}  // namespace detail

/// Newton-type solve of v(gamma) = 0 (Levenberg-Marquardt with a finite
/// difference Jacobian over the motion groups). Converges to nearby stationary
/// cycles of any index, including the saddles that descent moves away from.
/// The partition and constant-segment mask are kept fixed; returns nullopt if
/// the residual norm cannot be brought below eps_stationary.
template <RiemannianSurface M>
std::optional<PolygonalCycle<M>> polish_stationary(const M& m, const PolygonalCycle<M>& c0, double eps_stationary,
                                                   int max_iterations = 40) {
    PolygonalCycle<M> cur = c0;
    double lambda = 1e-6;
    for (int it = 0; it <= max_iterations; ++it) {
        const auto dv = deformation_vector(m, cur);
        if (dv.norm_sq < eps_stationary * eps_stationary) return cur;
        if (it == max_iterations) break;
        const auto groups = motion_groups(cur, dv);
        std::vector<typename M::Vec> pos;
        std::vector<std::array<typename M::Vec, 2>> frames;
        for (auto a : groups.anchor) {
            pos.push_back(cur.vertices[a]);
            frames.push_back(m.tangent_frame(cur.vertices[a]));
        }
        const Eigen::VectorXd r = detail::group_residual(m, cur, dv, pos, frames);
        const Eigen::Index n = r.size();
        Eigen::MatrixXd J(n, n);
        const double h = 1e-7 * m.diam();
        try {
            for (Eigen::Index j = 0; j < n; ++j) {
                Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
                d(j) = h;
                const auto cp = detail::move_groups(m, cur, groups, frames, d);
                d(j) = -h;
                const auto cm = detail::move_groups(m, cur, groups, frames, d);
                J.col(j) = (detail::group_residual(m, cp, deformation_vector(m, cp), pos, frames) -
                            detail::group_residual(m, cm, deformation_vector(m, cm), pos, frames)) /
                           (2.0 * h);
            }
        } catch (const std::exception&) {
            return std::nullopt;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        // Sliding vertices along a geodesic leaves v unchanged, so J is rank
        // deficient; plain Levenberg damping keeps steps near the minimum-norm one.
        const double scale = std::max(JtJ.diagonal().maxCoeff(), 1e-300);
        double shortest = std::numeric_limits<double>::infinity();
        for (const auto& ch : cur.chains)
            for (const auto& sg : ch.segments)
                if (sg.length > cur.merge_tol) shortest = std::min(shortest, sg.length);
        const double max_step = std::min(0.125 * m.inj(), 0.25 * shortest);
        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries, lambda *= 10.0) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += lambda * scale;
            const Eigen::VectorXd delta = A.ldlt().solve(-g);
            // Keep steps inside the segment budget.
            if (!delta.allFinite() || delta.lpNorm<Eigen::Infinity>() > max_step) continue;
            try {
                auto next = detail::move_groups(m, cur, groups, frames, delta);
                if (detail::constant_mask_of(next.chains, next.merge_tol) != cur.type.constant_mask) continue;
                const auto ndv = deformation_vector(m, next);
                if (ndv.norm_sq < dv.norm_sq) {
                    cur = std::move(next);
                    improved = true;
                    lambda = std::max(lambda / 100.0, 1e-12);
                }
            } catch (const std::exception&) {
            }
        }
        if (!improved) return std::nullopt;
    }
    return std::nullopt;
}

/// One batch of line-searched flow steps with total time at most budget.
/// Returns the accepted cycle; appends trace rows; dt_hint carries the last
/// accepted step size across batches.
template <RiemannianSurface M>
PolygonalCycle<M> flow_batch(const M& m, PolygonalCycle<M> cur, const FlowConfig& cfg, double budget, double& dt_hint,
                             int iteration, std::vector<TraceRow>* trace) {
    const double eps_sq = cfg.eps_stationary * cfg.eps_stationary;
    const double budget_total = budget;
    double length = cycle_length(cur);
    for (int step = 0; step < cfg.max_steps_per_batch && budget > 1e-14 * m.inj(); ++step) {
        const auto dv = deformation_vector(m, cur);
        if (dv.norm_sq < eps_sq) break;
        // The hint can decay near a mask boundary; keep a floor so later steps recover.
        double dt = std::min(std::max(2.0 * dt_hint, cfg.min_trial_fraction * budget_total), budget);
        bool accepted = false;
        for (int ls = 0; ls < cfg.max_line_search; ++ls, dt *= cfg.line_search_shrink) {
            try {
                auto next = flow_step(m, cur, dv, dt);
                const double nl = cycle_length(next);
                if (nl < length) {
                    cur = std::move(next);
                    length = nl;
                    accepted = true;
                    break;
                }
            } catch (const StepTooLongError&) {
            }
        }
        if (!accepted) {
            if (trace) trace->push_back({iteration, length, dv.norm_sq, 0.0, "line_search_exhausted"});
            break;
        }
        dt_hint = dt;
        budget -= dt;
        if (trace) trace->push_back({iteration, length, dv.norm_sq, dt, "flow"});
    }
    return cur;
}

/// Alternates Birkhoff steps with batches of flow steps (time budget t_star
/// per batch) until the cycle collapses, becomes stationary, or the iteration
/// budget runs out.
template <RiemannianSurface M>
ShortenOutcome<M> shorten(const M& m, const PolygonalCycle<M>& input, const FlowConfig& cfg_in = {}) {
    FlowConfig cfg = cfg_in;
    if (cfg.eps_collapse <= 0) cfg.eps_collapse = 1e-4 * m.diam();
    if (cfg.t_star <= 0) cfg.t_star = m.inj() / (16.0 * static_cast<double>(std::max<std::size_t>(1, input.k())));
    if (!(cfg.eps_stationary > 0) || !(cfg.line_search_shrink > 0 && cfg.line_search_shrink < 1))
        throw PreconditionError("shorten: eps_stationary must be positive and line_search_shrink in (0,1)");

    ShortenOutcome<M> out;
    PolygonalCycle<M> cur = input;
    if (cfg.merge_tol > 0) cur.merge_tol = cfg.merge_tol;
    int N = cfg.N;
    if (N <= 0) {
        double longest = 0.0;
        for (const auto& ch : cur.chains) longest = std::max(longest, ch.length());
        N = longest > 0 ? choose_N(longest, m.inj()) : 1;
    }
    out.N = N;
    const double eps_sq = cfg.eps_stationary * cfg.eps_stationary;
    const double proximity_tol = cur.merge_tol;

    auto finish = [&](ShortenResult r, const DeformationVector<M>& dv, int it, double dt) {
        out.result = r;
        out.final_length = cycle_length(cur);
        out.final_norm_sq = dv.norm_sq;
        out.trace.push_back({it, out.final_length, dv.norm_sq, dt, to_string(r)});
        if (r == ShortenResult::Stationary) out.net = project_to_net(m, cur, cur.merge_tol);
        out.final_cycle = cur;
        if (cfg.record_snapshots) out.snapshots.push_back(cur);
        return out;
    };

    if (cfg.record_snapshots) out.snapshots.push_back(cur);
    double dt_hint = 0.5 * cfg.t_star;
    bool reported_proximity = false;
    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        cur = birkhoff_step(m, cur, N);
        auto dv = deformation_vector(m, cur);
        const double L = cycle_length(cur);
        out.trace.push_back({it, L, dv.norm_sq, 0.0, "birkhoff"});
        if (L < cfg.eps_collapse) return finish(ShortenResult::Collapsed, dv, it, 0.0);
        if (dv.norm_sq < eps_sq) return finish(ShortenResult::Stationary, dv, it, 0.0);
        // Blocks closer than the Birkhoff resolution of a chain between them pin
        // that chain's segments at the constant-segment threshold, so the flow
        // cannot shorten it without a type change.
        if (cfg.merge_and_restart && coarsen_blocks(m, cur, 2.0 * N * cur.merge_tol)) {
            out.trace.push_back({it, cycle_length(cur), deformation_vector(m, cur).norm_sq, 0.0, "merge_restart"});
            continue;
        }
        if (detail::blocks_in_proximity(m, cur, proximity_tol)) {
            if (!reported_proximity) out.trace.push_back({it, L, dv.norm_sq, 0.0, "proximity"});
            reported_proximity = true;
        }
        cur = flow_batch(m, std::move(cur), cfg, cfg.t_star, dt_hint, it, &out.trace);
        if (cfg.record_snapshots) out.snapshots.push_back(cur);
        dv = deformation_vector(m, cur);
        if (cycle_length(cur) < cfg.eps_collapse) return finish(ShortenResult::Collapsed, dv, it, dt_hint);
        if (dv.norm_sq < eps_sq) return finish(ShortenResult::Stationary, dv, it, dt_hint);
    }
    return finish(ShortenResult::NonConverged, deformation_vector(m, cur), cfg.max_outer_iters, 0.0);
}

}  // namespace geonet
