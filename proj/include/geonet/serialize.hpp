#pragma once

// JSON and CSV encodings of nets, cycles, families and reports. Field names
// and layouts are documented in docs/schemas.md.

#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geonet/cycle.hpp"
#include "geonet/errors.hpp"
#include "geonet/net.hpp"
#include "geonet/shorten.hpp"
#include "geonet/sweepout.hpp"

namespace geonet {

using Json = nlohmann::ordered_json;

template <class Vec>
Json vec_to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

template <class Vec>
Vec vec_from_json(const Json& j) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != Vec::RowsAtCompileTime)
        throw PreconditionError("vec_from_json: expected an array of " + std::to_string(Vec::RowsAtCompileTime) +
                                " numbers");
    Vec v;
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

template <RiemannianSurface M>
Json net_to_json(const GeodesicNet<M>& net) {
    Json j;
    j["total_mass"] = net.total_mass;
    j["residual"] = net.residual;
    Json verts = Json::array();
    const auto deg = net.degrees();
    for (std::size_t i = 0; i < net.vertices.size(); ++i)
        verts.push_back({{"position", vec_to_json(net.vertices[i])}, {"degree", deg[i]}});
    j["vertices"] = std::move(verts);
    Json edges = Json::array();
    for (const auto& e : net.edges) {
        Json pl = Json::array();
        for (const auto& p : e.polyline) pl.push_back(vec_to_json(p));
        edges.push_back({{"from", e.from},
                         {"to", e.to},
                         {"multiplicity", e.multiplicity},
                         {"length", e.length},
                         {"tangent_from", vec_to_json(e.tangent_from)},
                         {"tangent_to", vec_to_json(e.tangent_to)},
                         {"polyline", std::move(pl)}});
    }
    j["edges"] = std::move(edges);
    return j;
}

template <RiemannianSurface M>
GeodesicNet<M> net_from_json(const Json& j) {
    using Vec = typename M::Vec;
    GeodesicNet<M> net;
    net.total_mass = j.at("total_mass").get<double>();
    net.residual = j.at("residual").get<double>();
    for (const auto& v : j.at("vertices")) net.vertices.push_back(vec_from_json<Vec>(v.at("position")));
    for (const auto& e : j.at("edges")) {
        NetEdge<M> ne;
        ne.from = e.at("from").get<std::size_t>();
        ne.to = e.at("to").get<std::size_t>();
        if (ne.from >= net.vertices.size() || ne.to >= net.vertices.size())
            throw PreconditionError("net_from_json: edge endpoint out of range");
        ne.multiplicity = e.at("multiplicity").get<int>();
        ne.length = e.at("length").get<double>();
        ne.tangent_from = vec_from_json<Vec>(e.at("tangent_from"));
        ne.tangent_to = vec_from_json<Vec>(e.at("tangent_to"));
        for (const auto& p : e.at("polyline")) ne.polyline.push_back(vec_from_json<Vec>(p));
        net.edges.push_back(std::move(ne));
    }
    return net;
}

/// Vertex positions, chains (as vertex id lists) and the cycle type.
template <RiemannianSurface M>
Json cycle_to_json(const PolygonalCycle<M>& c) {
    Json j;
    j["length"] = cycle_length(c);
    Json verts = Json::array();
    for (const auto& v : c.vertices) verts.push_back(vec_to_json(v));
    j["vertices"] = std::move(verts);
    Json chains = Json::array();
    for (const auto& ch : c.chains) chains.push_back(ch.vertex_ids);
    j["chains"] = std::move(chains);
    j["endpoint_block"] = c.type.endpoint_block;
    j["num_blocks"] = c.type.num_blocks;
    Json mask = Json::array();
    for (const auto& row : c.type.constant_mask) {
        Json r = Json::array();
        for (bool b : row) r.push_back(b ? 1 : 0);
        mask.push_back(std::move(r));
    }
    j["constant_mask"] = std::move(mask);
    return j;
}

/// Rebuilds a cycle from cycle_to_json output (segments are recomputed and the
/// partition is validated).
template <RiemannianSurface M>
PolygonalCycle<M> cycle_from_json(const M& m, const Json& j) {
    using Vec = typename M::Vec;
    std::vector<Vec> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(m.project(vec_from_json<Vec>(v)));
    std::vector<std::vector<Vec>> chains;
    for (const auto& ch : j.at("chains")) {
        std::vector<Vec> pts;
        for (const auto& id : ch) {
            const auto i = id.get<std::size_t>();
            if (i >= verts.size()) throw PreconditionError("cycle_from_json: vertex id out of range");
            pts.push_back(verts[i]);
        }
        chains.push_back(std::move(pts));
    }
    CycleType t;
    t.endpoint_block = j.at("endpoint_block").get<std::vector<int>>();
    t.num_blocks = j.at("num_blocks").get<int>();
    return build_cycle(m, chains, t);
}

template <RiemannianSurface M>
Json family_to_json(const CycleFamily<M>& fam) {
    Json j;
    j["boundary"] = to_string(fam.boundary);
    j["provenance"] = to_string(fam.provenance);
    j["union_member"] = fam.union_member ? Json(*fam.union_member) : Json(nullptr);
    Json members = Json::array();
    for (std::size_t i = 0; i < fam.members.size(); ++i)
        members.push_back({{"parameter", fam.parameter(i)}, {"cycle", cycle_to_json(fam.members[i])}});
    j["members"] = std::move(members);
    return j;
}

template <RiemannianSurface M>
Json outcome_to_json(const ShortenOutcome<M>& o) {
    Json j;
    j["result"] = to_string(o.result);
    j["N"] = o.N;
    j["final_length"] = o.final_length;
    j["final_norm_sq"] = o.final_norm_sq;
    j["trace_rows"] = o.trace.size();
    j["net"] = o.net ? net_to_json(*o.net) : Json(nullptr);
    return j;
}

inline Json bound_to_json(const BoundCheck& b) {
    return {{"name", b.name},
            {"bound", b.bound},
            {"measured", b.measured},
            {"tol", b.tol},
            {"satisfied", b.satisfied}};
}

template <RiemannianSurface M>
Json minmax_to_json(const MinMaxReport<M>& r) {
    Json j;
    j["initial_max"] = r.initial_max;
    j["width_estimate"] = r.width_estimate;
    j["achiever"] = r.achiever;
    j["width_round"] = r.width_round;
    j["round_max"] = r.round_max;
    j["monotone"] = r.monotone;
    j["max_continuity_gap"] = r.max_continuity_gap;
    j["held_updates"] = r.held_updates;
    j["continuity_bound"] = r.continuity_bound;
    j["boundary_preserved"] = r.boundary_preserved;
    j["candidate_member"] = r.candidate_member;
    j["candidate"] = r.stationary_candidate ? outcome_to_json(*r.stationary_candidate) : Json(nullptr);
    j["certificate_method"] = r.certificate_method;
    j["stationary_candidate"] = r.certificate ? net_to_json(*r.certificate) : Json(nullptr);
    Json b = Json::array();
    for (const auto& c : r.bounds) b.push_back(bound_to_json(c));
    j["bound_checked"] = std::move(b);
    j["trace_ref"] = "trace.csv";
    return j;
}

/// Round-trip exact decimal form used in CSV output.
inline std::string exact(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

inline std::string trace_to_csv(const std::vector<TraceRow>& rows) {
    std::ostringstream os;
    os << "iteration,length,norm_sq,step_dt,event\n";
    for (const auto& r : rows)
        os << r.iteration << ',' << exact(r.length) << ',' << exact(r.norm_sq) << ',' << exact(r.step_dt) << ','
           << r.event << '\n';
    return os.str();
}

}  // namespace geonet
