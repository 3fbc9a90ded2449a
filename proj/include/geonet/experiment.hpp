#pragma once

// Experiment configuration, dispatch and report assembly for the CLI.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "geonet/any_manifold.hpp"
#include "geonet/deformation.hpp"
#include "geonet/errors.hpp"
#include "geonet/random.hpp"
#include "geonet/serialize.hpp"
#include "geonet/shorten.hpp"
#include "geonet/svg.hpp"
#include "geonet/sweepout.hpp"

namespace geonet {

inline constexpr int kSchemaVersion = 1;

enum class Command { Shorten, MinMax, VerifyT1Q2, VerifyPi1, GradCheck };

inline const char* to_string(Command c) {
    switch (c) {
        case Command::Shorten: return "shorten";
        case Command::MinMax: return "minmax";
        case Command::VerifyT1Q2: return "verify-t1q2";
        case Command::VerifyPi1: return "verify-pi1";
        case Command::GradCheck: return "gradcheck";
    }
    return "?";
}

inline Command parse_command(const std::string& s) {
    for (Command c : {Command::Shorten, Command::MinMax, Command::VerifyT1Q2, Command::VerifyPi1, Command::GradCheck})
        if (s == to_string(c)) return c;
    throw ValidationError("command: unknown command '" + s + "'");
}

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2, kExitNumeric = 3 };

struct ExperimentConfig {
    Command command = Command::Shorten;
    std::uint64_t seed = 0;
    Json manifold;
    Json raw;  // validated input, echoed into the report

    // Tolerances; <= 0 means the library default.
    double eps_stationary = 1e-5;
    double eps_collapse = -1.0;
    double merge_tol = -1.0;
    double tol_bound = -1.0;

    // Flow.
    int N = 0;
    int max_outer_iters = 2000;

    // Families and min-max.
    std::string family = "refined";
    std::size_t slices = 65;
    int rounds = 40;
    std::size_t phase_members = 17;
    std::size_t bridge_members = 9;
    std::size_t tetra_members = 17;
    std::size_t cancel_members = 5;
    int candidate_attempts = 8;
    double continuity_bound = -1.0;

    // Shorten input.
    Json input;

    // Gradient check.
    std::size_t gradcheck_cycles = 200;
    double gradcheck_h = 1e-6;

    Projection projection = Projection::Orthographic;

    FlowConfig flow() const {
        FlowConfig f;
        f.eps_stationary = eps_stationary;
        f.eps_collapse = eps_collapse;
        f.merge_tol = merge_tol;
        f.N = N;
        f.max_outer_iters = max_outer_iters;
        return f;
    }
    MinMaxOptions minmax_options() const {
        MinMaxOptions o;
        o.rounds = rounds;
        o.candidate_attempts = candidate_attempts;
        o.continuity_bound = continuity_bound;
        return o;
    }
};

namespace detail {

inline double optional_positive(const Json& j, const std::string& key, const std::string& where, double fallback) {
    if (!j.contains(key)) return fallback;
    return positive_number(j, key, where);
}

inline long long optional_count(const Json& j, const std::string& key, const std::string& where, long long fallback,
                                long long min_value) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer");
    const auto v = j.at(key).get<long long>();
    if (v < min_value) throw ValidationError(where + "." + key + ": must be >= " + std::to_string(min_value));
    return v;
}

}  // namespace detail

/// Validates a parsed config document. `command` (from the CLI) must agree with
/// the document's own "command" key when both are present.
inline ExperimentConfig parse_config(const Json& j, std::optional<Command> command = std::nullopt) {
    using namespace detail;
    ExperimentConfig c;
    reject_unknown_keys(j, {"schema_version", "command", "seed", "manifold", "tolerances", "flow", "family", "input",
                            "gradcheck", "svg"},
                        "config");
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer())
        throw ValidationError("config.schema_version: required integer");
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw ValidationError("config.schema_version: unsupported version " +
                              std::to_string(j.at("schema_version").get<int>()) + " (expected " +
                              std::to_string(kSchemaVersion) + ")");
    if (j.contains("command")) {
        if (!j.at("command").is_string()) throw ValidationError("config.command: expected a string");
        const Command own = parse_command(j.at("command").get<std::string>());
        if (command && *command != own)
            throw ValidationError(std::string("config.command: file says '") + to_string(own) +
                                  "' but the subcommand is '" + to_string(*command) + "'");
        c.command = own;
    } else if (command) {
        c.command = *command;
    } else {
        throw ValidationError("config.command: required when no subcommand is given");
    }
    if (command) c.command = *command;
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ValidationError("config.seed: expected a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (!j.contains("manifold")) throw ValidationError("config.manifold: required");
    c.manifold = j.at("manifold");
    (void)make_manifold(c.manifold);  // validate early

    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        const std::string w = "config.tolerances";
        reject_unknown_keys(t, {"eps_stationary", "eps_collapse", "merge_tol", "tol_bound"}, w);
        c.eps_stationary = optional_positive(t, "eps_stationary", w, c.eps_stationary);
        c.eps_collapse = optional_positive(t, "eps_collapse", w, c.eps_collapse);
        c.merge_tol = optional_positive(t, "merge_tol", w, c.merge_tol);
        c.tol_bound = optional_positive(t, "tol_bound", w, c.tol_bound);
    }
    if (j.contains("flow")) {
        const auto& f = j.at("flow");
        const std::string w = "config.flow";
        reject_unknown_keys(f, {"N", "max_outer_iters"}, w);
        if (f.contains("N") && f.at("N").is_string()) {
            if (f.at("N").get<std::string>() != "auto") throw ValidationError(w + ".N: expected an integer or \"auto\"");
        } else {
            c.N = static_cast<int>(optional_count(f, "N", w, 0, 1));
        }
        c.max_outer_iters = static_cast<int>(optional_count(f, "max_outer_iters", w, c.max_outer_iters, 1));
    }
    if (j.contains("family")) {
        const auto& f = j.at("family");
        const std::string w = "config.family";
        reject_unknown_keys(f, {"kind", "slices", "rounds", "phase_members", "bridge_members", "members",
                                "cancel_members", "candidate_attempts", "continuity_bound"},
                            w);
        if (f.contains("kind")) {
            c.family = f.at("kind").get<std::string>();
            if (c.family != "refined" && c.family != "tetrahedron" && c.family != "latitude" && c.family != "meridian")
                throw ValidationError(w + ".kind: expected refined, tetrahedron, latitude or meridian");
        }
        c.slices = static_cast<std::size_t>(optional_count(f, "slices", w, static_cast<long long>(c.slices), 3));
        c.rounds = static_cast<int>(optional_count(f, "rounds", w, c.rounds, 0));
        c.phase_members =
            static_cast<std::size_t>(optional_count(f, "phase_members", w, static_cast<long long>(c.phase_members), 2));
        c.bridge_members =
            static_cast<std::size_t>(optional_count(f, "bridge_members", w, static_cast<long long>(c.bridge_members), 2));
        c.tetra_members =
            static_cast<std::size_t>(optional_count(f, "members", w, static_cast<long long>(c.tetra_members), 2));
        c.cancel_members =
            static_cast<std::size_t>(optional_count(f, "cancel_members", w, static_cast<long long>(c.cancel_members), 2));
        c.candidate_attempts = static_cast<int>(optional_count(f, "candidate_attempts", w, c.candidate_attempts, 1));
        c.continuity_bound = optional_positive(f, "continuity_bound", w, c.continuity_bound);
    }
    if (j.contains("input")) {
        const auto& in = j.at("input");
        const std::string w = "config.input";
        if (!in.is_object() || !in.contains("kind") || !in.at("kind").is_string())
            throw ValidationError(w + ".kind: required string");
        const auto kind = in.at("kind").get<std::string>();
        if (kind == "generator") {
            reject_unknown_keys(in, {"kind", "index", "noise"}, w);
        } else if (kind == "random") {
            reject_unknown_keys(in, {"kind", "k", "N", "max_step", "shared_base"}, w);
        } else if (kind == "polygon") {
            reject_unknown_keys(in, {"kind", "points"}, w);
            if (!in.contains("points") || !in.at("points").is_array() || in.at("points").size() < 2)
                throw ValidationError(w + ".points: expected at least two points");
        } else if (kind == "cycle") {
            reject_unknown_keys(in, {"kind", "vertices", "chains", "endpoint_block", "num_blocks", "constant_mask",
                                     "length"},
                                w);
        } else {
            throw ValidationError(w + ".kind: expected generator, random, polygon or cycle");
        }
        c.input = in;
    }
    if (j.contains("gradcheck")) {
        const auto& g = j.at("gradcheck");
        const std::string w = "config.gradcheck";
        reject_unknown_keys(g, {"cycles", "h"}, w);
        c.gradcheck_cycles =
            static_cast<std::size_t>(optional_count(g, "cycles", w, static_cast<long long>(c.gradcheck_cycles), 1));
        c.gradcheck_h = optional_positive(g, "h", w, c.gradcheck_h);
    }
    if (j.contains("svg")) {
        const auto& s = j.at("svg");
        reject_unknown_keys(s, {"projection"}, "config.svg");
        const auto p = s.value("projection", std::string("orthographic"));
        if (p == "orthographic") c.projection = Projection::Orthographic;
        else if (p == "chart") c.projection = Projection::ChartPlane;
        else throw ValidationError("config.svg.projection: expected orthographic or chart");
    }
    c.raw = j;
    c.raw["command"] = to_string(c.command);
    c.raw["seed"] = c.seed;
    return c;
}

inline ExperimentConfig load_config(const std::string& path, std::optional<Command> command = std::nullopt,
                                    std::optional<std::uint64_t> seed = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("config: parse error in '" + path + "': " + e.what());
    }
    if (seed && j.is_object()) j["seed"] = *seed;
    return parse_config(j, command);
}

/// Everything one run writes: report.json, trace.csv, net.json and optional SVGs.
struct RunReport {
    Json report;
    std::string trace_csv = "iteration,length,norm_sq,step_dt,event\n";
    Json net;
    std::optional<std::string> net_svg;
    std::optional<Json> family;
    std::optional<std::string> family_svg;
    int exit_code = kExitPass;

    void write(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        auto put = [&](const char* name, const std::string& text) {
            std::ofstream f(dir / name, std::ios::binary);
            if (!f) throw ValidationError(std::string("cannot write ") + (dir / name).string());
            f << text;
        };
        put("report.json", report.dump(2) + "\n");
        put("trace.csv", trace_csv);
        put("net.json", net.dump(2) + "\n");
        if (net_svg) put("net.svg", *net_svg);
        if (family) put("family.json", family->dump(2) + "\n");
        if (family_svg) put("family.svg", *family_svg);
    }
};

namespace detail {

inline Json empty_net_json() {
    return {{"total_mass", 0.0}, {"residual", 0.0}, {"vertices", Json::array()}, {"edges", Json::array()}};
}

inline bool all_satisfied(const std::vector<BoundCheck>& b) {
    return std::all_of(b.begin(), b.end(), [](const BoundCheck& c) { return c.satisfied; });
}

template <RiemannianSurface M>
PolygonalCycle<M> shorten_input(const M& m, const ExperimentConfig& cfg, Rng& rng) {
    using Vec = typename M::Vec;
    Json in = cfg.input;
    if (in.is_null()) {
        if constexpr (TorusLike<M>) in = {{"kind", "generator"}};
        else in = {{"kind", "random"}};
    }
    const auto kind = in.at("kind").get<std::string>();
    if (kind == "generator") {
        if constexpr (TorusLike<M>) {
            const auto gens = m.loop_generators();
            const auto idx = in.value("index", std::size_t{0});
            if (idx >= gens.size()) throw ValidationError("config.input.index: out of range");
            const double noise = in.value("noise", 0.0);
            const auto [base, disp] = gens[idx];
            const double len = std::sqrt(m.inner(base, disp, disp));
            const std::size_t n = pieces_for(m, 2.0 * len);
            std::vector<Vec> pts;
            for (std::size_t j = 0; j <= n; ++j) {
                Vec p = m.project(Vec(base + (static_cast<double>(j) / static_cast<double>(n)) * disp));
                if (noise > 0 && j > 0 && j < n) p = exp_map(m, p, random_tangent(m, p, noise * m.inj(), rng));
                pts.push_back(p);
            }
            return build_cycle(m, {pts}, single_block(1));
        } else {
            throw ValidationError("config.input.kind: 'generator' needs a torus");
        }
    }
    if (kind == "random") {
        const auto k = in.value("k", std::size_t{1});
        const auto n = in.value("N", std::size_t{8});
        const double step = in.value("max_step", 0.2) * m.inj();
        const bool shared = in.value("shared_base", false);
        for (int attempt = 0; attempt < 64; ++attempt) {
            try {
                return random_cycle(m, rng, k, n, step, shared);
            } catch (const std::exception&) {
            }
        }
        throw NumericError("could not draw a random input cycle");
    }
    if (kind == "polygon") {
        std::vector<Vec> pts;
        for (const auto& p : in.at("points")) pts.push_back(m.project(vec_from_json<Vec>(p)));
        return closed_polygon(m, pts);
    }
    return cycle_from_json(m, in);
}

inline void trace_rows_to_json(Json& j, const std::vector<BoundCheck>& bounds) {
    Json b = Json::array();
    for (const auto& c : bounds) b.push_back(bound_to_json(c));
    j["bounds"] = std::move(b);
}

template <RiemannianSurface M>
RunReport run_shorten(const M& m, const ExperimentConfig& cfg, Rng& rng, bool svg) {
    RunReport r;
    const auto input = shorten_input(m, cfg, rng);
    const auto o = shorten(m, input, cfg.flow());
    r.report["outcome"] = outcome_to_json(o);
    r.report["input_length"] = cycle_length(input);
    trace_rows_to_json(r.report, {});
    r.trace_csv = trace_to_csv(o.trace);
    r.net = o.net ? net_to_json(*o.net) : empty_net_json();
    if (svg) r.net_svg = o.net ? render_svg(m, *o.net, {cfg.projection}) : render_svg(m, GeodesicNet<M>{}, {cfg.projection});
    r.exit_code = o.result == ShortenResult::NonConverged ? kExitFail : kExitPass;
    return r;
}

template <RiemannianSurface M>
void minmax_outputs(const M& m, const ExperimentConfig& cfg, const MinMaxReport<M>& rep, RunReport& r, bool svg) {
    r.report["outcome"] = minmax_to_json(rep);
    std::vector<TraceRow> rows;
    for (std::size_t i = 0; i < rep.round_max.size(); ++i)
        rows.push_back({static_cast<int>(i), rep.round_max[i], 0.0, 0.0, "round_max"});
    if (rep.stationary_candidate)
        rows.insert(rows.end(), rep.stationary_candidate->trace.begin(), rep.stationary_candidate->trace.end());
    r.trace_csv = trace_to_csv(rows);
    r.net = rep.certificate ? net_to_json(*rep.certificate) : empty_net_json();
    if (svg)
        r.net_svg = rep.certificate ? render_svg(m, *rep.certificate, {cfg.projection})
                                    : render_svg(m, GeodesicNet<M>{}, {cfg.projection});
}

template <RiemannianSurface M>
std::array<typename M::Vec, 4> tetra_vertices(const M& m, Rng& rng) {
    return spread_vertices(m, rng);
}

template <RiemannianSurface M>
RunReport run_minmax(const M& m, const ExperimentConfig& cfg, Rng& rng, bool svg) {
    RunReport r;
    const double tol = cfg.tol_bound > 0 ? cfg.tol_bound : 1e-2 * m.diam();
    const FlowConfig flow = cfg.flow();
    FamilyOrCertificate<M> built = [&]() -> FamilyOrCertificate<M> {
        if (cfg.family == "latitude") {
            if constexpr (SphereLike<M>) return latitude_sweepout(m, cfg.slices);
            else throw ValidationError("config.family.kind: 'latitude' needs a sphere-like manifold");
        }
        if (cfg.family == "meridian") {
            if constexpr (TorusLike<M>) return meridian_sweepout(m, cfg.slices);
            else throw ValidationError("config.family.kind: 'meridian' needs a torus");
        }
        const auto v = tetra_vertices(m, rng);
        if (cfg.family == "tetrahedron") return tetrahedron_sweepout(m, v, flow, cfg.tetra_members, cfg.cancel_members);
        return two_disc_refined_sweepout(m, v, flow, cfg.phase_members, cfg.bridge_members);
    }();
    // The tetrahedron family only carries the 8d bound; the others carry 4d.
    const double factor = cfg.family == "tetrahedron" ? 8.0 : 4.0;
    const std::string cert_row = cfg.family == "tetrahedron" ? "8d (certificate mass)" : "4d (certificate mass)";
    if (auto* found = std::get_if<ShortCycleFound<M>>(&built)) {
        MinMaxReport<M> rep;
        rep.certificate = found->net;
        rep.certificate_from_builder = true;
        rep.certificate_method = "builder";
        rep.stationary_candidate = found->outcome;
        rep.width_estimate = rep.initial_max = found->net.total_mass;
        rep.bounds.push_back({cert_row, factor * m.diam(), found->net.total_mass, tol,
                              found->net.total_mass <= factor * m.diam() + tol});
        minmax_outputs(m, cfg, rep, r, svg);
        trace_rows_to_json(r.report, rep.bounds);
        r.exit_code = all_satisfied(rep.bounds) ? kExitPass : kExitFail;
        return r;
    }
    const auto& fam = std::get<CycleFamily<M>>(built);
    auto rep = minmax(m, fam, flow, cfg.minmax_options());
    if (fam.provenance == Provenance::TetrahedronFaces) {
        rep.bounds.push_back({"8d (family max)", 8.0 * m.diam(), rep.initial_max, tol,
                              rep.initial_max <= 8.0 * m.diam() + tol});
    } else {
        rep.bounds.push_back({"4d (width)", 4.0 * m.diam(), rep.width_estimate, tol,
                              rep.width_estimate <= 4.0 * m.diam() + tol});
    }
    if (rep.certificate)
        rep.bounds.push_back({cert_row, factor * m.diam(), rep.certificate->total_mass, tol,
                              rep.certificate->total_mass <= factor * m.diam() + tol});
    minmax_outputs(m, cfg, rep, r, svg);
    trace_rows_to_json(r.report, rep.bounds);
    r.family = family_to_json(fam);
    if (svg) r.family_svg = render_svg(m, fam, {cfg.projection});
    const bool ok = all_satisfied(rep.bounds) && rep.monotone && rep.boundary_preserved;
    r.exit_code = ok ? kExitPass : kExitFail;
    return r;
}

template <RiemannianSurface M>
RunReport run_verify_t1q2(const M& m, const ExperimentConfig& cfg, Rng& rng, bool svg) {
    RunReport r;
    const auto v = tetra_vertices(m, rng);
    const auto rep = verify_theorem1_q2(m, v, cfg.flow(), cfg.minmax_options(), cfg.tol_bound, cfg.phase_members,
                                        cfg.bridge_members);
    minmax_outputs(m, cfg, rep, r, svg);
    trace_rows_to_json(r.report, rep.bounds);
    const bool ok = rep.certificate.has_value() && all_satisfied(rep.bounds);
    r.exit_code = ok ? kExitPass : kExitFail;
    return r;
}

template <RiemannianSurface M>
RunReport run_verify_pi1(const M& m, const ExperimentConfig& cfg, Rng& rng, bool svg) {
    if constexpr (TorusLike<M>) {
        RunReport r;
        const auto rep = verify_nonsimply_connected(m, cfg.flow(), rng, cfg.tol_bound);
        minmax_outputs(m, cfg, rep, r, svg);
        trace_rows_to_json(r.report, rep.bounds);
        r.exit_code = all_satisfied(rep.bounds) ? kExitPass : kExitFail;
        return r;
    } else {
        (void)m, (void)cfg, (void)rng, (void)svg;
        throw ValidationError("verify-pi1 needs a manifold with nontrivial fundamental group (a torus)");
    }
}

struct GradCheckSample {
    double length = 0.0;
    double norm_sq = 0.0;
    double identity_error = 0.0;  // |first_variation + |v|^2| / |v|^2
    double fd_error = 0.0;        // |central difference - first_variation| / |first_variation|
};

/// First-variation identity and finite-difference agreement on one cycle.
template <RiemannianSurface M>
GradCheckSample gradcheck_cycle(const M& m, const PolygonalCycle<M>& c, double h) {
    GradCheckSample s;
    const auto dv = deformation_vector(m, c);
    const auto field = dv.per_vertex(c.vertices.size());
    const double fv = first_variation(m, c, field);
    const double fd = length_derivative_fd(m, c, field, h);
    s.length = cycle_length(c);
    s.norm_sq = dv.norm_sq;
    const double scale = std::max(dv.norm_sq, 1e-300);
    s.identity_error = std::abs(fv + dv.norm_sq) / scale;
    s.fd_error = std::abs(fd - fv) / std::max(std::abs(fv), 1e-300);
    return s;
}

template <RiemannianSurface M>
RunReport run_gradcheck(const M& m, const ExperimentConfig& cfg, Rng& rng) {
    RunReport r;
    std::vector<TraceRow> rows;
    double max_identity = 0.0, max_fd = 0.0;
    std::size_t done = 0, attempts = 0;
    while (done < cfg.gradcheck_cycles) {
        if (++attempts > 20 * cfg.gradcheck_cycles) throw NumericError("gradcheck: could not draw enough cycles");
        const std::size_t k = 1 + static_cast<std::size_t>(uniform(rng, 0.0, 3.0));
        const bool shared = uniform(rng) < 0.5;
        GradCheckSample s;
        try {
            const auto c = random_cycle(m, rng, k, 6, 0.2 * m.inj(), shared);
            s = gradcheck_cycle(m, c, cfg.gradcheck_h * m.diam());
        } catch (const std::exception&) {
            continue;
        }
        if (s.norm_sq < 1e-12) continue;
        max_identity = std::max(max_identity, s.identity_error);
        max_fd = std::max(max_fd, s.fd_error);
        rows.push_back({static_cast<int>(done), s.length, s.norm_sq, cfg.gradcheck_h, "gradcheck"});
        ++done;
    }
    std::vector<BoundCheck> bounds{
        {"first variation = -|v|^2 (relative)", 1e-6, max_identity, 0.0, max_identity <= 1e-6},
        {"central difference (relative)", 1e-4, max_fd, 0.0, max_fd <= 1e-4}};
    r.report["outcome"] = {{"cycles", done},
                           {"max_identity_error", max_identity},
                           {"max_fd_error", max_fd},
                           {"h", cfg.gradcheck_h}};
    trace_rows_to_json(r.report, bounds);
    r.trace_csv = trace_to_csv(rows);
    r.net = empty_net_json();
    r.exit_code = all_satisfied(bounds) ? kExitPass : kExitFail;
    return r;
}

}  // namespace detail

/// Runs the configured command. Numeric failures are reported in the returned
/// report (exit code 3); invalid configurations throw ValidationError.
inline RunReport run(const ExperimentConfig& cfg, bool svg = false) {
    const AnyManifold any = make_manifold(cfg.manifold);
    Rng rng(cfg.seed);
    RunReport r;
    try {
        r = std::visit(
            [&](const auto& m) -> RunReport {
                switch (cfg.command) {
                    case Command::Shorten: return detail::run_shorten(m, cfg, rng, svg);
                    case Command::MinMax: return detail::run_minmax(m, cfg, rng, svg);
                    case Command::VerifyT1Q2: return detail::run_verify_t1q2(m, cfg, rng, svg);
                    case Command::VerifyPi1: return detail::run_verify_pi1(m, cfg, rng, svg);
                    case Command::GradCheck: return detail::run_gradcheck(m, cfg, rng);
                }
                throw ValidationError("unknown command");
            },
            any);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        r = RunReport{};
        r.report["outcome"] = nullptr;
        r.report["error"] = e.what();
        r.report["bounds"] = Json::array();
        r.net = detail::empty_net_json();
        r.exit_code = kExitNumeric;
    }
    Json full;
    full["schema_version"] = kSchemaVersion;
    full["command"] = to_string(cfg.command);
    full["seed"] = cfg.seed;
    full["config"] = cfg.raw;
    full["manifold"] = {{"kind", std::visit([](const auto& m) { return std::string(m.kind_name()); }, any)},
                        {"inj", std::visit([](const auto& m) { return m.inj(); }, any)},
                        {"diam", std::visit([](const auto& m) { return m.diam(); }, any)}};
    full["pass"] = r.exit_code == kExitPass;
    full["exit_code"] = r.exit_code;
    for (auto it = r.report.begin(); it != r.report.end(); ++it) full[it.key()] = it.value();
    r.report = std::move(full);
    return r;
}

}  // namespace geonet
