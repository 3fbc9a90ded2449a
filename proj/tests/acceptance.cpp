// Acceptance checks AC1-AC10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "geonet/experiment.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace geonet;
using Json = nlohmann::ordered_json;
using V2 = Eigen::Vector2d;
using V3 = Eigen::Vector3d;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

const fs::path& scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "geonet_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct CliRun {
    int exit_code = -1;
    double seconds = 0.0;
    Json report;
    fs::path out;
};

CliRun run_cli(const std::string& sub, const std::string& config, const std::string& tag) {
    CliRun r;
    r.out = scratch() / tag;
    const std::string cmd = std::string(GEONET_CLI_PATH) + " " + sub + " --config " + GEONET_CONFIG_DIR + "/" +
                            config + " --out " + r.out.string() + " 2> " + (scratch() / (tag + ".log")).string();
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(r.out / "report.json");
    if (in) r.report = Json::parse(in);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

template <class F>
void for_each_builtin(F&& f) {
    f(RoundSphere());
    f(Ellipsoid(1.0, 1.05, 1.1));
    f(ConformalSphere(1.0, {{1, 0, 0.03}, {2, 2, 0.015}}));
    f(FlatTorus());
    f(TorusOfRevolution(2.0, 0.5));
}

// ------------------------------------------------------------------ checks

Verdict ac1() {
    const auto r = run_cli("verify-t1q2", "sphere_t1q2.json", "ac1");
    if (r.report.is_null() || !r.report["outcome"].is_object()) return {false, "no report (exit " + std::to_string(r.exit_code) + ")"};
    const double mass = r.report["outcome"]["stationary_candidate"]["total_mass"].get<double>();
    const bool ok = r.exit_code == 0 && std::abs(mass - 2 * kPi) <= 0.01 * 2 * kPi && mass <= 4 * kPi &&
                    r.seconds <= 120.0;
    return {ok, "certificate mass " + fmt(mass) + " (2pi = " + fmt(2 * kPi) + ", 4d = " + fmt(4 * kPi) + "), " +
                    fmt(r.seconds) + " s"};
}

Verdict ac2() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"ellipsoid_t1q2", "conformal_t1q2"}) {
        const auto r = run_cli("verify-t1q2", std::string(name) + ".json", std::string("ac2_") + name);
        if (r.report.is_null() || !r.report["outcome"].is_object()) {
            ok = false;
            detail += std::string(name) + ": no report; ";
            continue;
        }
        const auto& cert = r.report["outcome"]["stationary_candidate"];
        const double d = r.report["manifold"]["diam"].get<double>();
        const double mass = cert["total_mass"].get<double>();
        const double residual = cert["residual"].get<double>();
        const bool this_ok = r.exit_code == 0 && residual <= 1e-4 && mass <= 4 * d + 1e-2 * d && mass > 0;
        ok = ok && this_ok;
        detail += std::string(name) + ": mass " + fmt(mass) + " <= " + fmt(4 * d + 1e-2 * d) + ", residual " +
                  fmt(residual) + ", " + fmt(r.seconds) + " s; ";
    }
    return {ok, detail};
}

Verdict ac3() {
    const auto r = run_cli("shorten", "torus_shorten.json", "ac3");
    if (r.report.is_null() || !r.report["outcome"].is_object()) return {false, "no report"};
    const double len = r.report["outcome"]["final_length"].get<double>();
    const std::string result = r.report["outcome"]["result"].get<std::string>();
    const bool ok = r.exit_code == 0 && result == "Stationary" && std::abs(len - 1.0) <= 1e-4 &&
                    len <= std::sqrt(2.0) && r.seconds <= 10.0;
    return {ok, result + " length " + fmt(len) + ", " + fmt(r.seconds) + " s"};
}

Verdict ac4() {
    Rng rng(2024);
    std::size_t count = 0;
    double max_id = 0.0, max_fd = 0.0;
    for_each_builtin([&](const auto& m) {
        std::size_t done = 0;
        while (done < 50) {
            const std::size_t k = 1 + done % 3;
            detail::GradCheckSample s;
            try {
                const auto c = random_cycle(m, rng, k, 6, 0.2 * m.inj(), done % 2 == 1);
                s = detail::gradcheck_cycle(m, c, 1e-6 * m.diam());
            } catch (const std::exception&) {
                continue;
            }
            if (s.norm_sq < 1e-12) continue;
            max_id = std::max(max_id, s.identity_error);
            max_fd = std::max(max_fd, s.fd_error);
            ++done;
        }
        count += done;
    });
    const bool ok = count >= 200 && max_id <= 1e-6 && max_fd <= 1e-4;
    return {ok, std::to_string(count) + " cycles, max identity error " + fmt(max_id) + ", max central-difference error " +
                    fmt(max_fd)};
}

Verdict ac5() {
    Rng rng(5150);
    std::size_t count = 0, violations = 0, failures = 0;
    double worst = -1e300;
    for_each_builtin([&](const auto& m) {
        std::size_t done = 0;
        while (done < 110) {
            const std::size_t k = 1 + done % 3;
            const double step = uniform(rng, 0.05, 0.25) * m.inj();
            PolygonalCycle<std::decay_t<decltype(m)>> c;
            try {
                c = random_cycle(m, rng, k, 4 + done % 6, step, done % 2 == 0);
            } catch (const std::exception&) {
                continue;
            }
            int N = 1;
            for (const auto& ch : c.chains) N = std::max(N, choose_N(ch.length(), m.inj()));
            ++done;
            try {
                const auto b = birkhoff_step(m, c, N);
                const double excess = (cycle_length(b) - cycle_length(c)) / m.diam();
                worst = std::max(worst, excess);
                if (excess > 1e-9) ++violations;
            } catch (const std::exception&) {
                ++failures;
            }
        }
        count += done;
    });
    RoundSphere s;
    const V3 e1 = V3(1, 2, 3).normalized();
    const V3 e2 = e1.cross(V3(0, 0, 1)).normalized();
    const auto gc = closed_polygon(s, fixtures::great_circle_points(24, e1, e2));
    const auto b = birkhoff_step(s, gc, choose_N(gc.chains[0].length(), s.inj()));
    double drift = 0.0;
    for (const auto& v : b.vertices) drift = std::max(drift, std::abs(v.norm() - 1.0) + std::abs(v.dot(e1.cross(e2))));
    const double dlen = std::abs(cycle_length(b) - 2 * kPi);
    const bool ok = count >= 500 && violations == 0 && failures == 0 && drift <= 1e-8 && dlen <= 1e-8;
    return {ok, std::to_string(count) + " cycles, " + std::to_string(violations) + " increases, " +
                    std::to_string(failures) + " errors, worst relative change " + fmt(worst) +
                    "; great circle drift " + fmt(drift) + ", length change " + fmt(dlen)};
}

Verdict ac6() {
    const TorusOfRevolution t(2.0, 0.5);
    const double alpha = fixtures::symmetric_loop_angle(t);
    const auto fig = fixtures::torus_figure_eight(t, alpha, 32);
    const auto tilted = fixtures::torus_figure_eight(t, alpha, 32, 1e-2);
    const double n0 = std::sqrt(deformation_vector(t, fig).norm_sq);
    const double n1 = std::sqrt(deformation_vector(t, tilted).norm_sq);
    const bool ok = n0 <= 1e-8 && n1 >= 1e-3;
    return {ok, "figure-eight |v| " + fmt(n0) + ", tilted by 1e-2 rad |v| " + fmt(n1)};
}

Verdict ac7() {
    RoundSphere s;
    const auto fam = latitude_sweepout(s, 65);
    MinMaxOptions opt;
    opt.rounds = 40;
    const auto rep = minmax(s, fam, {}, opt);
    bool monotone = true;
    for (std::size_t i = 1; i < rep.round_max.size(); ++i)
        monotone = monotone && rep.round_max[i] <= rep.round_max[i - 1] + 1e-12;
    const bool ok = fam.members.size() == 65 && std::abs(rep.width_estimate - 2 * kPi) <= 0.01 * 2 * kPi &&
                    rep.monotone && monotone;
    return {ok, std::to_string(fam.members.size()) + " members, width " + fmt(rep.width_estimate) + " over " +
                    std::to_string(rep.round_max.size() - 1) + " rounds, monotone " + (monotone ? "yes" : "no")};
}

Verdict ac8() {
    std::map<int, int> plus, minus;
    for (int f = 0; f < 4; ++f)
        for (int j = 0; j < 3; ++j) (kFaceSigns[f][j] > 0 ? plus : minus)[kFaceEdges[f][j]]++;
    int pairs = 0;
    for (int e = 0; e < 6; ++e) pairs += plus[e] == 1 && minus[e] == 1;

    bool ok = pairs == 6;
    std::string detail = std::to_string(pairs) + " cancelling pairs; ";
    Rng rng(88);
    auto check = [&](const auto& m) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto v = spread_vertices(m, rng);
            const auto r = tetrahedron_sweepout(m, v);
            using Fam = CycleFamily<std::decay_t<decltype(m)>>;
            if (!std::holds_alternative<Fam>(r)) {
                ok = false;
                detail += std::string(m.kind_name()) + ": no family; ";
                return;
            }
            double mx = 0.0;
            for (const auto& c : std::get<Fam>(r).members) mx = std::max(mx, cycle_length(c));
            const double bound = 8 * m.diam() + 1e-2 * m.diam();
            ok = ok && mx <= bound;
            if (trial == 0) detail += std::string(m.kind_name()) + " max " + fmt(mx) + " <= " + fmt(bound) + "; ";
        }
    };
    check(RoundSphere());
    check(Ellipsoid(1.0, 1.05, 1.1));
    check(ConformalSphere(1.0, {{1, 0, 0.03}, {2, 2, 0.015}}));
    return {ok, detail};
}

Verdict ac9() {
    const FlatTorus t(10.0 * Eigen::Matrix2d::Identity());
    const double radius = 0.24 * t.inj();
    Rng rng(909);
    std::size_t collapsed = 0, total = 0;
    std::map<std::string, int> other;
    for (int i = 0; i < 120; ++i) {
        const V2 center(uniform(rng, 0.0, 10.0), uniform(rng, 0.0, 10.0));
        const int n = 3 + i % 10;
        std::vector<std::pair<double, V2>> pts;
        for (int j = 0; j < n; ++j) {
            const double a = uniform(rng, 0.0, 2 * kPi);
            const double r = radius * std::sqrt(uniform(rng));
            pts.push_back({a, V2(r * std::cos(a), r * std::sin(a))});
        }
        // Half star-shaped polygons, half in random order (self-intersecting).
        if (i % 2 == 0) std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        std::vector<V2> poly;
        for (const auto& [a, p] : pts) poly.push_back(t.project(V2(center + p)));
        ++total;
        try {
            const auto out = shorten(t, closed_polygon(t, poly));
            if (out.result == ShortenResult::Collapsed) ++collapsed;
            else ++other[to_string(out.result)];
        } catch (const std::exception& e) {
            ++other[e.what()];
        }
    }
    std::string detail = std::to_string(collapsed) + "/" + std::to_string(total) + " collapsed in discs of radius " +
                         fmt(radius) + " (inj " + fmt(t.inj()) + ")";
    for (const auto& [k, v] : other) detail += "; " + k + ": " + std::to_string(v);
    return {total >= 100 && collapsed == total, detail};
}

Verdict ac10() {
    bool ok = true;
    std::string detail;
    const std::pair<const char*, const char*> runs[] = {
        {"shorten", "torus_shorten.json"}, {"minmax", "sphere_latitude.json"}, {"gradcheck", "gradcheck_ellipsoid.json"}};
    for (const auto& [sub, cfg] : runs) {
        const auto a = run_cli(sub, cfg, std::string("ac10a_") + sub);
        const auto b = run_cli(sub, cfg, std::string("ac10b_") + sub);
        bool same = a.exit_code == 0 && b.exit_code == 0;
        for (const char* f : {"report.json", "trace.csv", "net.json"}) {
            const auto x = slurp(a.out / f);
            same = same && !x.empty() && x == slurp(b.out / f);
        }
        ok = ok && same;
        detail += std::string(sub) + (same ? " identical; " : " differs; ");
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Verdict()>> checks[] = {
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
    int failed = 0;
    for (const auto& [name, fn] : checks) {
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << name << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
