#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "geonet/random.hpp"
#include "geonet/sweepout.hpp"

using namespace geonet;
using V3 = Eigen::Vector3d;
using V2 = Eigen::Vector2d;

namespace {

std::array<V3, 4> regular_tetrahedron() {
    const double s = 1.0 / std::sqrt(3.0);
    return {V3(s, s, s), V3(s, -s, -s), V3(-s, s, -s), V3(-s, -s, s)};
}

template <class M>
double max_length(const CycleFamily<M>& fam) {
    double mx = 0.0;
    for (const auto& c : fam.members) mx = std::max(mx, cycle_length(c));
    return mx;
}

}  // namespace

// ------------------------------------------------------- latitude_sweepout

TEST(Latitude, RoundSphereWidestMemberIsEquator) {
    RoundSphere s;
    const auto fam = latitude_sweepout(s, 65);
    EXPECT_EQ(fam.members.size(), 65u);
    EXPECT_EQ(fam.boundary, BoundaryCondition::ClosedLoopInCycleSpace);
    EXPECT_NEAR(max_length(fam), 2 * kPi, 1e-3);
    EXPECT_LE(cycle_length(fam.members.front()), 1e-4 * s.diam());
    EXPECT_LE(cycle_length(fam.members.back()), 1e-4 * s.diam());
    for (const auto& c : fam.members) EXPECT_EQ(c.k(), 1u);
}

TEST(Latitude, ThreeSlicesIsCapEquatorCap) {
    RoundSphere s;
    const auto fam = latitude_sweepout(s, 3);
    ASSERT_EQ(fam.members.size(), 3u);
    EXPECT_NEAR(cycle_length(fam.members[1]), 2 * kPi, 1e-3);
    EXPECT_LE(cycle_length(fam.members[0]), 1e-12);
    EXPECT_THROW(latitude_sweepout(s, 1), PreconditionError);
}

TEST(Latitude, ProlateEllipsoidWaistIsUnitCircle) {
    Ellipsoid e(1, 1, 1.2);
    EXPECT_NEAR(max_length(latitude_sweepout(e, 65)), 2 * kPi, 1e-2);
}

// ---------------------------------------------------- tetrahedron_sweepout

TEST(Tetrahedron, SignTablePairsEveryEdgeWithBothOrientations) {
    std::map<int, int> plus, minus;
    for (int f = 0; f < 4; ++f)
        for (int j = 0; j < 3; ++j) (kFaceSigns[f][j] > 0 ? plus : minus)[kFaceEdges[f][j]]++;
    for (int e = 0; e < 6; ++e) {
        EXPECT_EQ(plus[e], 1) << "edge " << e + 1;
        EXPECT_EQ(minus[e], 1) << "edge " << e + 1;
    }
    // Each face is a closed path: the end vertex of each side is the start of the next.
    for (int f = 0; f < 4; ++f) {
        for (int j = 0; j < 3; ++j) {
            const auto& a = kTetraEdges[kFaceEdges[f][j]];
            const auto& b = kTetraEdges[kFaceEdges[f][(j + 1) % 3]];
            const int a_end = kFaceSigns[f][j] > 0 ? a[1] : a[0];
            const int b_start = kFaceSigns[f][(j + 1) % 3] > 0 ? b[0] : b[1];
            EXPECT_EQ(a_end, b_start) << "face " << f + 1;
        }
    }
}

TEST(Tetrahedron, RegularTetrahedronOnSphereStaysBelowEightD) {
    RoundSphere s;
    const auto r = tetrahedron_sweepout(s, regular_tetrahedron());
    ASSERT_TRUE(std::holds_alternative<CycleFamily<RoundSphere>>(r));
    const auto& fam = std::get<CycleFamily<RoundSphere>>(r);
    EXPECT_LE(max_length(fam), 8 * s.diam() + 1e-2 * s.diam());
    EXPECT_LE(cycle_length(fam.members.front()), 1e-4 * s.diam());
    ASSERT_TRUE(fam.union_member.has_value());
    const auto& u = fam.members[*fam.union_member];
    EXPECT_EQ(u.k(), 12u);
    // Six regular-tetrahedron edges, each traversed twice.
    const double edge = std::acos(-1.0 / 3.0);
    EXPECT_NEAR(cycle_length(u), 12 * edge, 1e-9);
    const auto net = project_to_net(s, u, u.merge_tol);
    EXPECT_EQ(net.edges.size(), 6u);
    for (const auto& e : net.edges) EXPECT_EQ(e.multiplicity, 2);
    // The cancellation members shrink the six pairs to points.
    EXPECT_LE(cycle_length(fam.members.back()), 1e-9);
}

TEST(Tetrahedron, NearlyAntipodalEdgeFaceStillContracts) {
    // With these spread vertices one side of face 3 shrinks to the constant-segment
    // threshold before the face is short enough to count as collapsed.
    RoundSphere s;
    Rng rng(88);
    spread_vertices(s, rng);
    const auto v = spread_vertices(s, rng);
    const auto t = make_tetrahedron(s, v);
    FlowConfig cfg;
    cfg.max_outer_iters = 200;
    EXPECT_EQ(shorten(s, face_cycle(s, t, 2), cfg).result, ShortenResult::NonConverged);
    cfg.merge_and_restart = true;
    const auto o = shorten(s, face_cycle(s, t, 2), cfg);
    EXPECT_EQ(o.result, ShortenResult::Collapsed);
    EXPECT_TRUE(std::any_of(o.trace.begin(), o.trace.end(), [](const TraceRow& r) { return r.event == "merge_restart"; }));
    const auto r = tetrahedron_sweepout(s, v);
    ASSERT_TRUE(std::holds_alternative<CycleFamily<RoundSphere>>(r));
    EXPECT_LE(max_length(std::get<CycleFamily<RoundSphere>>(r)), 8 * s.diam() + 1e-2 * s.diam());
}

TEST(Tetrahedron, AllVerticesEqualGivesZeroMembers) {
    RoundSphere s;
    const V3 p(0, 0, 1);
    const auto r = tetrahedron_sweepout(s, {p, p, p, p}, {}, 5, 2);
    ASSERT_TRUE(std::holds_alternative<CycleFamily<RoundSphere>>(r));
    for (const auto& c : std::get<CycleFamily<RoundSphere>>(r).members) EXPECT_EQ(cycle_length(c), 0.0);
}

TEST(Tetrahedron, FlatDiscMaximumIsTheFourPerimeters) {
    FlatTorus t((Eigen::Matrix2d() << 10, 0, 0, 10).finished());
    const std::array<V2, 4> v{V2(1, 1), V2(1.4, 1), V2(1.1, 1.5), V2(1.25, 1.2)};
    double perimeters = 0.0;
    for (int f = 0; f < 4; ++f)
        for (int j = 0; j < 3; ++j) {
            const auto& e = kTetraEdges[kFaceEdges[f][j]];
            perimeters += (v[e[0]] - v[e[1]]).norm();
        }
    const auto r = tetrahedron_sweepout(t, v);
    ASSERT_TRUE(std::holds_alternative<CycleFamily<FlatTorus>>(r));
    EXPECT_NEAR(max_length(std::get<CycleFamily<FlatTorus>>(r)), perimeters, 1e-9);
}

// ---------------------------------------------------- two_disc_refined_sweepout

TEST(Refined, AtMostTwoCurvesBelowFourD) {
    RoundSphere s;
    const auto r = two_disc_refined_sweepout(s, regular_tetrahedron());
    ASSERT_TRUE(std::holds_alternative<CycleFamily<RoundSphere>>(r));
    const auto& fam = std::get<CycleFamily<RoundSphere>>(r);
    for (const auto& c : fam.members) EXPECT_LE(c.k(), 2u);
    EXPECT_LE(max_length(fam), 4 * s.diam() + 1e-2 * s.diam());
    EXPECT_LE(cycle_length(fam.members.front()), 1e-4 * s.diam());
    EXPECT_LE(cycle_length(fam.members.back()), 1e-4 * s.diam());
}

TEST(Refined, ObtuseConfigurationOnEllipsoid) {
    Ellipsoid e(1, 1.05, 1.1);
    const std::array<V3, 4> v{V3(1, 0, 0), V3(0, 1, 0.2), V3(-0.3, 0.1, 1), V3(0.2, -1, -0.4)};
    const auto r = two_disc_refined_sweepout(e, v);
    ASSERT_TRUE(std::holds_alternative<CycleFamily<Ellipsoid>>(r));
    EXPECT_LE(max_length(std::get<CycleFamily<Ellipsoid>>(r)), 4 * e.diam() + 1e-2 * e.diam());
}

// ------------------------------------------------------------------ minmax

TEST(MinMax, LatitudeFamilyWidthIsGreatCircle) {
    RoundSphere s;
    MinMaxOptions opt;
    opt.rounds = 8;
    const auto rep = minmax(s, latitude_sweepout(s, 65), {}, opt);
    EXPECT_NEAR(rep.width_estimate, 2 * kPi, 0.01 * 2 * kPi);
    EXPECT_TRUE(rep.monotone);
    EXPECT_TRUE(rep.boundary_preserved);
    EXPECT_LE(rep.width_estimate, rep.initial_max);
    for (std::size_t i = 1; i < rep.round_max.size(); ++i)
        EXPECT_LE(rep.round_max[i], rep.round_max[i - 1] + 1e-9 * s.diam());
    ASSERT_TRUE(rep.certificate.has_value());
    EXPECT_NEAR(rep.certificate->total_mass, 2 * kPi, 1e-6);
    EXPECT_LE(rep.certificate->residual, 2e-5);
}

TEST(MinMax, TinyCirclesPullDownToZero) {
    RoundSphere s;
    CycleFamily<RoundSphere> fam;
    for (int i = 0; i < 5; ++i) {
        std::vector<V3> pts;
        const double r = 0.02 * (1 + i % 3);
        for (int j = 0; j < 6; ++j) {
            const double a = 2 * kPi * j / 6;
            pts.push_back(V3(r * std::cos(a), r * std::sin(a), 1.0).normalized());
        }
        fam.members.push_back(closed_polygon(s, pts));
    }
    MinMaxOptions opt;
    opt.rounds = 10;
    const auto rep = minmax(s, fam, {}, opt);
    EXPECT_LT(rep.width_estimate, 1e-2);
    EXPECT_FALSE(rep.certificate.has_value());
}

TEST(MinMax, MeridianFamilyOnFlatTorusFindsSystole) {
    FlatTorus t;
    MinMaxOptions opt;
    opt.rounds = 4;
    const auto rep = minmax(t, meridian_sweepout(t, 9), {}, opt);
    EXPECT_NEAR(rep.width_estimate, 1.0, 1e-3);
    ASSERT_TRUE(rep.certificate.has_value());
    EXPECT_NEAR(rep.certificate->total_mass, 1.0, 1e-4);
}

TEST(MinMax, MemberCountAndChainCountPreserved) {
    RoundSphere s;
    MinMaxOptions opt;
    opt.rounds = 3;
    const auto fam = latitude_sweepout(s, 9);
    const auto rep = minmax(s, fam, {}, opt);
    EXPECT_EQ(rep.round_max.size(), 4u);
    EXPECT_LT(rep.achiever, fam.members.size());
}

// ----------------------------------------------------------- verification

TEST(Verify, RoundSphereCertificateIsGreatCircle) {
    RoundSphere s;
    Rng rng(42);
    const auto rep = verify_theorem1_q2(s, spread_vertices(s, rng));
    ASSERT_TRUE(rep.certificate.has_value());
    EXPECT_NEAR(rep.certificate->total_mass, 2 * kPi, 0.01 * 2 * kPi);
    ASSERT_EQ(rep.bounds.size(), 2u);
    for (const auto& b : rep.bounds) {
        EXPECT_TRUE(b.satisfied) << b.name;
        EXPECT_DOUBLE_EQ(b.bound, 4 * kPi);
    }
}

TEST(Verify, FlatToriClosedGeodesicBelowTwoD) {
    Rng rng(3);
    FlatTorus unit;
    auto rep = verify_nonsimply_connected(unit, {}, rng);
    ASSERT_TRUE(rep.certificate.has_value());
    EXPECT_NEAR(rep.width_estimate, 1.0, 1e-4);
    EXPECT_TRUE(rep.bounds.at(0).satisfied);
    EXPECT_NEAR(rep.bounds.at(0).bound, std::sqrt(2.0), 1e-15);

    FlatTorus tall((Eigen::Matrix2d() << 1, 0, 0, 3).finished());
    rep = verify_nonsimply_connected(tall, {}, rng);
    ASSERT_TRUE(rep.certificate.has_value());
    EXPECT_NEAR(rep.width_estimate, 1.0, 1e-4);
    EXPECT_NEAR(rep.bounds.at(0).bound, std::sqrt(10.0), 1e-15);
    EXPECT_TRUE(rep.bounds.at(0).satisfied);
}

TEST(Verify, TorusOfRevolutionParallelSlidesToInnerEquator) {
    TorusOfRevolution t(2.0, 0.5);
    const auto gens = t.loop_generators();
    std::vector<V2> pts;
    for (int j = 0; j < 24; ++j) pts.push_back(t.project(gens[0].first + gens[0].second * (j / 24.0)));
    const auto out = shorten(t, closed_polygon(t, pts));
    ASSERT_EQ(out.result, ShortenResult::Stationary);
    EXPECT_NEAR(out.final_length, 3 * kPi, 1e-3);

    Rng rng(5);
    const auto rep = verify_nonsimply_connected(t, {}, rng);
    ASSERT_TRUE(rep.certificate.has_value());
    // The meridian (length 2 pi r = pi) is the shorter of the two generator geodesics.
    EXPECT_NEAR(rep.width_estimate, kPi, 1e-3);
    EXPECT_TRUE(rep.bounds.at(0).satisfied);
}
