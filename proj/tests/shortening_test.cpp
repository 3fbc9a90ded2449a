#include <cmath>

#include <gtest/gtest.h>

#include "geonet/deformation.hpp"
#include "geonet/random.hpp"
#include "geonet/shorten.hpp"
#include "test_support.hpp"

using namespace geonet;
using geonet::fixtures::great_circle_points;
using V3 = Eigen::Vector3d;
using V2 = Eigen::Vector2d;

namespace {

PolygonalCycle<FlatTorus> torus_square(const FlatTorus& t, double side) {
    return closed_polygon(t, {V2(0, 0), V2(side, 0), V2(side, side), V2(0, side)});
}

double max_vertex_gap(const auto& m, const auto& a, const auto& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.vertices.size(); ++i)
        d = std::max(d, m.displacement(a.vertices[i], b.vertices[i]).norm());
    return d;
}

}  // namespace

// ---------------------------------------------------------------- choose_N

TEST(ChooseN, FormulaExamples) {
    EXPECT_EQ(choose_N(4 * kPi, kPi), 17);
    EXPECT_EQ(choose_N(kPi / 8, kPi), 1);
    EXPECT_EQ(choose_N(kPi, kPi), 5);
    EXPECT_THROW(choose_N(0.0, 1.0), PreconditionError);
}

// ------------------------------------------------------------ birkhoff_step

TEST(Birkhoff, GreatCircleIsFixedPoint) {
    RoundSphere s;
    const auto c = closed_polygon(s, great_circle_points(8));
    const auto b = birkhoff_step(s, c, 8);
    EXPECT_LT(max_vertex_gap(s, c, b), 1e-8);
    EXPECT_NEAR(cycle_length(b), cycle_length(c), 1e-12);
}

TEST(Birkhoff, ConstantCycleStaysConstant) {
    RoundSphere s;
    const auto c = constant_cycle(s, V3(0, 0, 1), 2, 4);
    const auto b = birkhoff_step(s, c, 4);
    EXPECT_EQ(cycle_length(b), 0.0);
    for (const auto& v : b.vertices) EXPECT_LT((v - V3(0, 0, 1)).norm(), 1e-15);
}

TEST(Birkhoff, ZigzagGetsStrictlyShorter) {
    RoundSphere s;
    std::vector<V3> pts;
    for (int i = 0; i < 12; ++i) {
        const double a = 2 * kPi * i / 12;
        pts.push_back(V3(std::cos(a), std::sin(a), i % 2 ? 0.05 : -0.05).normalized());
    }
    const auto c = closed_polygon(s, pts);
    // 9 subdivision points miss the zigzag corners, so the inscribed polygon is shorter.
    const auto b = birkhoff_step(s, c, 9);
    EXPECT_LT(cycle_length(b), cycle_length(c) - 1e-3);
}

TEST(Birkhoff, KeepsMultiplePointsAndNeverLengthens) {
    Rng rng(31);
    auto check = [&](const auto& m) {
        for (int i = 0; i < 30; ++i) {
            const auto c = random_cycle(m, rng, 1 + i % 3, 6, 0.2 * m.inj(), i % 2 == 0);
            int N = 1;
            for (const auto& ch : c.chains) N = std::max(N, choose_N(ch.length(), m.inj()));
            const auto b = birkhoff_step(m, c, N);
            EXPECT_LE(cycle_length(b), cycle_length(c) + 1e-9 * m.diam()) << m.kind_name();
            EXPECT_EQ(b.type.endpoint_block, c.type.endpoint_block);
            for (std::size_t v = 0; v < c.num_blocks(); ++v) EXPECT_EQ(b.vertices[v], c.vertices[v]);
        }
    };
    check(RoundSphere());
    check(Ellipsoid(1, 1.05, 1.1));
    check(ConformalSphere(1.0, {{1, 0, 0.05}}));
    check(FlatTorus());
    check(TorusOfRevolution(2.0, 0.5));
}

TEST(Birkhoff, ChainTooLongAsksForLargerN) {
    RoundSphere s;
    const auto c = closed_polygon(s, great_circle_points(8));
    try {
        birkhoff_step(s, c, 2);
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("increase N"), std::string::npos);
    }
}

// ------------------------------------------------------- deformation_vector

TEST(DeformationVector, GreatCirclePolygonIsStationary) {
    RoundSphere s;
    const auto c = closed_polygon(s, great_circle_points(10, V3(1, 0, 0), V3(0, 0.6, 0.8)));
    const auto dv = deformation_vector(s, c);
    for (const auto& w : dv.per_vertex(c.vertices.size())) EXPECT_LE(w.norm(), 1e-6);
    EXPECT_LE(dv.norm_sq, 1e-20);
}

TEST(DeformationVector, RightAngleCornerHasNormSqrtTwo) {
    FlatTorus t;
    const auto c = torus_square(t, 0.2);
    const auto dv = deformation_vector(t, c);
    const auto field = dv.per_vertex(c.vertices.size());
    for (const auto& w : field) EXPECT_NEAR(w.norm(), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(field[0].x(), 1.0, 1e-12);
    EXPECT_NEAR(field[0].y(), 1.0, 1e-12);
    EXPECT_NEAR(dv.norm_sq, 8.0, 1e-12);
}

TEST(DeformationVector, BalancedFigureEightIsStationaryAndTiltIsDetected) {
    TorusOfRevolution t(2.0, 0.5);
    const double alpha = fixtures::symmetric_loop_angle(t);
    const auto c = fixtures::torus_figure_eight(t, alpha, 32);
    EXPECT_LE(deformation_vector(t, c).norm_sq, 1e-10);
    const auto p = fixtures::torus_figure_eight(t, alpha, 32, 1e-2);
    EXPECT_GE(std::sqrt(deformation_vector(t, p).norm_sq), 1e-3);
}

TEST(DeformationVector, CoincidentDoublePointsFormOneCluster) {
    // A closed chain that pauses (constant segment) at a double point.
    RoundSphere s;
    const auto g = great_circle_points(6);
    const auto c = closed_polygon(s, {g[0], g[1], g[2], g[2], g[3], g[4], g[5]});
    const auto dv = deformation_vector(s, c);
    const auto field = dv.per_vertex(c.vertices.size());
    const auto& ids = c.chains[0].vertex_ids;
    EXPECT_EQ(field[ids[2]], field[ids[3]]);
    bool found = false;
    for (const auto& cl : dv.clusters)
        if (cl.vertex_ids.size() == 2) found = true;
    EXPECT_TRUE(found);
    EXPECT_LE(dv.norm_sq, 1e-20);
}

TEST(DeformationVector, NegligibleClusterAdoptsBlockComponent) {
    // The first segment is constant, so the first double point is glued to the base point.
    FlatTorus t;
    const auto c = closed_polygon(t, {V2(0, 0), V2(0, 0), V2(0.2, 0), V2(0.2, 0.2), V2(0, 0.2)});
    const auto dv = deformation_vector(t, c);
    const auto field = dv.per_vertex(c.vertices.size());
    EXPECT_EQ(field[c.chains[0].vertex_ids[1]], field[0]);
    bool negligible = false;
    for (const auto& cl : dv.clusters) negligible = negligible || cl.negligible;
    EXPECT_TRUE(negligible);
    // Three remaining corners of norm sqrt(2) plus the block.
    EXPECT_NEAR(dv.norm_sq, 8.0, 1e-12);
}

// -------------------------------------------------------- first_variation

TEST(FirstVariation, EqualsMinusNormSquaredOnRandomCycles) {
    Rng rng(77);
    auto check = [&](const auto& m) {
        for (int i = 0; i < 20; ++i) {
            const auto c = random_cycle(m, rng, 1 + i % 3, 6, 0.2 * m.inj(), i % 2 == 1);
            const auto dv = deformation_vector(m, c);
            const double fv = first_variation(m, c, dv);
            EXPECT_LE(std::abs(fv + dv.norm_sq), 1e-6 * dv.norm_sq) << m.kind_name();
        }
    };
    check(RoundSphere());
    check(Ellipsoid(1, 1.05, 1.1));
    check(ConformalSphere(1.0, {{1, 0, 0.05}, {2, 1, 0.02}}));
    check(FlatTorus());
    check(TorusOfRevolution(2.0, 0.5));
}

TEST(FirstVariation, ZeroDirectionGivesZero) {
    RoundSphere s;
    Rng rng(1);
    const auto c = random_cycle(s, rng, 2, 5, 0.5);
    EXPECT_EQ(first_variation(s, c, std::vector<V3>(c.vertices.size(), V3::Zero())), 0.0);
    EXPECT_THROW(first_variation(s, c, std::vector<V3>(1, V3::Zero())), PreconditionError);
}

TEST(FirstVariation, MatchesCentralDifferencesWithSecondOrderError) {
    Rng rng(12);
    Ellipsoid e(1, 1.05, 1.1);
    for (int i = 0; i < 5; ++i) {
        const auto c = random_cycle(e, rng, 2, 6, 0.3);
        std::vector<V3> field;
        for (const auto& v : c.vertices) field.push_back(random_tangent(e, v, 1.0, rng));
        const double exact = first_variation(e, c, field);
        const double err3 = std::abs(length_derivative_fd(e, c, field, 1e-3) - exact);
        const double err4 = std::abs(length_derivative_fd(e, c, field, 1e-4) - exact);
        const double err5 = std::abs(length_derivative_fd(e, c, field, 1e-5) - exact);
        EXPECT_LE(err5, 1e-4 * std::abs(exact));
        // Quadratic decay from 1e-3 to 1e-4; below that the solver noise floor dominates.
        EXPECT_LT(err4, 0.05 * err3);
    }
}

// ---------------------------------------------------------------- flow_step

TEST(FlowStep, StationaryCycleDoesNotMove) {
    RoundSphere s;
    const auto c = closed_polygon(s, great_circle_points(8));
    const auto out = flow_step(s, c, deformation_vector(s, c), s.inj() / 16);
    EXPECT_LT(max_vertex_gap(s, c, out), 1e-8);
}

TEST(FlowStep, RightAngleCornersDecreaseLengthAtFirstOrderRate) {
    // Each corner moves by dt (1, 1) towards the centre, so the perimeter drops by exactly 8 dt.
    FlatTorus t;
    const auto c = torus_square(t, 0.2);
    const auto dv = deformation_vector(t, c);
    for (double dt : {1e-3, 1e-4}) {
        const auto out = flow_step(t, c, dv, dt);
        EXPECT_NEAR(cycle_length(c) - cycle_length(out), dt * dv.norm_sq, 1e-12);
        EXPECT_EQ(out.type, c.type);
    }
}

TEST(FlowStep, OverlongStepIsRejected) {
    FlatTorus t;
    const auto c = torus_square(t, 0.2);
    EXPECT_THROW(flow_step(t, c, deformation_vector(t, c), 0.4), StepTooLongError);
    EXPECT_THROW(flow_step(t, c, deformation_vector(t, c), 0.0), PreconditionError);
}

TEST(FlowStep, TypePreservedOnAcceptedSteps) {
    Rng rng(40);
    Ellipsoid e(1, 1.05, 1.1);
    int accepted = 0;
    for (int i = 0; i < 20; ++i) {
        const auto c = random_cycle(e, rng, 1 + i % 2, 6, 0.3, i % 2 == 1);
        const auto dv = deformation_vector(e, c);
        try {
            const auto out = flow_step(e, c, dv, 0.01);
            EXPECT_EQ(out.type, c.type);
            EXPECT_EQ(classify_type(e, out, out.merge_tol).constant_mask, c.type.constant_mask);
            ++accepted;
        } catch (const StepTooLongError&) {
        }
    }
    EXPECT_GT(accepted, 10);
}

// ------------------------------------------------------------------ shorten

namespace {

template <class M>
void expect_monotone(const M& m, const ShortenOutcome<M>& out) {
    for (std::size_t i = 1; i < out.trace.size(); ++i)
        EXPECT_LE(out.trace[i].length, out.trace[i - 1].length + 1e-9 * m.diam()) << "row " << i;
}

}  // namespace

TEST(Shorten, SmallCapCircleCollapses) {
    RoundSphere s;
    const double z = std::sin(80.0 * kPi / 180.0);
    const double r = std::cos(80.0 * kPi / 180.0);
    std::vector<V3> pts;
    for (int i = 0; i < 8; ++i) {
        const double a = 2 * kPi * i / 8;
        pts.push_back(V3(r * std::cos(a), r * std::sin(a), z));
    }
    const auto out = shorten(s, closed_polygon(s, pts));
    EXPECT_EQ(out.result, ShortenResult::Collapsed);
    EXPECT_LT(out.final_length, 1e-4 * s.diam());
    expect_monotone(s, out);
}

TEST(Shorten, WrappingTorusLoopConvergesToUnitGeodesic) {
    FlatTorus t;
    std::vector<V2> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(V2(i / 8.0, 0.3 + 0.03 * std::sin(2 * kPi * i / 8.0 * 3)));
    const auto out = shorten(t, closed_polygon(t, pts));
    ASSERT_EQ(out.result, ShortenResult::Stationary);
    EXPECT_NEAR(out.final_length, 1.0, 1e-4);
    ASSERT_TRUE(out.net.has_value());
    EXPECT_NEAR(out.net->total_mass, 1.0, 1e-4);
    EXPECT_LE(out.net->residual, 2 * 1e-5);
    expect_monotone(t, out);
}

TEST(Shorten, PerturbedEllipsoidEquatorConvergesToPrincipalCircle) {
    Ellipsoid e(1, 1, 1.2);
    std::vector<V3> pts;
    for (int i = 0; i < 16; ++i) {
        const double a = 2 * kPi * i / 16;
        pts.push_back(e.project(V3(std::cos(a), std::sin(a), 0.01 * std::sin(3 * a))));
    }
    const auto out = shorten(e, closed_polygon(e, pts));
    ASSERT_EQ(out.result, ShortenResult::Stationary);
    EXPECT_NEAR(out.final_length, 2 * kPi, 1e-3);
    expect_monotone(e, out);
}

TEST(Shorten, IterationBudgetExhaustedIsReported) {
    FlatTorus t;
    std::vector<V2> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(V2(i / 8.0, 0.3 + 0.1 * std::sin(2 * kPi * i / 8.0 * 2)));
    FlowConfig cfg;
    cfg.max_outer_iters = 1;
    cfg.eps_stationary = 1e-12;
    const auto out = shorten(t, closed_polygon(t, pts), cfg);
    EXPECT_EQ(out.result, ShortenResult::NonConverged);
    EXPECT_FALSE(out.trace.empty());
    EXPECT_EQ(out.trace.back().event, "NonConverged");
}

TEST(Shorten, TraceIsMonotoneOnRandomCycles) {
    Rng rng(5);
    Ellipsoid e(1, 1.05, 1.1);
    FlowConfig cfg;
    cfg.max_outer_iters = 30;
    for (int i = 0; i < 4; ++i) {
        const auto c = random_cycle(e, rng, 1 + i % 2, 6, 0.3);
        expect_monotone(e, shorten(e, c, cfg));
    }
}

// -------------------------------------------------------- polish_stationary

TEST(Polish, RecoversGreatCircleFromPerturbation) {
    RoundSphere s;
    auto pts = great_circle_points(8);
    pts[3] = V3(pts[3].x(), pts[3].y(), 1e-3).normalized();
    const auto c = closed_polygon(s, pts);
    const auto polished = polish_stationary(s, c, 1e-8);
    ASSERT_TRUE(polished.has_value());
    EXPECT_LT(deformation_vector(s, *polished).norm_sq, 1e-16);
    EXPECT_NEAR(cycle_length(*polished), 2 * kPi, 1e-8);
}
