#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ptorus/edge_index.hpp"
#include "ptorus/errors.hpp"
#include "ptorus/geometry.hpp"

#include <Eigen/Dense>

#include <limits>
#include <random>
#include <sstream>

using namespace ptorus;

TEST_CASE("frac and wrap") {
    CHECK(frac(-0.25) == doctest::Approx(0.75));
    CHECK(frac(1.0) == 0.0);
    CHECK(frac(3.5) == doctest::Approx(0.5));
    CHECK(frac(-1e-18) < 1.0);
    CHECK_THROWS_AS(frac(std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
    CHECK_THROWS_AS(TorusPoint(std::numeric_limits<double>::infinity(), 0.0), InvalidArgument);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 v{u(rng), u(rng)};
        const TorusPoint p = wrap(v);
        REQUIRE(p.x() >= 0.0);
        REQUIRE(p.x() < 1.0);
        REQUIRE(p.y() >= 0.0);
        REQUIRE(p.y() < 1.0);
        const TorusPoint q = wrap(v + Vec2{3.0, -2.0});
        REQUIRE(torus_distance(p, q) < 1e-12);
    }
}

TEST_CASE("min_image properties") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const TorusPoint p(u(rng), u(rng)), q(u(rng), u(rng));
        const Vec2 d = min_image(p, q);
        REQUIRE(std::abs(d.x) <= 0.5);
        REQUIRE(std::abs(d.y) <= 0.5);
        REQUIRE(torus_distance(wrap(p.vec() + d), q) < 1e-12);
        REQUIRE(torus_distance(p, q) == doctest::Approx(torus_distance(q, p)));
        REQUIRE(torus_distance(p, q) <= std::sqrt(0.5) + 1e-15);
    }
    CHECK(norm(min_image(Vec2{0.99, 0.5}, Vec2{0.01, 0.5}) - Vec2{0.02, 0.0}) < 1e-12);
}

TEST_CASE("Mat2 singular values and inverse against Eigen") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Mat2 m{n(rng), n(rng), n(rng), n(rng)};
        Eigen::Matrix2d e;
        e << m.a, m.b, m.c, m.d;
        const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2d>(e).singularValues();
        REQUIRE(m.sigma_max() == doctest::Approx(sv[0]).epsilon(1e-10));
        REQUIRE(m.sigma_min() == doctest::Approx(sv[1]).epsilon(1e-8));
        REQUIRE(m.det() == doctest::Approx(e.determinant()).epsilon(1e-12));
        const Mat2 id = m * m.inverse();
        REQUIRE(std::abs(id.a - 1) + std::abs(id.b) + std::abs(id.c) + std::abs(id.d - 1) < 1e-8);
    }
    CHECK_THROWS_AS((void)Mat2({1, 2, 2, 4}).inverse(), SingularDerivative);
}

TEST_CASE("straight segments and refinement") {
    const CurveSegment s = straight_segment({0.9, 0.1}, {1, 0}, 0.5, Side::interior, 0.01);
    CHECK(s.length() == doctest::Approx(0.5));
    PolyCurve c{{s}};
    CHECK(max_step(c) <= 0.01 + 1e-12);
    CHECK(curve_length(c) == doctest::Approx(0.5));

    const PolyCurve coarse{{straight_segment({0.1, 0.2}, {0, 1}, 0.6, Side::plus, 0.2)}};
    const PolyCurve fine = refine(coarse, 4.0, 0.02);
    CHECK(max_step(fine) <= 0.005 + 1e-12);
    CHECK(curve_length(fine) == doctest::Approx(0.6));
    CHECK(fine.segments.front().side == Side::plus);
    CHECK_THROWS_AS(refine(coarse, 4.0, 1e-6, 1000), BudgetExceeded);
    CHECK_THROWS_AS(normalized(Vec2{}), InvalidArgument);
}

TEST_CASE("min_distance brackets the true distance") {
    const double h = 1e-3;
    const PolyCurve a{{straight_segment({0.2, 0.1}, {0, 1}, 0.5, Side::interior, h)}};
    const PolyCurve b{{straight_segment({0.3, 0.1}, {0, 1}, 0.5, Side::interior, h)}};
    const double d = min_distance(a, b, h);
    CHECK(d <= 0.1 + 1e-12);
    CHECK(d >= 0.1 - h - 1e-12);
    const PolyCurve w{{straight_segment({0.95, 0.1}, {0, 1}, 0.5, Side::interior, h)}};
    CHECK(min_distance(a, w, h) <= 0.25 + 1e-12);
    CHECK(min_distance(a, w, h) >= 0.25 - h - 1e-12);
    CHECK_THROWS_AS(min_distance(a, b, 1e-5), InvalidArgument);
}

TEST_CASE("curve csv") {
    std::ostringstream os;
    write_csv(os, PolyCurve{{straight_segment({0, 0}, {1, 0}, 0.1, Side::minus, 0.05)}});
    const std::string text = os.str();
    CHECK(text.rfind("segment_id,s,x,y,tx,ty,side\n", 0) == 0);
    CHECK(text.find("minus") != std::string::npos);
}

TEST_CASE("edge index finds nearby edges across the seam") {
    EdgeIndex idx(64);
    idx.add({0.995, 0.5}, {1.005, 0.5}, 0, 7);
    int found = 0;
    idx.for_each_near({0.001, 0.5005}, 0.01, [&](const EdgeIndex::Hit& h) {
        ++found;
        CHECK(h.dist == doctest::Approx(0.0005).epsilon(1e-6));
        CHECK(h.edge->idx == 7u);
    });
    CHECK(found == 1);
    found = 0;
    idx.for_each_near({0.5, 0.5}, 0.01, [&](const EdgeIndex::Hit&) { ++found; });
    CHECK(found == 0);
}

TEST_CASE("parallel index filters by direction") {
    std::vector<ParallelIndex::Edge> edges;
    edges.push_back({{0.2, 0.2}, {0.0, 0.1}, 0, 0, 0.0});
    edges.push_back({{0.15, 0.25}, {0.1, 0.0}, 1, 0, 0.0});
    const ParallelIndex pi(edges, 1e-3, 1e-2);
    int vertical = 0, horizontal = 0;
    pi.for_each_parallel({0.2001, 0.25}, {0, 1}, 1e-2, [&](const ParallelIndex::Hit& h) {
        ++vertical;
        CHECK(h.dist == doctest::Approx(1e-4).epsilon(1e-6));
    });
    pi.for_each_parallel({0.2001, 0.25}, {1, 0}, 1e-2, [&](const ParallelIndex::Hit&) { ++horizontal; });
    CHECK(vertical == 1);
    CHECK(horizontal == 1);
}
