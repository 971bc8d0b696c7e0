#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ptorus/errors.hpp"
#include "ptorus/ulam.hpp"

#include <cmath>
#include <sstream>

using namespace ptorus;

TEST_CASE("identity map gives the identity matrix") {
    const UlamMatrix u = build_ulam({std::make_shared<Identity>(), Weight::inverse_det()}, 8, 16);
    const Eigen::MatrixXd p(u.matrix());
    CHECK((p - Eigen::MatrixXd::Identity(64, 64)).norm() < 1e-14);
}

TEST_CASE("doubling map matrix") {
    const int N = 4;
    const UlamMatrix u = build_ulam({std::make_shared<Doubling>(), Weight::inverse_det()}, N, 64);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const int col = i + N * j;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const int row = (2 * i + a) % N + N * ((2 * j + b) % N);
                    REQUIRE(u.matrix().coeff(row, col) == doctest::Approx(0.25));
                }
        }
    const auto sp = leading_spectrum(u, 3);
    REQUIRE(!sp.empty());
    CHECK(std::abs(sp.front().value - 1.0) < 1e-12);
}

TEST_CASE("SRB columns sum to one") {
    for (const MapPtr& m : std::vector<MapPtr>{std::make_shared<AffineA>(std::exp(1.0)),
                                               std::make_shared<SlitC>(SlitC::search_eps()),
                                               std::make_shared<CocycleB>(CircleMap(2.5), 0.25, 0.0)}) {
        CAPTURE(m->name());
        const UlamMatrix u = build_ulam({m, Weight::inverse_det()}, 16, 16);
        const Eigen::VectorXd cs = u.column_sums();
        CHECK(cs.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cs.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
        const auto sp = leading_spectrum(u, 4);
        CHECK(std::abs(sp.front().value - 1.0) < 1e-8);
        for (std::size_t i = 1; i < sp.size(); ++i) CHECK(std::abs(sp[i].value) <= std::abs(sp[i - 1].value) + 1e-12);
    }
}

TEST_CASE("stratified sampling") {
    std::mt19937_64 rng(1);
    const auto pts = stratified_points(8, 3, 5, 32, rng);
    CHECK(pts.size() == 32);
    for (const auto& p : pts) {
        CHECK(p.x >= 3.0 / 8);
        CHECK(p.x < 4.0 / 8);
        CHECK(p.y >= 5.0 / 8);
        CHECK(p.y < 6.0 / 8);
    }
    CHECK_THROWS_AS(stratified_points(8, 0, 0, 20, rng), InvalidArgument);
}

TEST_CASE("cell averages of a trig polynomial") {
    const TrigPolynomial t({{1, 0, 1.0, 0.0}});
    const int N = 8;
    const Eigen::VectorXd v = cell_averages(t, N, 256);
    for (int i = 0; i < N; ++i) {
        const double exact = (std::sin(2 * M_PI * (i + 1) / N) - std::sin(2 * M_PI * i / N)) / (2 * M_PI / N);
        CHECK(std::abs(v[i] - exact) < 5e-3);
    }
}

TEST_CASE("csv output") {
    const UlamMatrix u = build_ulam({std::make_shared<Identity>(), Weight::unit()}, 2, 16);
    std::ostringstream a, b;
    u.write_triplets(a);
    CHECK(a.str() == "row,col,value\n0,0,1\n1,1,1\n2,2,1\n3,3,1\n");
    write_spectrum_csv(b, leading_spectrum(u, 2), 0.5);
    CHECK(b.str().rfind("re,im,modulus,residual,disc_radius,inside_disc\n1,0,1,", 0) == 0);
}
