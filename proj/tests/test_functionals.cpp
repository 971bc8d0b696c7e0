#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ptorus/errors.hpp"
#include "ptorus/functionals.hpp"

#include <cmath>
#include <sstream>

using namespace ptorus;

namespace {

MapSpec slit_spec() { return {std::make_shared<SlitC>(SlitC::search_eps()), Weight::inverse_det()}; }

std::shared_ptr<const CurveOrbit> slit_orbit(int K) {
    const MapSpec s = slit_spec();
    return std::make_shared<const CurveOrbit>(CurveOrbit::propagate(s, default_gamma(*s.map), K));
}

} // namespace

TEST_CASE("Gauss-Legendre rule is exact to degree 2n-1") {
    for (int n : {1, 2, 4, 8, 12}) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        REQUIRE(x.size() == static_cast<std::size_t>(n));
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            REQUIRE(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("jump of simple observables") {
    const Step step(0.5, 2.0);
    JumpProbe p{{0.5, 0.3}, {1, 0}};
    CHECK(jump(step, p).value == doctest::Approx(2.0));
    p.v = {-3, 0};
    CHECK(jump(step, p).value == doctest::Approx(-2.0));
    p.v = {1, 1};
    CHECK(jump(step, p).value == doctest::Approx(2.0));

    std::mt19937_64 rng(5);
    const TrigPolynomial t = TrigPolynomial::random(rng);
    const JumpResult r = jump(t, {{0.3, 0.7}, {0.6, 0.8}});
    CHECK(std::abs(r.value) < 1e-9);

    const Bump b({0.5, 0.5}, 0.1, 2.0);
    CHECK(b.value({0.5, 0.5}) == 2.0);
    CHECK(b.value({0.65, 0.5}) == 0.0);
    CHECK(b.feature_scale() == 0.1);
}

TEST_CASE("trig polynomial evaluation") {
    const TrigPolynomial t({{1, 0, 1.0, 0.0}, {2, -1, 0.0, 0.5}});
    const Vec2 p{0.1, 0.7};
    const double expect = std::cos(2 * M_PI * 0.1) + 0.5 * std::sin(2 * M_PI * (0.2 - 0.7));
    CHECK(t.value(p) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(t({1.1, -0.3}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("transfer operator of constants") {
    const auto one = std::make_shared<TrigPolynomial>(std::vector<TrigPolynomial::Term>{{0, 0, 1.0, 0.0}});
    const MapSpec d{std::make_shared<Doubling>(), Weight::inverse_det()};
    const MapSpec c = slit_spec();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const TorusPoint y(u(rng), u(rng));
        REQUIRE(transfer_apply(d, *one, y) == doctest::Approx(1.0));
        REQUIRE(transfer(d, one, 3)->value(y.vec()) == doctest::Approx(1.0));
        const MapSpec du{std::make_shared<Doubling>(), Weight::unit()};
        REQUIRE(transfer_apply(du, *one, y) == doctest::Approx(4.0));
    }
    const ObsPtr l2 = transfer(c, transfer(c, one, 1), 1);
    const auto* ti = dynamic_cast<const TransferImage*>(l2.get());
    REQUIRE(ti != nullptr);
    CHECK(ti->applications() == 2);
    CHECK(l2->depth() == 2);
    CHECK(scaled(one, 3.0)->value({0.2, 0.2}) == doctest::Approx(3.0));
}

TEST_CASE("slit map functionals") {
    const auto orbit = slit_orbit(7);
    const BoundaryFunctionals f(orbit, 2);
    const H0 h0 = build_h0(f);
    CHECK(h0.radius == doctest::Approx(std::dynamic_pointer_cast<const SlitC>(f.spec().map)->eps() / 4));
    CHECK(f.ell(1, *h0.h0).value == doctest::Approx(1.0).epsilon(1e-8));
    for (int k = 2; k <= 6; ++k) CHECK(std::abs(f.ell(k, *h0.h0).value) < 1e-6);

    const XiResult xi = f.xi_lambda(0.2, *h0.h0, 6, 0.5);
    CHECK(xi.value == doctest::Approx(0.2).epsilon(1e-7));
    CHECK_THROWS_AS((void)f.xi_lambda(0.46, *h0.h0, 6, 0.5), InvalidArgument);

    std::mt19937_64 rng(17);
    const ObsPtr g = std::make_shared<TrigPolynomial>(TrigPolynomial::random(rng));
    CHECK(std::abs(f.ell(1, *g).value) < 1e-9);
    const ObsPtr h = transfer(f.spec(), g, 1);
    std::vector<DualityRow> rows;
    for (int k = 1; k <= 4; ++k) {
        rows.push_back(f.verify_duality(h, k));
        CHECK(rows.back().residual < 1e-6);
    }
    std::ostringstream os;
    write_duality_csv(os, rows);
    CHECK(os.str().rfind("k,lhs,rhs,residual,error_budget\n", 0) == 0);

    for (const auto& r : f.shift_identity(h, 2, 10, 3)) CHECK(r.residual < 1e-5);

    const ObsPtr reduced = reduced_transfer(f, h0, h);
    CHECK(std::abs(f.ell(1, *reduced).value) < 1e-7);
}

TEST_CASE("discontinuity field of the slit map") {
    const auto field = DiscontinuityField::build(slit_spec(), 1);
    CHECK(field.edge_count() > 0);
    std::size_t hits = 0;
    for (int i = 0; i < 500; ++i) {
        const auto u = field.crossings({i / 500.0, 0.0}, {1.0 / 500, 0.0});
        for (double s : u) {
            REQUIRE(s > 0.0);
            REQUIRE(s < 1.0);
        }
        hits += u.size();
    }
    CHECK(hits > 0);
    CHECK(field.clearance({0.25, 0.05}, {0, 1}, field.max_radius()) > 0.0);
}
