#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ptorus/bounds.hpp"
#include "ptorus/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace ptorus;

TEST_CASE("rate of a geometric sequence") {
    std::vector<double> la;
    for (int k = 1; k <= 20; ++k) la.push_back(std::log(3.0) + k * std::log(0.7));
    const RateEstimate r = estimate_rate(la);
    CHECK(r.value == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.k_lo == 10);
    CHECK(r.k_hi == 20);
    CHECK(r.window_min < 0.7 * std::pow(3.0, 1.0 / 20) + 1e-12);

    la[15] = std::numeric_limits<double>::quiet_NaN();
    CHECK(estimate_rate(la).value == doctest::Approx(0.7).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_rate({0.0}), InvalidArgument);
}

TEST_CASE("slit map bounds equal one half") {
    const auto m = std::make_shared<SlitC>(SlitC::search_eps());
    const CurveOrbit o = CurveOrbit::propagate({m, Weight::inverse_det()}, default_gamma(*m), 16);
    const BoundReport r = lower_bounds(o);
    CHECK(r.bv.value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.linf2.value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(lambda_bv(o) == doctest::Approx(0.5).epsilon(1e-9));
    std::ostringstream os;
    r.write_csv(os);
    CHECK(os.str().rfind("k,raw_bv,root_bv", 0) == 0);
}

TEST_CASE("affine map lower bound from a trace") {
    const auto m = std::make_shared<AffineA>(std::exp(1.0));
    const MapSpec spec{m, Weight::inverse_det()};
    const BoundReport r = lower_bounds(spec, trace_curve(spec, default_gamma(*m), 16, 16));
    CHECK(r.bv.value == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("cylinder multiplicities") {
    const MapSpec doubling{std::make_shared<Doubling>(), Weight::unit()};
    ComplexityOptions opt;
    opt.along = 50;
    const ComplexityReport d = cylinder_complexity(doubling, 3, opt);
    REQUIRE(d.max_multiplicity.size() == 3);
    CHECK(d.max_multiplicity[0] == 4);

    const MapSpec ident{std::make_shared<Identity>(), Weight::unit()};
    const ComplexityReport i = cylinder_complexity(ident, 3, opt);
    for (int m : i.max_multiplicity) CHECK(m == 1);
    CHECK(i.h_estimate == 0.0);

    const MapSpec a{std::make_shared<AffineA>(std::exp(1.0)), Weight::unit()};
    const ComplexityReport c = cylinder_complexity(a, 3, opt);
    CHECK(c.max_multiplicity[0] <= 4);
    for (std::size_t n = 1; n < c.max_multiplicity.size(); ++n) CHECK(c.max_multiplicity[n] >= c.max_multiplicity[n - 1]);
}
