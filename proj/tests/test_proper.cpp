#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ptorus/proper.hpp"

#include <sstream>

using namespace ptorus;

TEST_CASE("slit map is properly discontinuous") {
    const MapSpec spec{std::make_shared<SlitC>(SlitC::search_eps()), Weight::inverse_det()};
    const DiscontinuityReport r = check_proper(spec, 6);
    CHECK(r.a0_pass);
    CHECK(r.a1_pass);
    CHECK(r.a2_pass);
    CHECK(r.a3_pass);
    CHECK(r.J == 12);
    CHECK(r.a2_margin.size() == 5);
    CHECK(r.a3_distance.size() == 5);
    std::ostringstream os;
    r.write(os);
    CHECK(os.str().find("a0 = pass") != std::string::npos);
}

TEST_CASE("cocycle map with affine base is properly discontinuous") {
    const MapSpec spec{std::make_shared<CocycleB>(CircleMap(2.5), 0.25, 0.0), Weight::inverse_det()};
    const DiscontinuityReport r = check_proper(spec, 6);
    CHECK(r.pass());
    const auto m = std::make_shared<CocycleB>(CircleMap(2.5), 0.25, 0.0);
    const CurveOrbit o = CurveOrbit::propagate({m, Weight::inverse_det()}, default_gamma(*m), 8);
    CHECK(markov_heuristic(o, 8) == MarkovVerdict::consistent_with_non_markov);
}

TEST_CASE("smooth doubling map fails A0") {
    const MapSpec spec{std::make_shared<Doubling>(), Weight::inverse_det()};
    const DiscontinuityReport r = check_proper(spec, 4);
    CHECK_FALSE(r.a0_pass);
    CHECK_FALSE(r.pass());
    const PolyCurve c{{straight_segment({0, 0}, {0, 1}, 1.0, Side::interior, 0.01)}};
    CHECK(check_a0(spec, c) < 1e-12);
}

TEST_CASE("A0 margin of the affine map") {
    const auto m = std::make_shared<AffineA>(std::exp(1.0));
    const MapSpec spec{m, Weight::unit()};
    const PolyCurve c = m->discontinuity_set(0.01).curves.front();
    const double margin = check_a0(spec, c);
    CHECK(margin > 0.1);
    CHECK(margin <= 0.5);
}

TEST_CASE("verdict names") {
    CHECK(std::string(verdict_name(MarkovVerdict::inconclusive)) != verdict_name(MarkovVerdict::consistent_with_non_markov));
}
