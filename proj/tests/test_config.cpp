#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ptorus/config.hpp"
#include "ptorus/errors.hpp"

#include <sstream>

using namespace ptorus;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

int error_line(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("defaults and overrides") {
    const RunConfig d = parse("");
    CHECK(d == RunConfig{});
    const RunConfig c = parse("# comment\nmap = slit_c\n\n  K=20   # depth\nweight = unit\nbeta = 1.5\nseed = 42\n");
    CHECK(c.map == "slit_c");
    CHECK(c.K == 20);
    CHECK(c.weight == "unit");
    CHECK(c.beta == 1.5);
    CHECK(c.seed == 42u);
}

TEST_CASE("write and parse round trip") {
    RunConfig c;
    c.map = "cocycle_b";
    c.beta = 2.5;
    c.delta = 0.3;
    c.eps0 = 1.234567890123e-3;
    c.ulam_seed = 18446744073709551615ULL;
    c.max_samples = 123456789;
    c.out = "some dir/runs";
    std::ostringstream os;
    write_config(os, c);
    CHECK(parse(os.str()) == c);
}

TEST_CASE("errors carry line numbers") {
    CHECK(error_line("map = affine_a\nbogus = 1\n") == 2);
    CHECK(error_line("K = 12\n\nK = 13\n") == 3);
    CHECK(error_line("beta = abc\n") == 1);
    CHECK(error_line("beta = 2.5x\n") == 1);
    CHECK(error_line("K = 1.5\n") == 1);
    CHECK(error_line("# c\nK\n") == 2);
    CHECK(error_line("map =\n") == 1);
    CHECK(error_line("beta = nan\n") == 1);
    CHECK(error_line("K = 1\n") == 0);
    CHECK(error_line("map = tent\n") == 0);
    CHECK(error_line("ulam_samples = 100\n") == 0);
    CHECK(error_line("eps0 = 0.01\n") == 0);
    CHECK(error_line("K = 12\n") == -1);
    CHECK_THROWS_AS(load_config("/nonexistent/ptorus.cfg"), ConfigError);
}

TEST_CASE("spec construction") {
    RunConfig c;
    c.map = "slit_c";
    MapSpec s = make_spec(c);
    CHECK(s.map->name() == "slit_c");
    CHECK(s.weight.kind() == WeightKind::inverse_det);
    c.map = "cocycle_b";
    c.weight = "constant";
    c.weight_c = 0.3;
    s = make_spec(c);
    CHECK(s.map->name() == "cocycle_b");
    CHECK(s.weight.kind() == WeightKind::constant);
    c.delta = 5.0;
    CHECK_THROWS_AS(make_spec(c), ConfigError);

    c = RunConfig{};
    c.eps0 = 5e-4;
    c.tol_map = 1e-7;
    CHECK(functional_options(c).ladder.eps0 == 5e-4);
    CHECK(orbit_options(c).tol_sigma == 1e-7);
    CHECK(proper_options(c).tol_member == c.tol_member);
}
