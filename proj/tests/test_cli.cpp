#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ptorus/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace ptorus;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("ptorus_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(PTORUS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small_slit(const fs::path& out) {
    RunConfig c;
    c.map = "slit_c";
    c.K = 4;
    c.duality_observables = 2;
    c.duality_kmax = 3;
    c.ulam_N = 16;
    c.ulam_samples = 16;
    c.n_max = 3;
    c.n_growth = 10;
    c.out = out.string();
    return c;
}

} // namespace

TEST_CASE("run directory is deterministic and holds the config") {
    TempDir tmp;
    const RunConfig c = small_slit(tmp.path);
    const fs::path a = prepare_run_dir("propagate", c);
    const fs::path b = prepare_run_dir("propagate", c);
    CHECK(a == b);
    CHECK(a.filename().string().rfind("propagate-slit_c-srb-", 0) == 0);
    std::istringstream cfg(slurp(a / "config.txt"));
    CHECK(parse_config(cfg) == c);
    RunConfig d = c;
    d.seed = 2;
    CHECK(prepare_run_dir("propagate", d) != a);
}

TEST_CASE("commands write their outputs") {
    TempDir tmp;
    const RunConfig c = small_slit(tmp.path);
    std::ostringstream log, err;
    for (const char* cmd : {"propagate", "check", "duality", "spectrum", "bounds"}) {
        CAPTURE(cmd);
        CHECK(run_command(cmd, c, log, err) == exit_pass);
    }
    CHECK(err.str().empty());
    const fs::path dir = prepare_run_dir("propagate", c);
    CHECK(fs::exists(dir / "gamma_4.csv"));
    CHECK(slurp(dir / "summary.txt").find("result = pass") != std::string::npos);
    CHECK(fs::exists(prepare_run_dir("check", c) / "report.txt"));
    CHECK(fs::exists(prepare_run_dir("duality", c) / "duality.csv"));
    CHECK(fs::exists(prepare_run_dir("spectrum", c) / "spectrum.csv"));
    CHECK(fs::exists(prepare_run_dir("bounds", c) / "lower.csv"));

    const std::string first = slurp(prepare_run_dir("duality", c) / "duality.csv");
    CHECK(run_command("duality", c, log, err) == exit_pass);
    CHECK(slurp(prepare_run_dir("duality", c) / "duality.csv") == first);
}

TEST_CASE("failures and errors map to exit codes") {
    TempDir tmp;
    RunConfig c = small_slit(tmp.path);
    std::ostringstream log, err;
    CHECK(run_command("nonsense", c, log, err) == exit_error);
    c.map = "doubling";
    CHECK(run_command("check", c, log, err) == exit_fail);
    CHECK(run_command("duality", c, log, err) == exit_error);
    c.K = 1;
    CHECK(run_command("propagate", c, log, err) == exit_error);
}

TEST_CASE("command line tool") {
    TempDir tmp;
    const fs::path good = tmp.path / "good.cfg";
    const fs::path bad = tmp.path / "bad.cfg";
    const fs::path fail = tmp.path / "fail.cfg";
    {
        std::ofstream(good) << "map = slit_c\nK = 4\n";
        std::ofstream(bad) << "map = slit_c\nmystery = 3\n";
        std::ofstream(fail) << "map = doubling\nK = 3\n";
    }
    const std::string out = " --out " + (tmp.path / "runs").string();
    CHECK(run_tool("propagate --config " + good.string() + out) == 0);
    CHECK(run_tool("propagate --config " + good.string() + out + " --seed 9") == 0);
    CHECK(run_tool("check --config " + fail.string() + out) == 1);
    CHECK(run_tool("propagate --config " + bad.string() + out) == 2);
    CHECK(run_tool("propagate --config " + (tmp.path / "missing.cfg").string() + out) == 2);
    CHECK(run_tool("propagate" + out) == 2);
    CHECK(run_tool("frobnicate --config " + good.string()) == 2);
    CHECK(run_tool("--help") == 0);

    std::size_t dirs = 0;
    for (const auto& e : fs::directory_iterator(tmp.path / "runs")) {
        ++dirs;
        CHECK(fs::exists(e.path() / "config.txt"));
    }
    CHECK(dirs == 3);
}
