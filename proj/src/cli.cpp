#include "ptorus/cli.hpp"

#include "ptorus/bounds.hpp"
#include "ptorus/errors.hpp"
#include "ptorus/ulam.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace ptorus {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

fs::path prepare_run_dir(const std::string& command, const RunConfig& c) {
    std::ostringstream text;
    write_config(text, c);
    std::ostringstream name;
    name << command << '-' << c.map << '-' << c.weight << '-' << std::hex << std::setw(8) << std::setfill('0')
         << (fnv1a(command + "\n" + text.str()) & 0xffffffffULL);
    const fs::path dir = fs::path(c.out) / name.str();
    fs::create_directories(dir);
    auto os = open_out(dir / "config.txt");
    os << text.str();
    return dir;
}

int cmd_propagate(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const MapSpec spec = make_spec(c);
    const CurveOrbit orbit = CurveOrbit::propagate(spec, default_gamma(*spec.map), c.K, orbit_options(c));
    auto sum = open_out(dir / "summary.txt");
    sum.precision(17);
    sum << "map = " << spec.map->name() << "\nweight = " << spec.weight.label() << "\nK = " << orbit.depth()
        << "\nsigma_hits = " << orbit.sigma_hits() << "\n";
    double spread = 0;
    for (int k = 1; k <= orbit.depth(); ++k) {
        const OrbitLevel& l = orbit.level(k);
        auto os = open_out(dir / ("gamma_" + std::to_string(k) + ".csv"));
        orbit.write_csv(os, k);
        sum << "length[" << k << "] = " << l.length() << "\nruns[" << k << "] = " << l.runs.size() << "\nsamples[" << k
            << "] = " << l.sample_count() << "\noverlap_samples[" << k << "] = " << l.overlap_samples << "\nalpha_spread["
            << k << "] = " << l.alpha_spread << "\n";
        spread = std::max(spread, l.alpha_spread);
    }
    const bool ok = spread < c.tol_alpha;
    sum << "result = " << (ok ? "pass" : "fail") << "\n";
    log << "propagate: " << orbit.depth() << " levels, length[K] = " << orbit.level(orbit.depth()).length()
        << ", alpha spread " << spread << "\n";
    return ok ? exit_pass : exit_fail;
}

int cmd_check(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const MapSpec spec = make_spec(c);
    const DiscontinuityReport rep = check_proper(spec, c.K, c.J, proper_options(c), orbit_options(c));
    auto os = open_out(dir / "report.txt");
    rep.write(os);
    log << "check: A0 " << (rep.a0_pass ? "pass" : "fail") << ", A1 " << (rep.a1_pass ? "pass" : "fail") << ", A2 "
        << (rep.a2_pass ? "pass" : "fail") << ", A3 " << (rep.a3_pass ? "pass" : "fail") << "\n";
    return rep.pass() ? exit_pass : exit_fail;
}

int cmd_bounds(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const MapSpec spec = make_spec(c);
    const BaseCurve g = default_gamma(*spec.map);
    const CurveTrace trace = trace_curve(spec, g, c.K, c.trace_samples);
    OrbitOptions oo = orbit_options(c);
    oo.truncate_on_budget = true;
    const CurveOrbit lengths = CurveOrbit::propagate(spec, g, c.K, oo);
    const BoundReport lower = lower_bounds(spec, trace, &lengths, c.window_frac);
    {
        auto os = open_out(dir / "lower.csv");
        lower.write_csv(os);
        auto ss = open_out(dir / "lower.txt");
        lower.write_summary(ss);
    }
    const UpperReport upper = lambda_upper(spec, c.n_max, c.n_growth);
    const bool ok = lower.bv.value <= upper.value * 1.03;
    {
        auto os = open_out(dir / "upper.txt");
        os.precision(12);
        os << "map = " << spec.map->name() << "\nweight = " << spec.weight.label() << "\nn_max = " << c.n_max
           << "\nn_growth = " << c.n_growth << "\n";
        const auto& cx = upper.complexity;
        for (std::size_t n = 0; n < cx.max_multiplicity.size(); ++n)
            os << "multiplicity[" << n + 1 << "] = " << cx.max_multiplicity[n] << "\nrate[" << n + 1 << "] = " << cx.rate[n]
               << "\n";
        os << "h_estimate = " << cx.h_estimate << "\nlog_slope = " << cx.log_slope << "\ngrowth = " << upper.growth.value
           << "\nlambda_upper = " << upper.value << "\nlambda_bv_lower = " << lower.bv.value
           << "\nresult = " << (ok ? "pass" : "fail") << "\n";
    }
    log << "bounds: lambda_bv = " << lower.bv.value << ", lambda_linf = " << lower.linf << ", upper = " << upper.value
        << "\n";
    return ok ? exit_pass : exit_fail;
}

int cmd_duality(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const MapSpec spec = make_spec(c);
    if (spec.map->gamma().empty()) throw InvalidArgument("duality: the map has no discontinuity set");
    auto orbit = std::make_shared<const CurveOrbit>(
        CurveOrbit::propagate(spec, default_gamma(*spec.map), c.duality_kmax + 1, orbit_options(c)));
    const BoundaryFunctionals f(orbit, 2, functional_options(c));
    std::mt19937_64 rng(c.seed);
    std::vector<DualityRow> rows;
    double worst = 0;
    for (int i = 0; i < c.duality_observables; ++i) {
        const ObsPtr g = std::make_shared<TrigPolynomial>(TrigPolynomial::random(rng, c.trig_degree));
        const ObsPtr h = transfer(spec, g, 1);
        for (int k = 1; k <= c.duality_kmax; ++k) {
            rows.push_back(f.verify_duality(h, k));
            worst = std::max(worst, rows.back().residual);
        }
    }
    auto os = open_out(dir / "duality.csv");
    write_duality_csv(os, rows);
    const bool ok = worst <= c.duality_tol;
    auto ss = open_out(dir / "summary.txt");
    ss.precision(17);
    ss << "observables = " << c.duality_observables << "\nkmax = " << c.duality_kmax << "\nmax_residual = " << worst
       << "\ntolerance = " << c.duality_tol << "\nresult = " << (ok ? "pass" : "fail") << "\n";
    log << "duality: max residual " << worst << " over " << rows.size() << " rows\n";
    return ok ? exit_pass : exit_fail;
}

int cmd_spectrum(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const MapSpec spec = make_spec(c);
    const UlamMatrix u = build_ulam(spec, c.ulam_N, c.ulam_samples, c.ulam_seed);
    const auto sp = leading_spectrum(u, c.spectrum_count);
    const CurveTrace trace = trace_curve(spec, default_gamma(*spec.map), c.K, c.trace_samples);
    const double radius = lower_bounds(spec, trace, nullptr, c.window_frac).bv.value;
    {
        auto os = open_out(dir / "spectrum.csv");
        write_spectrum_csv(os, sp, radius);
        auto ts = open_out(dir / "ulam_triplets.csv");
        u.write_triplets(ts);
    }
    const Eigen::VectorXd cs = u.column_sums();
    const bool srb = c.weight == "srb";
    const bool ok = !srb || (!sp.empty() && std::abs(sp.front().value - 1.0) <= 1e-2);
    auto ss = open_out(dir / "summary.txt");
    ss.precision(17);
    ss << "N = " << c.ulam_N << "\nsamples_per_cell = " << c.ulam_samples << "\ncolumn_sum_min = " << cs.minCoeff()
       << "\ncolumn_sum_max = " << cs.maxCoeff() << "\nleading_modulus = " << (sp.empty() ? 0.0 : std::abs(sp.front().value))
       << "\ndisc_radius = " << radius << "\nresult = " << (ok ? "pass" : "fail") << "\n";
    log << "spectrum: leading " << (sp.empty() ? 0.0 : std::abs(sp.front().value)) << ", disc radius " << radius << "\n";
    return ok ? exit_pass : exit_fail;
}

int run_command(const std::string& command, const RunConfig& c, std::ostream& log, std::ostream& err) {
    try {
        int (*fn)(const RunConfig&, const fs::path&, std::ostream&) = nullptr;
        if (command == "propagate") fn = cmd_propagate;
        else if (command == "check") fn = cmd_check;
        else if (command == "bounds") fn = cmd_bounds;
        else if (command == "duality") fn = cmd_duality;
        else if (command == "spectrum") fn = cmd_spectrum;
        else throw InvalidArgument("unknown command '" + command + "'");
        validate(c);
        const fs::path dir = prepare_run_dir(command, c);
        const int code = fn(c, dir, log);
        log << "output: " << dir.string() << "\n";
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
}

} // namespace ptorus
