#include "ptorus/config.hpp"

#include "ptorus/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <locale>
#include <ostream>
#include <set>
#include <sstream>
#include <type_traits>
#include <variant>
#include <vector>

namespace ptorus {

namespace {

using Member = std::variant<std::string RunConfig::*, double RunConfig::*, int RunConfig::*, std::int64_t RunConfig::*,
                            std::uint64_t RunConfig::*>;

struct Field {
    const char* key;
    Member member;
};

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        {"map", &RunConfig::map},
        {"beta", &RunConfig::beta},
        {"delta", &RunConfig::delta},
        {"amp", &RunConfig::amp},
        {"c_lin", &RunConfig::c_lin},
        {"eps", &RunConfig::eps},
        {"x0", &RunConfig::x0},
        {"y0", &RunConfig::y0},
        {"weight", &RunConfig::weight},
        {"weight_c", &RunConfig::weight_c},
        {"K", &RunConfig::K},
        {"J", &RunConfig::J},
        {"trace_samples", &RunConfig::trace_samples},
        {"window_frac", &RunConfig::window_frac},
        {"tol_map", &RunConfig::tol_map},
        {"tol_jump", &RunConfig::tol_jump},
        {"tol_alpha", &RunConfig::tol_alpha},
        {"tol_disjoint", &RunConfig::tol_disjoint},
        {"tol_len", &RunConfig::tol_len},
        {"tol_member", &RunConfig::tol_member},
        {"tol_cover", &RunConfig::tol_cover},
        {"max_step", &RunConfig::max_step},
        {"max_samples", &RunConfig::max_samples},
        {"quad_nodes", &RunConfig::quad_nodes},
        {"panel_length", &RunConfig::panel_length},
        {"eps0", &RunConfig::eps0},
        {"ladder_levels", &RunConfig::ladder_levels},
        {"richardson_order", &RunConfig::richardson_order},
        {"n_max", &RunConfig::n_max},
        {"n_growth", &RunConfig::n_growth},
        {"duality_observables", &RunConfig::duality_observables},
        {"duality_kmax", &RunConfig::duality_kmax},
        {"duality_tol", &RunConfig::duality_tol},
        {"trig_degree", &RunConfig::trig_degree},
        {"ulam_N", &RunConfig::ulam_N},
        {"ulam_samples", &RunConfig::ulam_samples},
        {"ulam_seed", &RunConfig::ulam_seed},
        {"spectrum_count", &RunConfig::spectrum_count},
        {"seed", &RunConfig::seed},
        {"out", &RunConfig::out},
    };
    return f;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_integer(const std::string& v, int line, const std::string& key) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(line, "bad integer for " + key + ": '" + v + "'");
    return out;
}

double parse_double(const std::string& v, int line, const std::string& key) {
    std::istringstream is(v);
    is.imbue(std::locale::classic());
    double d = 0;
    is >> d;
    if (is.fail() || !is.eof() || !std::isfinite(d)) throw ConfigError(line, "bad number for " + key + ": '" + v + "'");
    return d;
}

void set_field(RunConfig& c, const Field& f, const std::string& v, int line) {
    std::visit(
        [&](auto m) {
            using T = std::remove_reference_t<decltype(c.*m)>;
            if constexpr (std::is_same_v<T, std::string>) {
                if (v.empty()) throw ConfigError(line, std::string("empty value for ") + f.key);
                c.*m = v;
            } else if constexpr (std::is_same_v<T, double>) {
                c.*m = parse_double(v, line, f.key);
            } else {
                c.*m = parse_integer<T>(v, line, f.key);
            }
        },
        f.member);
}

} // namespace

RunConfig parse_config(std::istream& is) {
    RunConfig c;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError(line, "missing key");
        const Field* f = nullptr;
        for (const auto& cand : fields())
            if (key == cand.key) f = &cand;
        if (f == nullptr) throw ConfigError(line, "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
        set_field(c, *f, value, line);
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open " + path);
    return parse_config(in);
}

void write_config(std::ostream& os, const RunConfig& c) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    for (const auto& f : fields()) {
        buf << f.key << " = ";
        std::visit([&](auto m) { buf << c.*m; }, f.member);
        buf << '\n';
    }
    os << buf.str();
}

void validate(const RunConfig& c) {
    static const std::set<std::string> maps = {"affine_a", "slit_c", "cocycle_b", "doubling", "identity"};
    static const std::set<std::string> weights = {"unit", "srb", "constant"};
    if (!maps.count(c.map)) throw ConfigError(0, "unknown map '" + c.map + "'");
    if (!weights.count(c.weight)) throw ConfigError(0, "unknown weight '" + c.weight + "'");
    if ((c.map == "affine_a" || c.map == "cocycle_b") && !(c.beta > 1.0)) throw ConfigError(0, "beta > 1 required");
    if (c.eps < 0.0 || c.eps > 0.1) throw ConfigError(0, "eps in [0, 0.1] required");
    if (c.K < 2 || c.K > 40) throw ConfigError(0, "K in [2, 40] required");
    if (c.J != 0 && c.J < c.K) throw ConfigError(0, "J >= K required");
    if (!(c.window_frac > 0.0) || c.window_frac >= 1.0) throw ConfigError(0, "window_frac in (0, 1) required");
    for (double t : {c.tol_map, c.tol_jump, c.tol_alpha, c.tol_disjoint, c.tol_len, c.tol_member, c.tol_cover, c.duality_tol})
        if (!(t > 0.0)) throw ConfigError(0, "tolerances must be positive");
    if (!(c.max_step > 0.0) || c.max_samples < 1000) throw ConfigError(0, "max_step > 0 and max_samples >= 1000 required");
    if (c.quad_nodes < 1 || c.quad_nodes > 32 || !(c.panel_length > 0.0)) throw ConfigError(0, "bad quadrature settings");
    if (!(c.eps0 > 0.0) || c.eps0 > 1.9e-3 || c.richardson_order < 0 || c.ladder_levels < c.richardson_order + 2)
        throw ConfigError(0, "bad jump ladder settings");
    if (c.n_max < 3 || c.n_growth < 3) throw ConfigError(0, "n_max and n_growth >= 3 required");
    if (c.duality_observables < 1 || c.duality_kmax < 1 || c.trig_degree < 0 || c.trig_degree > 8)
        throw ConfigError(0, "bad duality settings");
    if (c.ulam_N < 2 || c.ulam_N > 512 || c.ulam_samples < 16 || c.ulam_samples % 16 != 0)
        throw ConfigError(0, "ulam_N in [2, 512] and ulam_samples a multiple of 16 required");
    if (c.spectrum_count < 1 || c.spectrum_count > 20) throw ConfigError(0, "spectrum_count in [1, 20] required");
    if (c.trace_samples < 1) throw ConfigError(0, "trace_samples >= 1 required");
    if (c.out.find_first_of("#\n") != std::string::npos) throw ConfigError(0, "out must not contain '#' or newlines");
}

MapSpec make_spec(const RunConfig& c) {
    validate(c);
    MapSpec s;
    try {
        if (c.map == "affine_a") s.map = std::make_shared<AffineA>(c.beta);
        else if (c.map == "cocycle_b") s.map = std::make_shared<CocycleB>(CircleMap(c.beta, c.delta), c.amp, c.c_lin);
        else if (c.map == "slit_c") s.map = std::make_shared<SlitC>(c.eps > 0.0 ? c.eps : SlitC::search_eps(), c.x0, c.y0);
        else if (c.map == "doubling") s.map = std::make_shared<Doubling>();
        else s.map = std::make_shared<Identity>();
    } catch (const InvalidArgument& e) {
        throw ConfigError(0, e.what());
    }
    if (c.weight == "unit") s.weight = Weight::unit();
    else if (c.weight == "srb") s.weight = Weight::inverse_det();
    else s.weight = Weight::constant(c.weight_c);
    return s;
}

OrbitOptions orbit_options(const RunConfig& c) {
    OrbitOptions o;
    o.max_step = c.max_step;
    o.tol_cover = c.tol_cover;
    o.tol_sigma = c.tol_map;
    o.max_samples = static_cast<std::size_t>(c.max_samples);
    return o;
}

ProperOptions proper_options(const RunConfig& c) {
    ProperOptions p;
    p.tol_jump = c.tol_jump;
    p.tol_alpha = c.tol_alpha;
    p.tol_disjoint = c.tol_disjoint;
    p.tol_member = c.tol_member;
    return p;
}

FunctionalOptions functional_options(const RunConfig& c) {
    FunctionalOptions f;
    f.nodes = c.quad_nodes;
    f.panel_length = c.panel_length;
    f.ladder.eps0 = c.eps0;
    f.ladder.levels = c.ladder_levels;
    f.ladder.order = c.richardson_order;
    f.tol_len = c.tol_len;
    return f;
}

} // namespace ptorus
