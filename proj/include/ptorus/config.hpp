#pragma once

#include "ptorus/functionals.hpp"
#include "ptorus/maps.hpp"
#include "ptorus/proper.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace ptorus {

/// Settings of one CLI run, read from a flat key = value file.
struct RunConfig {
    // map family and parameters
    std::string map = "affine_a";  ///< affine_a | slit_c | cocycle_b | doubling | identity
    double beta = 2.718281828459045;
    double delta = 0.0;            ///< nonlinearity of the cocycle base map
    double amp = 0.25;
    double c_lin = 0.0;
    double eps = 0.0;              ///< slit width; 0 selects it by search
    double x0 = 0.5, y0 = 0.5;
    std::string weight = "srb";    ///< unit | srb | constant
    double weight_c = 1.0;

    // depths
    int K = 12;
    int J = 0;                     ///< 0 means 2K
    int trace_samples = 64;
    double window_frac = 0.5;

    // tolerances
    double tol_map = 1e-9;         ///< distance under which a curve point counts as hitting a singular point
    double tol_jump = 1e-6;
    double tol_alpha = 1e-8;
    double tol_disjoint = 1e-6;
    double tol_len = 1e-6;
    double tol_member = 1e-10;
    double tol_cover = 1e-8;

    // curve refinement
    double max_step = 0.25;
    std::int64_t max_samples = 4'000'000;

    // quadrature and jump ladder
    int quad_nodes = 8;
    double panel_length = 0.125;
    double eps0 = 1e-3;
    int ladder_levels = 7;
    int richardson_order = 2;

    // upper bound
    int n_max = 8;
    int n_growth = 30;

    // duality
    int duality_observables = 10;
    int duality_kmax = 5;
    double duality_tol = 1e-6;
    int trig_degree = 2;

    // Ulam
    int ulam_N = 64;
    int ulam_samples = 256;
    std::uint64_t ulam_seed = 20240601;
    int spectrum_count = 10;

    std::uint64_t seed = 1;
    std::string out = "runs";

    bool operator==(const RunConfig&) const = default;
};

/// Parses key = value lines; '#' starts a comment. Unknown keys, duplicates and malformed
/// values raise ConfigError with the line number.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Every key in a fixed order; parse_config reads it back to an equal config.
void write_config(std::ostream& os, const RunConfig& c);

/// Range and consistency checks; raises ConfigError.
void validate(const RunConfig& c);

/// Map and weight described by the config.
MapSpec make_spec(const RunConfig& c);

OrbitOptions orbit_options(const RunConfig& c);
ProperOptions proper_options(const RunConfig& c);
FunctionalOptions functional_options(const RunConfig& c);

} // namespace ptorus
