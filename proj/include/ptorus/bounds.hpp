#pragma once

#include "ptorus/atlas.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ptorus {

/// Growth rate of a positive sequence a_k from its logarithms.
struct RateEstimate {
    double window_min = 0;  ///< min of a_k^{1/k} over the window
    double slope = 0;       ///< least-squares slope of log a_k over the window
    double value = 0;       ///< exp(slope), the reported estimate
    int k_lo = 0, k_hi = 0;
};

/// log_a[k-1] = log a_k; NaN entries are skipped. The window is [ceil(frac*K), K] over the
/// finite entries.
RateEstimate estimate_rate(const std::vector<double>& log_a, double window_frac = 0.5);

struct BoundReport {
    std::string map, weight;
    int K = 0;
    double window_frac = 0.5;
    std::vector<double> log_bv;     ///< log inf |phi_k Jac F^k|
    std::vector<double> log_linf1;  ///< log inf |phi_k|
    std::vector<double> log_linf2;  ///< log_bv - log len(gamma_{k+1}), NaN where the length is unknown
    RateEstimate bv, linf1, linf2;
    double linf = 0;                ///< max of the two L-infinity estimates

    /// k, raw_bv, root_bv, raw_linf1, root_linf1, raw_linf2, root_linf2, window.
    void write_csv(std::ostream& os) const;
    void write_summary(std::ostream& os) const;
};

/// Lower bounds from a curve orbit; the L-infinity,2 variant uses the set lengths of the orbit.
BoundReport lower_bounds(const CurveOrbit& orbit, double window_frac = 0.5);

/// Lower bounds from traced points, which reach depths where full geometry is too large.
/// Lengths for the L-infinity,2 variant are taken from `lengths` where it is deep enough.
BoundReport lower_bounds(const MapSpec& spec, const CurveTrace& trace, const CurveOrbit* lengths = nullptr,
                         double window_frac = 0.5);

double lambda_bv(const CurveOrbit& orbit);

struct LinfEstimate {
    double linf1 = 0, linf2 = 0, linf = 0;
};
LinfEstimate lambda_linf(const CurveOrbit& orbit);

struct ComplexityOptions {
    double radius = 1e-9;        ///< radius of the circle sampled around each probe
    int directions = 720;
    int along = 1000;            ///< probes per partition boundary segment
    int preimage_depth = 2;      ///< preimages of boundary intersections used as probes
};

struct ComplexityReport {
    std::vector<int> max_multiplicity;  ///< n = 1..n_max
    std::vector<Vec2> argmax;
    std::vector<double> rate;           ///< (1/n) log max multiplicity
    double log_slope = 0;               ///< least-squares slope of log multiplicity over the window
    double h_estimate = 0;              ///< slope of log of the increments over the window, >= 0
};

/// Number of n-cylinders whose closure contains a probe point, maximised over probes placed on
/// the partition boundaries, their intersections and preimages of those.
ComplexityReport cylinder_complexity(const MapSpec& spec, int n_max, const ComplexityOptions& opt = {});

struct UpperReport {
    ComplexityReport complexity;
    std::vector<double> log_norm;  ///< log sup_x |phi_n det DF^n| / lambda_n, n = 1..n_growth
    RateEstimate growth;
    double value = 0;              ///< e^{h} * growth rate
};

/// Upper bound e^{h_m} lim ||phi_n det DF^n / lambda_n||^{1/n}: cylinders up to n_max, the
/// norm sequence up to n_growth on a grid^2 probe grid.
UpperReport lambda_upper(const MapSpec& spec, int n_max, int n_growth = 30, int grid = 64,
                         const ComplexityOptions& opt = {});

} // namespace ptorus
