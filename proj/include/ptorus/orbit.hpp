#pragma once

#include "ptorus/edge_index.hpp"
#include "ptorus/maps.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace ptorus {

/// Straight boundary curve gamma: origin + t*dir, t in [0, length], on the given side,
/// with jump direction `normal`.
struct BaseCurve {
    Vec2 origin;
    Vec2 dir;
    double length = 1.0;
    Side side = Side::interior;
    Vec2 normal{1.0, 0.0};

    [[nodiscard]] Vec2 point(double t) const { return origin + dir * t; }
};

/// The boundary curve used for each family: the x = 1^- side of the circle for affine_a and
/// cocycle_b, the inner side of the slit for slit_c, the circle x = 0 for the controls.
BaseCurve default_gamma(const Map& m);

/// Every discontinuity segment taken from both sides.
std::vector<BaseCurve> sided_gamma(const Map& m);

struct OrbitOptions {
    double max_step = 0.25;     ///< chord bound on stored samples (capped by the map's feature step)
    double tol_cover = 1e-8;    ///< distance under which parallel pieces count as the same curve
    double angle_tol = 1e-3;    ///< |sin| bound for parallel pieces
    double tol_sigma = 1e-9;
    std::size_t max_samples = 4'000'000;  ///< per level
    bool collapse = true;
    bool truncate_on_budget = false;  ///< stop at the last level within budget instead of throwing
};

struct OrbitSample {
    double t = 0;       ///< parameter of the source point on gamma
    Vec2 pos;           ///< wrapped position
    int ix = 0, iy = 0; ///< lift of pos within its run
    Vec2 tan;           ///< unit tangent of gamma_k
    Vec2 normal;        ///< v_k = DF^k v
    double jac = 1;     ///< Jac_gamma F^k
    double phi = 1;     ///< phi_k
    double alpha = 1;   ///< alpha_k
    double s = 0;       ///< arc length within the run

    [[nodiscard]] Vec2 lifted() const { return {pos.x + ix, pos.y + iy}; }
};

struct OrbitRun {
    std::vector<OrbitSample> samples;
    [[nodiscard]] double length() const { return samples.size() < 2 ? 0.0 : samples.back().s - samples.front().s; }
};

struct OrbitLevel {
    int k = 0;
    std::vector<OrbitRun> runs;
    double alpha_spread = 0;         ///< largest relative alpha disagreement on overlaps
    std::size_t alpha_worst_sample = 0;
    std::size_t overlap_samples = 0; ///< samples dropped as covered by earlier pieces
    std::size_t crossings = 0;       ///< splits at the discontinuity set before mapping
    double bridged = 0;              ///< length of sub-resolution gaps left where kept pieces meet covered ones

    /// Length of the set gamma_k, counting overlaps once.

    [[nodiscard]] double length() const;
    [[nodiscard]] std::size_t sample_count() const;
};

/// Forward images gamma_1..gamma_K of a boundary curve with transported normals, curve
/// Jacobians, weight products and alpha.
class CurveOrbit {
public:
    static CurveOrbit propagate(const MapSpec& spec, const BaseCurve& gamma, int K, const OrbitOptions& opt = {});

    [[nodiscard]] int depth() const { return static_cast<int>(levels_.size()); }
    [[nodiscard]] const OrbitLevel& level(int k) const;
    [[nodiscard]] const MapSpec& spec() const { return spec_; }
    [[nodiscard]] const BaseCurve& gamma() const { return gamma_; }
    [[nodiscard]] const OrbitOptions& options() const { return opt_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] std::size_t sigma_hits() const { return sigma_hits_; }

    /// State of F^k(gamma(t)), k >= 1, computed from scratch (lift offsets zero).
    [[nodiscard]] OrbitSample recompute(double t, int k) const;
    /// One application of F to a stored state.
    [[nodiscard]] OrbitSample advance(const OrbitSample& s) const;

    [[nodiscard]] PolyCurve curve(int k) const;
    [[nodiscard]] std::vector<ParallelIndex::Edge> edges(int k) const;

    /// CSV with header s,x,y,tx,ty,vx,vy,jac_prod,phi_prod,alpha.
    void write_csv(std::ostream& os, int k) const;

private:
    CurveOrbit(const MapSpec& spec, const BaseCurve& gamma, const OrbitOptions& opt);
    [[nodiscard]] int split_key(const OrbitSample& s) const;
    [[nodiscard]] OrbitSample relift(const OrbitSample& prev, OrbitSample s) const;
    void refine_run(std::vector<OrbitSample>& out, const OrbitRun& run, int k, double chord) const;
    std::vector<OrbitRun> split_run(const std::vector<OrbitSample>& samples, int k, std::size_t& crossings) const;
    void collapse(OrbitLevel& lvl) const;

    MapSpec spec_;
    BaseCurve gamma_;
    OrbitOptions opt_;
    double step_ = 0.25;
    std::size_t sigma_hits_ = 0;
    std::vector<OrbitLevel> levels_;
};

/// v_k per sample of gamma_k; throws ParallelNormal if some v_k is parallel to gamma_k.
std::vector<Vec2> transport_normal(const CurveOrbit& orbit, int k, double tol = 1e-10);

/// ||DF(x) t(x)|| along a sampled curve; segment sides are used on the discontinuity set.
std::vector<double> curve_jacobian(const Map& m, const PolyCurve& c);

/// alpha_k arrays for k = 1..depth; throws A1Violation if the overlap spread exceeds tol_alpha.
std::vector<std::vector<double>> compute_alpha(const CurveOrbit& orbit, double tol_alpha = 1e-8);

} // namespace ptorus
