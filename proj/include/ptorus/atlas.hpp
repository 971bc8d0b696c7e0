#pragma once

#include "ptorus/orbit.hpp"

#include <memory>
#include <vector>

namespace ptorus {

struct TracePoint {
    Vec2 pos;
    Vec2 tan;             ///< unit tangent of the image curve
    double log_jac = 0;   ///< log Jac_gamma F^k
    double log_phi = 0;   ///< log |phi_k|
};

/// Forward images of a fixed set of points of a boundary curve, without refinement or
/// overlap removal. Cheap to run deep; positions lose precision on expanding maps but
/// tangents and the log accumulators stay accurate.
struct CurveTrace {
    BaseCurve gamma;
    std::vector<double> t;                        ///< parameters of the traced points
    std::vector<std::vector<TracePoint>> levels;  ///< levels[k-1][i] is F^k(gamma(t[i]))

    [[nodiscard]] int depth() const { return static_cast<int>(levels.size()); }
};

/// Traces `samples` points placed at the midpoints of equal pieces of gamma.
CurveTrace trace_curve(const MapSpec& spec, const BaseCurve& gamma, int K, int samples = 64);

/// The forward images Gamma_1..Gamma_J of the discontinuity set, every segment taken from both
/// sides. Levels up to `geometric_depth` (further limited by the orbit sample budget and by the
/// depth of a reused orbit) carry full curve orbits; deeper levels only carry traced tangent
/// directions.
class GammaAtlas {
public:
    static GammaAtlas build(const MapSpec& spec, int J, int geometric_depth, const OrbitOptions& opt = {},
                            std::shared_ptr<const CurveOrbit> reuse = nullptr);

    [[nodiscard]] int depth() const { return J_; }
    [[nodiscard]] int geometric_depth() const { return geo_; }
    [[nodiscard]] const std::vector<std::shared_ptr<const CurveOrbit>>& orbits() const { return orbits_; }

    /// True if some piece of Gamma_j (j <= J) could be parallel to dir within the angle tolerance.
    [[nodiscard]] bool direction_present(int j, Vec2 dir) const;

    /// Index of the pieces of the geometric level Gamma_j, with the atlas angle tolerance.
    [[nodiscard]] ParallelIndex level_index(int j) const;

    /// Smallest distance from p to a piece of idx parallel to dir, or +inf if none lies within radius.
    static double parallel_distance(const ParallelIndex& idx, Vec2 p, Vec2 dir, double radius);

    /// Index radius used by level_index.
    [[nodiscard]] double index_radius() const { return radius_; }

private:
    GammaAtlas() = default;

    int J_ = 0, geo_ = 0;
    double angle_tol_ = 1e-3, radius_ = 1e-4;
    std::vector<std::shared_ptr<const CurveOrbit>> orbits_;
    std::vector<CurveTrace> traces_;
    std::vector<std::vector<char>> buckets_;  ///< direction buckets present per level
};

} // namespace ptorus
