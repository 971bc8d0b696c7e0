#pragma once

#include "ptorus/geometry.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ptorus {

/// Straight piece of a discontinuity or partition curve, origin + s*dir for s in [0, length].
struct LineSegment {
    Vec2 origin;
    Vec2 dir;       ///< unit
    double length = 0;
    Vec2 normal;    ///< unit, points to the plus side
};

struct Preimage {
    SidedPoint point;
    int branch_id = 0;
    Mat2 derivative;  ///< DF at the preimage on its branch
};

struct DiscontinuitySet {
    std::vector<PolyCurve> curves;
    std::vector<TorusPoint> sigma;
};

/// Piecewise smooth torus map.
///
/// Points are handled in raw coordinates of the fundamental domain [0,1]^2 together with a
/// smoothness cell id; the formula of a cell is its C^r extension to the closure.
/// Side::plus / Side::minus on a discontinuity curve select the cell on the side its normal
/// points to / away from.
class Map {
public:
    virtual ~Map() = default;

    [[nodiscard]] virtual std::string name() const = 0;

    /// Smoothness cell of a point of [0,1)^2.
    [[nodiscard]] virtual int cell_of(Vec2 p) const = 0;
    [[nodiscard]] virtual Vec2 eval_raw(Vec2 p, int cell) const = 0;
    [[nodiscard]] virtual Mat2 jacobian_raw(Vec2 p, int cell) const = 0;

    /// Raw coordinates and cell of a sided point; throws AmbiguousSide for interior points on the
    /// discontinuity set.
    [[nodiscard]] virtual std::pair<Vec2, int> resolve(const SidedPoint& p) const;

    /// Complete list of preimages of y.
    [[nodiscard]] virtual std::vector<Preimage> preimages(TorusPoint y) const = 0;
    [[nodiscard]] virtual int max_preimages() const = 0;

    [[nodiscard]] virtual std::vector<LineSegment> gamma() const = 0;
    [[nodiscard]] virtual std::vector<TorusPoint> sigma() const { return {}; }

    /// Injectivity domain used for cylinder sets and the boundaries between them.
    [[nodiscard]] virtual int branch_of(Vec2 p) const = 0;
    [[nodiscard]] virtual std::vector<LineSegment> partition_boundaries() const = 0;

    /// Upper bound of ||DF||, used to size refinement steps.
    [[nodiscard]] virtual double derivative_bound() const = 0;
    /// Range of |det DF|.
    [[nodiscard]] virtual std::pair<double, double> det_range() const = 0;

    /// True if crossing x = 0 on the torus crosses the discontinuity set.
    [[nodiscard]] virtual bool seam_x() const { return false; }

    /// Default step for sampling curves so that every smoothness cell is resolved.
    [[nodiscard]] virtual double feature_step() const { return 0.25; }

    /// True if p lies within tol of a discontinuity segment.
    [[nodiscard]] bool on_gamma(TorusPoint p, double tol = 1e-12) const;

    [[nodiscard]] TorusPoint evaluate(const SidedPoint& p) const;
    [[nodiscard]] Mat2 derivative(const SidedPoint& p) const;

    /// Lenient evaluation: the cell is read off the wrapped coordinates.
    [[nodiscard]] Vec2 step(Vec2 p) const;
    [[nodiscard]] Mat2 jacobian(Vec2 p) const;

    [[nodiscard]] DiscontinuitySet discontinuity_set(double step) const;
};

using MapPtr = std::shared_ptr<const Map>;

/// F_A(x,y) = ([beta x + y], [2y]).
class AffineA final : public Map {
public:
    explicit AffineA(double beta);
    [[nodiscard]] double beta() const { return beta_; }

    std::string name() const override { return "affine_a"; }
    int cell_of(Vec2) const override { return 0; }
    Vec2 eval_raw(Vec2 p, int cell) const override;
    Mat2 jacobian_raw(Vec2 p, int cell) const override;
    std::pair<Vec2, int> resolve(const SidedPoint& p) const override;
    std::vector<Preimage> preimages(TorusPoint y) const override;
    int max_preimages() const override;
    std::vector<LineSegment> gamma() const override;
    int branch_of(Vec2 p) const override;
    std::vector<LineSegment> partition_boundaries() const override;
    double derivative_bound() const override;
    std::pair<double, double> det_range() const override { return {2 * beta_, 2 * beta_}; }
    bool seam_x() const override { return true; }

private:
    double beta_;
};

/// Expanding circle map with a single discontinuity at x = 0:
/// T(x) = beta*x + delta*sin(2 pi x)/(2 pi) mod 1.
class CircleMap {
public:
    CircleMap(double beta, double delta = 0.0);
    [[nodiscard]] double beta() const { return beta_; }
    [[nodiscard]] double delta() const { return delta_; }
    [[nodiscard]] bool affine() const { return delta_ == 0.0; }
    /// Lift on [0,1]; lift(0) = 0, lift(1) = beta.
    [[nodiscard]] double lift(double x) const;
    [[nodiscard]] double derivative(double x) const;
    [[nodiscard]] double min_derivative() const { return beta_ - std::abs(delta_); }
    [[nodiscard]] double max_derivative() const { return beta_ + std::abs(delta_); }
    /// Solves lift(x) = target on [0,1]; throws PreimageFailure tagged with `branch`.
    [[nodiscard]] double inverse_lift(double target, int branch) const;
    /// All x in [0,1) with T(x) = y.
    [[nodiscard]] std::vector<std::pair<double, int>> preimages(double y) const;

private:
    double beta_;
    double delta_;
};

/// F_B(x,y) = (T(x), 2y + c_lin*x + amp*sin(2 pi x)).
class CocycleB final : public Map {
public:
    CocycleB(CircleMap base, double amp, double c_lin);
    [[nodiscard]] const CircleMap& base() const { return base_; }

    std::string name() const override { return "cocycle_b"; }
    int cell_of(Vec2) const override { return 0; }
    Vec2 eval_raw(Vec2 p, int cell) const override;
    Mat2 jacobian_raw(Vec2 p, int cell) const override;
    std::pair<Vec2, int> resolve(const SidedPoint& p) const override;
    std::vector<Preimage> preimages(TorusPoint y) const override;
    int max_preimages() const override;
    std::vector<LineSegment> gamma() const override;
    int branch_of(Vec2 p) const override;
    std::vector<LineSegment> partition_boundaries() const override;
    double derivative_bound() const override;
    std::pair<double, double> det_range() const override;
    bool seam_x() const override { return true; }

private:
    [[nodiscard]] double fibre_shift(double x) const;
    CircleMap base_;
    double amp_;
    double c_lin_;
};

/// Quintic cut-off: 1 for u <= 0, 0 for u >= 1, C^2 at the joins.
double slit_rho(double u);
double slit_rho_prime(double u);

/// F_C = doubling o S with S(x,y) = (x - eps*rho((x-x0)/eps), y) on J = [x0,x0+eps] x [y0-eps,y0+eps].
class SlitC final : public Map {
public:
    SlitC(double eps, double x0 = 0.5, double y0 = 0.5);
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] double x0() const { return x0_; }
    [[nodiscard]] double y0() const { return y0_; }
    [[nodiscard]] bool in_j(Vec2 p) const;
    /// a_k = f^k(x0 - eps) with f the doubling map.
    [[nodiscard]] double a(int k) const;

    /// Smallest distance of a_1..a_kmax from [x0, x0+eps].
    [[nodiscard]] double orbit_clearance(int kmax) const;

    /// Largest eps <= eps_max on a grid whose a_k (k <= kmax) stay `margin` away from J's x-range.
    static double search_eps(int kmax = 40, double margin = 1e-3, double eps_max = 0.02);

    std::string name() const override { return "slit_c"; }
    int cell_of(Vec2 p) const override { return in_j(p) ? 1 : 0; }
    Vec2 eval_raw(Vec2 p, int cell) const override;
    Mat2 jacobian_raw(Vec2 p, int cell) const override;
    std::pair<Vec2, int> resolve(const SidedPoint& p) const override;
    std::vector<Preimage> preimages(TorusPoint y) const override;
    int max_preimages() const override { return 8; }
    std::vector<LineSegment> gamma() const override;
    std::vector<TorusPoint> sigma() const override;
    int branch_of(Vec2 p) const override;
    std::vector<LineSegment> partition_boundaries() const override;
    double derivative_bound() const override;
    std::pair<double, double> det_range() const override { return {4.0, 4.0 * (1.0 + 15.0 / 8.0)}; }
    double feature_step() const override { return eps_ / 4; }

private:
    double eps_, x0_, y0_;
};

/// Smooth control map (2x, 2y).
class Doubling final : public Map {
public:
    std::string name() const override { return "doubling"; }
    int cell_of(Vec2) const override { return 0; }
    Vec2 eval_raw(Vec2 p, int) const override { return p * 2.0; }
    Mat2 jacobian_raw(Vec2, int) const override { return {2, 0, 0, 2}; }
    std::pair<Vec2, int> resolve(const SidedPoint& p) const override { return {p.base.vec(), 0}; }
    std::vector<Preimage> preimages(TorusPoint y) const override;
    int max_preimages() const override { return 4; }
    std::vector<LineSegment> gamma() const override { return {}; }
    int branch_of(Vec2 p) const override;
    std::vector<LineSegment> partition_boundaries() const override;
    double derivative_bound() const override { return 2.0; }
    std::pair<double, double> det_range() const override { return {4.0, 4.0}; }
};

/// Identity control map.
class Identity final : public Map {
public:
    std::string name() const override { return "identity"; }
    int cell_of(Vec2) const override { return 0; }
    Vec2 eval_raw(Vec2 p, int) const override { return p; }
    Mat2 jacobian_raw(Vec2, int) const override { return {}; }
    std::pair<Vec2, int> resolve(const SidedPoint& p) const override { return {p.base.vec(), 0}; }
    std::vector<Preimage> preimages(TorusPoint y) const override;
    int max_preimages() const override { return 1; }
    std::vector<LineSegment> gamma() const override { return {}; }
    int branch_of(Vec2) const override { return 0; }
    std::vector<LineSegment> partition_boundaries() const override { return {}; }
    double derivative_bound() const override { return 1.0; }
    std::pair<double, double> det_range() const override { return {1.0, 1.0}; }
};

enum class WeightKind { unit, inverse_det, constant, custom };

/// Weight phi of the transfer operator.
class Weight {
public:
    using Fn = std::function<double(Vec2 p, const Mat2& d)>;

    static Weight unit();
    static Weight inverse_det();
    static Weight constant(double c);
    /// Closed-form weight with declared bounds on |phi|.
    static Weight custom(Fn f, double inf_abs, double sup_abs, std::string label = "custom");

    [[nodiscard]] WeightKind kind() const { return kind_; }
    [[nodiscard]] const std::string& label() const { return label_; }
    /// Weight at raw point p of a cell whose derivative is d.
    [[nodiscard]] double operator()(Vec2 p, const Mat2& d) const;
    [[nodiscard]] std::pair<double, double> bounds(const Map& m) const;

private:
    WeightKind kind_ = WeightKind::unit;
    double c_ = 1.0;
    Fn fn_;
    double inf_ = 1.0, sup_ = 1.0;
    std::string label_ = "unit";
};

struct MapSpec {
    MapPtr map;
    Weight weight;

    [[nodiscard]] double weight_eval(const SidedPoint& p) const;
};

} // namespace ptorus
