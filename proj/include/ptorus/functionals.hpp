#pragma once

#include "ptorus/atlas.hpp"
#include "ptorus/observable.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace ptorus {

struct JumpProbe {
    Vec2 x;
    Vec2 v;              ///< jump direction; only its orientation matters
    double eps0 = 1e-3;
    int levels = 7;      ///< eps_j = eps0 * 2^-j, j = 0..levels-1
    int order = 2;       ///< Richardson eliminations
};

struct JumpResult {
    double value = 0;
    double error = 0;    ///< difference of the last two extrapolants
    double eps0 = 0;     ///< top of the ladder actually used
};

/// lim h(x + eps v) - h(x - eps v) by Richardson extrapolation of the symmetric differences.
JumpResult jump(const Observable& h, const JumpProbe& probe);

/// The curves Gamma_1..Gamma_n on which L^n of a smooth function can jump.
class DiscontinuityField {
public:
    static DiscontinuityField build(const MapSpec& spec, int n, const OrbitOptions& opt = {});

    [[nodiscard]] int depth() const { return n_; }
    [[nodiscard]] std::size_t edge_count() const { return index_.size(); }
    /// Largest clearance query radius.
    [[nodiscard]] double max_radius() const { return index_.cell_width(); }

    /// Distance from p to the nearest piece of the field, skipping pieces through p parallel to
    /// `tangent` (the curve p lies on). Returns cap if nothing lies closer.
    [[nodiscard]] double clearance(Vec2 p, Vec2 tangent, double cap) const;

    /// Positions u in (0,1) where the short segment a + u d crosses a transversal piece of the field.
    [[nodiscard]] std::vector<double> crossings(Vec2 a, Vec2 d) const;

private:
    DiscontinuityField() = default;
    int n_ = 0;
    double angle_tol_ = 1e-3;
    double tol_on_ = 1e-9;
    EdgeIndex index_{256};
};

struct FunctionalOptions {
    int nodes = 8;                 ///< Gauss-Legendre nodes per panel
    double panel_length = 0.125;  ///< largest panel arc length, further capped by the observable's feature scale
    bool estimate_error = true;    ///< repeat with halved panels
    JumpProbe ladder;              ///< eps0, levels and order of the jump ladder
    double min_clearance = 1e-12;  ///< nodes closer than this to the field are dropped
    double tol_len = 1e-6;         ///< largest dropped arc length
};

struct EllResult {
    double value = 0;
    double quad_error = 0;
    double jump_error = 0;
    std::size_t nodes = 0, panels = 0, dropped = 0;
    double dropped_length = 0;

    [[nodiscard]] double error() const { return quad_error + jump_error; }
};

struct DualityRow {
    int k = 0;
    double lhs = 0;          ///< ell_{k+1}(L h)
    double rhs = 0;          ///< ell_k(h)
    double residual = 0;
    double error_budget = 0;
};

void write_duality_csv(std::ostream& os, const std::vector<DualityRow>& rows);

struct ShiftRow {
    int k = 0;
    double t = 0;            ///< parameter on gamma of the probe
    Vec2 y;                  ///< probe on gamma_{k+1}
    double lhs = 0;          ///< Jmp(L h, y, v_{k+1})
    double rhs = 0;          ///< sum over x in gamma_k with F x = y of phi(x) Jmp(h, x, v_k)
    int terms = 0;
    double residual = 0;
};

struct XiResult {
    double value = 0;
    double tail_bound = 0;
    std::vector<double> ell;  ///< ell_1..ell_K of the observable
};

/// Boundary functionals ell_k(h) = integral over gamma_k of alpha_k Jmp(h, ., v_k) for
/// observables whose discontinuities lie in Gamma_1..Gamma_n.
class BoundaryFunctionals {
public:
    BoundaryFunctionals(std::shared_ptr<const CurveOrbit> orbit, int field_depth, const FunctionalOptions& opt = {});

    [[nodiscard]] const CurveOrbit& orbit() const { return *orbit_; }
    [[nodiscard]] const MapSpec& spec() const { return orbit_->spec(); }
    [[nodiscard]] const DiscontinuityField& field() const { return *field_; }
    [[nodiscard]] const FunctionalOptions& options() const { return opt_; }

    /// Jump at a point of a curve with the given tangent, ladder shrunk to keep clear of the field.
    [[nodiscard]] JumpResult jump_on_curve(const Observable& h, Vec2 x, Vec2 v, Vec2 tangent) const;

    [[nodiscard]] EllResult ell(int k, const Observable& h) const;

    /// ell_{k+1}(L h) against ell_k(h), k >= 1.
    [[nodiscard]] DualityRow verify_duality(const ObsPtr& h, int k) const;

    /// Truncated sum over k = 1..K of lambda^k ell_k(h); |lambda| < 0.9 lambda_hat required.
    [[nodiscard]] XiResult xi_lambda(double lambda, const Observable& h, int K, double lambda_hat) const;

    /// Probes of the shift identity at `count` random points of gamma_{k+1}.
    [[nodiscard]] std::vector<ShiftRow> shift_identity(const ObsPtr& h, int k, int count, std::uint64_t seed) const;

private:
    std::shared_ptr<const CurveOrbit> orbit_;
    std::shared_ptr<const DiscontinuityField> field_;
    FunctionalOptions opt_;
};

struct H0 {
    ObsPtr g;         ///< bump on the boundary curve
    ObsPtr h0;        ///< L g / ell_1(L g)
    Vec2 center;
    double radius = 0;
    double ell1_raw = 0;  ///< ell_1(L g) before scaling
};

/// Normalised observable with ell_1(h0) = 1. The bump sits on the midpoint of gamma with radius
/// a quarter of the distance to the other discontinuity segments, capped at 0.1, or `radius` if given.
H0 build_h0(const BoundaryFunctionals& f, double radius = 0.0);

/// K h = ell_1(L h) h0.
ObsPtr rank_one_K(const BoundaryFunctionals& f, const H0& h0, const ObsPtr& h);

/// (L - K) h.
ObsPtr reduced_transfer(const BoundaryFunctionals& f, const H0& h0, const ObsPtr& h);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

} // namespace ptorus
