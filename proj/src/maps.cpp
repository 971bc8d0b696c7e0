#include "ptorus/maps.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ptorus {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double segment_distance(const LineSegment& s, Vec2 p) {
    const Vec2 mid = s.origin + s.dir * (0.5 * s.length);
    const Vec2 r0 = min_image(mid, p);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            const Vec2 r{r0.x + i, r0.y + j};
            const double u = std::clamp(dot(r, s.dir), -0.5 * s.length, 0.5 * s.length);
            best = std::min(best, norm(r - s.dir * u));
        }
    return best;
}

LineSegment line(Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const Vec2 u = normalized(d);
    return {a, u, norm(d), {-u.y, u.x}};
}

// monotone increasing f on [lo, hi]; safeguarded Newton
template <class F, class DF>
double solve_monotone(F f, DF df, double target, double lo, double hi, int branch) {
    double flo = f(lo) - target, fhi = f(hi) - target;
    if (flo > 1e-14 || fhi < -1e-14) throw PreimageFailure(branch, "target outside branch range");
    if (flo >= 0) return lo;
    if (fhi <= 0) return hi;
    double x = lo + (hi - lo) * (-flo) / (fhi - flo);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x) - target;
        if (fx == 0.0) return x;
        if (fx < 0) lo = x; else hi = x;
        if (hi - lo < 1e-16) return 0.5 * (lo + hi);
        const double step = fx / df(x);
        double nx = x - step;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) < 1e-16) return nx;
        x = nx;
    }
    throw PreimageFailure(branch, "no convergence");
}

Side side_for(const Map& m, Vec2 raw, int cell_plus_flag) {
    if (!m.on_gamma(wrap(raw))) return Side::interior;
    return cell_plus_flag ? Side::plus : Side::minus;
}

// sided resolution for maps whose only discontinuity is the circle x = 0
std::pair<Vec2, int> resolve_x0(const Map& m, const SidedPoint& p) {
    const Vec2 v = p.base.vec();
    if (!m.on_gamma(p.base)) return {v, 0};
    switch (p.side) {
    case Side::plus: return {{0.0, v.y}, 0};
    case Side::minus: return {{1.0, v.y}, 0};
    default: throw AmbiguousSide("point on the discontinuity circle needs a side");
    }
}

} // namespace

// ---------------------------------------------------------------- Map

std::pair<Vec2, int> Map::resolve(const SidedPoint& p) const {
    if (p.side == Side::interior && on_gamma(p.base)) throw AmbiguousSide("point on discontinuity needs a side");
    return {p.base.vec(), cell_of(p.base.vec())};
}

bool Map::on_gamma(TorusPoint p, double tol) const {
    for (const auto& s : gamma())
        if (segment_distance(s, p.vec()) <= tol) return true;
    return false;
}

TorusPoint Map::evaluate(const SidedPoint& p) const {
    const auto [raw, cell] = resolve(p);
    return wrap(eval_raw(raw, cell));
}

Mat2 Map::derivative(const SidedPoint& p) const {
    const auto [raw, cell] = resolve(p);
    const Mat2 d = jacobian_raw(raw, cell);
    if (std::abs(d.det()) < 1e-300) throw SingularDerivative("singular derivative in " + name());
    return d;
}

Vec2 Map::step(Vec2 p) const {
    const Vec2 q = wrap(p).vec();
    return eval_raw(q, cell_of(q));
}

Mat2 Map::jacobian(Vec2 p) const {
    const Vec2 q = wrap(p).vec();
    return jacobian_raw(q, cell_of(q));
}

DiscontinuitySet Map::discontinuity_set(double step) const {
    DiscontinuitySet out;
    for (const auto& s : gamma()) {
        PolyCurve c;
        c.segments.push_back(straight_segment(s.origin, s.dir, s.length, Side::interior, step));
        out.curves.push_back(std::move(c));
    }
    out.sigma = sigma();
    return out;
}

// ---------------------------------------------------------------- F_A

AffineA::AffineA(double beta) : beta_(beta) {
    if (!(beta > 1.0) || !std::isfinite(beta)) throw InvalidArgument("affine_a: beta > 1 required");
}

Vec2 AffineA::eval_raw(Vec2 p, int) const { return {beta_ * p.x + p.y, 2.0 * p.y}; }

Mat2 AffineA::jacobian_raw(Vec2, int) const { return {beta_, 1.0, 0.0, 2.0}; }

std::pair<Vec2, int> AffineA::resolve(const SidedPoint& p) const { return resolve_x0(*this, p); }

std::vector<Preimage> AffineA::preimages(TorusPoint yt) const {
    std::vector<Preimage> out;
    const Mat2 d = jacobian_raw({}, 0);
    for (int m = 0; m < 2; ++m) {
        const double y = (yt.y() + m) / 2.0;
        // beta*x + y = yt.x + n with x in [0,1)
        const int n_lo = static_cast<int>(std::ceil(y - yt.x()));
        for (int n = n_lo; yt.x() + n < beta_ + y; ++n) {
            const double x = (yt.x() + n - y) / beta_;
            if (x < 0.0 || x >= 1.0) continue;
            const Vec2 raw{x, y};
            out.push_back({{TorusPoint(raw), side_for(*this, raw, 1)}, branch_of(raw), d});
        }
    }
    return out;
}

int AffineA::max_preimages() const { return 2 * (static_cast<int>(std::ceil(beta_)) + 1); }

std::vector<LineSegment> AffineA::gamma() const { return {{{0, 0}, {0, 1}, 1.0, {1, 0}}}; }

int AffineA::branch_of(Vec2 p) const {
    return static_cast<int>(std::floor(2 * p.y)) * 64 + static_cast<int>(std::floor(beta_ * p.x));
}

std::vector<LineSegment> AffineA::partition_boundaries() const {
    std::vector<LineSegment> out = {line({0, 0}, {0, 1}), line({0, 0}, {1, 0}), line({0, 0.5}, {1, 0.5})};
    for (int n = 1; n < beta_; ++n) out.push_back(line({n / beta_, 0}, {n / beta_, 1}));
    return out;
}

double AffineA::derivative_bound() const { return jacobian_raw({}, 0).sigma_max(); }

// ---------------------------------------------------------------- circle map

CircleMap::CircleMap(double beta, double delta) : beta_(beta), delta_(delta) {
    if (!(beta > 1.0) || !std::isfinite(beta)) throw InvalidArgument("circle map: beta > 1 required");
    if (!(std::abs(delta) < beta - 1.0)) throw InvalidArgument("circle map: |delta| < beta - 1 required");
}

double CircleMap::lift(double x) const { return beta_ * x + delta_ * std::sin(two_pi * x) / two_pi; }

double CircleMap::derivative(double x) const { return beta_ + delta_ * std::cos(two_pi * x); }

double CircleMap::inverse_lift(double target, int branch) const {
    if (affine()) {
        if (target < 0.0 || target > beta_) throw PreimageFailure(branch, "target outside branch range");
        return target / beta_;
    }
    return solve_monotone([this](double x) { return lift(x); }, [this](double x) { return derivative(x); },
                          target, 0.0, 1.0, branch);
}

std::vector<std::pair<double, int>> CircleMap::preimages(double y) const {
    std::vector<std::pair<double, int>> out;
    for (int n = 0; y + n < beta_; ++n) {
        const double x = inverse_lift(y + n, n);
        if (x < 1.0) out.emplace_back(x, n);
    }
    return out;
}

// ---------------------------------------------------------------- F_B

CocycleB::CocycleB(CircleMap base, double amp, double c_lin) : base_(base), amp_(amp), c_lin_(c_lin) {
    if (!std::isfinite(amp) || !std::isfinite(c_lin)) throw InvalidArgument("cocycle_b: non-finite fibre parameters");
}

double CocycleB::fibre_shift(double x) const { return c_lin_ * x + amp_ * std::sin(two_pi * x); }

Vec2 CocycleB::eval_raw(Vec2 p, int) const { return {base_.lift(p.x), 2.0 * p.y + fibre_shift(p.x)}; }

Mat2 CocycleB::jacobian_raw(Vec2 p, int) const {
    return {base_.derivative(p.x), 0.0, c_lin_ + two_pi * amp_ * std::cos(two_pi * p.x), 2.0};
}

std::pair<Vec2, int> CocycleB::resolve(const SidedPoint& p) const { return resolve_x0(*this, p); }

std::vector<Preimage> CocycleB::preimages(TorusPoint yt) const {
    std::vector<Preimage> out;
    for (const auto& [x, n] : base_.preimages(yt.x())) {
        const double y0 = frac((yt.y() - fibre_shift(x)) / 2.0);
        for (int m = 0; m < 2; ++m) {
            const Vec2 raw{x, frac(y0 + 0.5 * m)};
            out.push_back({{TorusPoint(raw), side_for(*this, raw, 1)}, n * 64 + (raw.y >= 0.5 ? 1 : 0), jacobian_raw(raw, 0)});
        }
    }
    return out;
}

int CocycleB::max_preimages() const { return 2 * (static_cast<int>(std::ceil(base_.beta())) + 1); }

std::vector<LineSegment> CocycleB::gamma() const { return {{{0, 0}, {0, 1}, 1.0, {1, 0}}}; }

int CocycleB::branch_of(Vec2 p) const {
    return static_cast<int>(std::floor(base_.lift(p.x))) * 64 + static_cast<int>(std::floor(2 * p.y));
}

std::vector<LineSegment> CocycleB::partition_boundaries() const {
    std::vector<LineSegment> out = {line({0, 0}, {0, 1}), line({0, 0}, {1, 0}), line({0, 0.5}, {1, 0.5})};
    for (int n = 1; n < base_.beta(); ++n) {
        const double x = base_.inverse_lift(n, n);
        out.push_back(line({x, 0}, {x, 1}));
    }
    return out;
}

double CocycleB::derivative_bound() const {
    const double off = std::abs(c_lin_) + two_pi * std::abs(amp_);
    return std::hypot(base_.max_derivative(), 2.0) + off;
}

std::pair<double, double> CocycleB::det_range() const {
    return {2.0 * base_.min_derivative(), 2.0 * base_.max_derivative()};
}

// ---------------------------------------------------------------- F_C

double slit_rho(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double slit_rho_prime(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double w = u * (1.0 - u);
    return -30.0 * w * w;
}

namespace {

double slit_clearance(double eps, double x0, int kmax) {
    double a = x0 - eps;
    double best = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        a = frac(2.0 * a);
        double d = 0.0;
        if (a < x0) d = std::min(x0 - a, a + 1.0 - (x0 + eps));
        else if (a > x0 + eps) d = std::min(a - (x0 + eps), x0 + 1.0 - a);
        best = std::min(best, d);
    }
    return best;
}

} // namespace

SlitC::SlitC(double eps, double x0, double y0) : eps_(eps), x0_(x0), y0_(y0) {
    if (!(eps > 0.0) || !(eps < 0.1)) throw InvalidArgument("slit_c: 0 < eps < 0.1 required");
    if (!(x0 - eps > 0.0 && x0 + eps < 1.0 && y0 - eps > 0.0 && y0 + eps < 1.0))
        throw InvalidArgument("slit_c: slit box must lie inside the fundamental domain");
    if (!(slit_clearance(eps, x0, 40) > 0.0))
        throw InvalidArgument("slit_c: orbit of x0 - eps enters the slit box within 40 steps");
}

double SlitC::search_eps(int kmax, double margin, double eps_max) {
    for (int j = 0; j < 100000; ++j) {
        const double eps = eps_max - 1e-5 * j;
        if (eps <= 0.0) break;
        if (slit_clearance(eps, 0.5, kmax) >= margin) return eps;
    }
    throw InvalidArgument("slit_c: no admissible eps found");
}

bool SlitC::in_j(Vec2 p) const {
    return p.x >= x0_ && p.x < x0_ + eps_ && p.y >= y0_ - eps_ && p.y < y0_ + eps_;
}

double SlitC::a(int k) const {
    double a = x0_ - eps_;
    for (int i = 0; i < k; ++i) a = frac(2.0 * a);
    return a;
}

double SlitC::orbit_clearance(int kmax) const { return slit_clearance(eps_, x0_, kmax); }

Vec2 SlitC::eval_raw(Vec2 p, int cell) const {
    const double sx = cell == 1 ? p.x - eps_ * slit_rho((p.x - x0_) / eps_) : p.x;
    return {2.0 * sx, 2.0 * p.y};
}

Mat2 SlitC::jacobian_raw(Vec2 p, int cell) const {
    const double dsx = cell == 1 ? 1.0 - slit_rho_prime((p.x - x0_) / eps_) : 1.0;
    return {2.0 * dsx, 0.0, 0.0, 2.0};
}

std::pair<Vec2, int> SlitC::resolve(const SidedPoint& p) const {
    const Vec2 v = p.base.vec();
    if (!on_gamma(p.base)) return {v, cell_of(v)};
    switch (p.side) {
    case Side::plus: return {v, 1};
    case Side::minus: return {v, 0};
    default: throw AmbiguousSide("point on the slit boundary needs a side");
    }
}

std::vector<Preimage> SlitC::preimages(TorusPoint yt) const {
    std::vector<Preimage> out;
    auto g = [this](double x) { return x - eps_ * slit_rho((x - x0_) / eps_); };
    auto dg = [this](double x) { return 1.0 - slit_rho_prime((x - x0_) / eps_); };
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            const Vec2 q{(yt.x() + i) / 2.0, (yt.y() + j) / 2.0};
            const int base_branch = 2 * (i + 2 * j);
            if (!in_j(q)) out.push_back({{TorusPoint(q), side_for(*this, q, 0)}, base_branch, jacobian_raw(q, 0)});
            if (q.y >= y0_ - eps_ && q.y < y0_ + eps_ && q.x >= x0_ - eps_ && q.x < x0_ + eps_) {
                const double x = solve_monotone(g, dg, q.x, x0_, x0_ + eps_, base_branch + 1);
                const Vec2 r{x, q.y};
                out.push_back({{TorusPoint(r), side_for(*this, r, 1)}, base_branch + 1, jacobian_raw(r, 1)});
            }
        }
    return out;
}

std::vector<LineSegment> SlitC::gamma() const {
    return {{{x0_, y0_ - eps_}, {0, 1}, 2 * eps_, {1, 0}},
            {{x0_, y0_ + eps_}, {1, 0}, eps_, {0, -1}},
            {{x0_, y0_ - eps_}, {1, 0}, eps_, {0, 1}}};
}

std::vector<TorusPoint> SlitC::sigma() const { return {TorusPoint(x0_, y0_ - eps_), TorusPoint(x0_, y0_ + eps_)}; }

int SlitC::branch_of(Vec2 p) const {
    const bool j = in_j(p);
    const double sx = j ? p.x - eps_ * slit_rho((p.x - x0_) / eps_) : p.x;
    return (j ? 1 : 0) + 2 * (static_cast<int>(std::floor(2 * sx)) + 2 * static_cast<int>(std::floor(2 * p.y)));
}

std::vector<LineSegment> SlitC::partition_boundaries() const {
    std::vector<LineSegment> out = gamma();
    out.push_back(line({0, 0}, {0, 1}));
    out.push_back(line({0, 0}, {1, 0}));
    out.push_back(line({0, 0.5}, {1, 0.5}));
    out.push_back(line({0.5, 0}, {0.5, 1}));
    // S^{-1}(1/2) inside the box
    auto g = [this](double x) { return x - eps_ * slit_rho((x - x0_) / eps_); };
    auto dg = [this](double x) { return 1.0 - slit_rho_prime((x - x0_) / eps_); };
    if (0.5 >= x0_ - eps_ && 0.5 < x0_ + eps_) {
        const double x = solve_monotone(g, dg, 0.5, x0_, x0_ + eps_, 0);
        out.push_back(line({x, y0_ - eps_}, {x, y0_ + eps_}));
    }
    return out;
}

double SlitC::derivative_bound() const { return 2.0 * (1.0 + 15.0 / 8.0); }

// ---------------------------------------------------------------- controls

std::vector<Preimage> Doubling::preimages(TorusPoint y) const {
    std::vector<Preimage> out;
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            out.push_back({{TorusPoint((y.x() + i) / 2.0, (y.y() + j) / 2.0), Side::interior}, i + 2 * j, {2, 0, 0, 2}});
    return out;
}

int Doubling::branch_of(Vec2 p) const {
    return static_cast<int>(std::floor(2 * p.x)) + 2 * static_cast<int>(std::floor(2 * p.y));
}

std::vector<LineSegment> Doubling::partition_boundaries() const {
    return {line({0, 0}, {0, 1}), line({0.5, 0}, {0.5, 1}), line({0, 0}, {1, 0}), line({0, 0.5}, {1, 0.5})};
}

std::vector<Preimage> Identity::preimages(TorusPoint y) const { return {{{y, Side::interior}, 0, {}}}; }

// ---------------------------------------------------------------- weights

Weight Weight::unit() { return {}; }

Weight Weight::inverse_det() {
    Weight w;
    w.kind_ = WeightKind::inverse_det;
    w.label_ = "inverse_det";
    return w;
}

Weight Weight::constant(double c) {
    if (!(c != 0.0) || !std::isfinite(c)) throw InvalidArgument("constant weight must be finite and nonzero");
    Weight w;
    w.kind_ = WeightKind::constant;
    w.c_ = c;
    w.inf_ = w.sup_ = std::abs(c);
    w.label_ = "constant";
    return w;
}

Weight Weight::custom(Fn f, double inf_abs, double sup_abs, std::string label) {
    if (!(inf_abs > 0.0 && inf_abs <= sup_abs && std::isfinite(sup_abs)))
        throw InvalidArgument("custom weight bounds must satisfy 0 < inf <= sup < inf");
    Weight w;
    w.kind_ = WeightKind::custom;
    w.fn_ = std::move(f);
    w.inf_ = inf_abs;
    w.sup_ = sup_abs;
    w.label_ = std::move(label);
    return w;
}

double Weight::operator()(Vec2 p, const Mat2& d) const {
    switch (kind_) {
    case WeightKind::unit: return 1.0;
    case WeightKind::inverse_det: return 1.0 / std::abs(d.det());
    case WeightKind::constant: return c_;
    default: return fn_(p, d);
    }
}

std::pair<double, double> Weight::bounds(const Map& m) const {
    if (kind_ == WeightKind::inverse_det) {
        const auto [lo, hi] = m.det_range();
        return {1.0 / hi, 1.0 / lo};
    }
    return {inf_, sup_};
}

double MapSpec::weight_eval(const SidedPoint& p) const {
    const auto [raw, cell] = map->resolve(p);
    return weight(raw, map->jacobian_raw(raw, cell));
}

} // namespace ptorus
