#include "ptorus/geometry.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace ptorus {

Vec2 normalized(Vec2 a) {
    const double n = norm(a);
    if (n == 0.0) throw InvalidArgument("cannot normalize zero vector");
    return a / n;
}

Mat2 Mat2::inverse() const {
    const double dt = det();
    if (dt == 0.0 || !std::isfinite(dt)) throw SingularDerivative("singular 2x2 matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
}

namespace {
// singular values of a 2x2 matrix in closed form
void singular_values(const Mat2& m, double& smin, double& smax) {
    const double e = (m.a + m.d) / 2, f = (m.a - m.d) / 2;
    const double g = (m.c + m.b) / 2, h = (m.c - m.b) / 2;
    const double q = std::hypot(e, h), r = std::hypot(f, g);
    smax = q + r;
    smin = std::abs(q - r);
}
} // namespace

double Mat2::sigma_min() const {
    double lo, hi;
    singular_values(*this, lo, hi);
    return lo;
}

double Mat2::sigma_max() const {
    double lo, hi;
    singular_values(*this, lo, hi);
    return hi;
}

double frac(double v) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite coordinate");
    double r = v - std::floor(v);
    if (r >= 1.0) r = 0.0;  // v slightly below an integer
    return r;
}

TorusPoint::TorusPoint(double x, double y) : x_(frac(x)), y_(frac(y)) {}

TorusPoint wrap(Vec2 v) { return TorusPoint(v.x, v.y); }

const char* side_name(Side s) {
    switch (s) {
    case Side::plus: return "plus";
    case Side::minus: return "minus";
    default: return "interior";
    }
}

Vec2 min_image(Vec2 p, Vec2 q) {
    Vec2 d = q - p;
    d.x -= std::nearbyint(d.x);
    d.y -= std::nearbyint(d.y);
    return d;
}

double torus_distance(TorusPoint p, TorusPoint q) { return norm(min_image(p, q)); }

std::size_t PolyCurve::sample_count() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.samples.size();
    return n;
}

CurveSegment segment_from_points(const std::vector<Vec2>& lifted, Side side) {
    CurveSegment seg;
    seg.side = side;
    const std::size_t n = lifted.size();
    seg.samples.resize(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) s += norm(lifted[i] - lifted[i - 1]);
        Vec2 t{1.0, 0.0};
        if (n >= 2) {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
            const Vec2 d = lifted[hi] - lifted[lo];
            if (norm(d) > 0.0) t = normalized(d);
        }
        seg.samples[i] = {wrap(lifted[i]), t, s};
    }
    return seg;
}

CurveSegment straight_segment(Vec2 origin, Vec2 dir, double length, Side side, double step) {
    if (!(step > 0.0)) throw InvalidArgument("step must be positive");
    const Vec2 u = normalized(dir);
    const auto n = static_cast<std::size_t>(std::ceil(length / step));
    CurveSegment seg;
    seg.side = side;
    for (std::size_t i = 0; i <= std::max<std::size_t>(n, 1); ++i) {
        const double s = length * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n, 1));
        seg.samples.push_back({wrap(origin + u * s), u, s});
    }
    return seg;
}

double curve_length(const PolyCurve& c) {
    double total = 0.0;
    for (const auto& s : c.segments) total += s.length();
    return total;
}

double max_step(const PolyCurve& c) {
    double m = 0.0;
    for (const auto& seg : c.segments)
        for (std::size_t i = 1; i < seg.samples.size(); ++i)
            m = std::max(m, torus_distance(seg.samples[i - 1].p, seg.samples[i].p));
    return m;
}

namespace {

struct PointGrid {
    int res = 1;
    std::vector<std::vector<Vec2>> cells;

    PointGrid(const PolyCurve& c, int r) : res(r), cells(static_cast<std::size_t>(r) * r) {
        for (const auto& seg : c.segments)
            for (const auto& s : seg.samples) cells[index(cell(s.p.x()), cell(s.p.y()))].push_back(s.p.vec());
    }
    [[nodiscard]] int cell(double v) const { return std::min(res - 1, static_cast<int>(v * res)); }
    [[nodiscard]] std::size_t index(int i, int j) const {
        i = ((i % res) + res) % res;
        j = ((j % res) + res) % res;
        return static_cast<std::size_t>(i) * res + j;
    }

    // nearest sample distance, exact
    [[nodiscard]] double nearest(Vec2 p) const {
        const int ci = cell(p.x), cj = cell(p.y);
        const double w = 1.0 / res;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r <= res / 2 + 1; ++r) {
            if (best <= (r - 1) * w) break;
            for (int i = ci - r; i <= ci + r; ++i)
                for (int j = cj - r; j <= cj + r; ++j) {
                    if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
                    for (const Vec2& q : cells[index(i, j)]) best = std::min(best, norm(min_image(p, q)));
                }
        }
        return best;
    }
};

} // namespace

double min_distance(const PolyCurve& c1, const PolyCurve& c2, double h) {
    if (!(h > 0.0)) throw InvalidArgument("slack must be positive");
    if (max_step(c1) > h * (1 + 1e-12) || max_step(c2) > h * (1 + 1e-12))
        throw InvalidArgument("curve not refined to the requested step");
    if (c1.empty() || c2.empty()) return std::numeric_limits<double>::infinity();
    const int res = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(c2.sample_count()))), 1, 1024);
    const PointGrid grid(c2, res);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seg : c1.segments)
        for (const auto& s : seg.samples) best = std::min(best, grid.nearest(s.p.vec()));
    return std::max(0.0, best - h);
}

PolyCurve refine(const PolyCurve& c, double map_derivative_bound, double target_step, std::size_t max_samples) {
    if (!(target_step > 0.0)) throw InvalidArgument("target_step must be positive");
    const double step = target_step / std::max(1.0, map_derivative_bound);
    PolyCurve out;
    std::size_t total = 0;
    for (const auto& seg : c.segments) {
        if (seg.samples.empty()) continue;
        std::vector<Vec2> pts;
        Vec2 prev = seg.samples.front().p.vec();
        pts.push_back(prev);
        for (std::size_t i = 1; i < seg.samples.size(); ++i) {
            const Vec2 d = min_image(seg.samples[i - 1].p, seg.samples[i].p);
            const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(norm(d) / step)));
            total += n;
            if (total > max_samples) throw BudgetExceeded("refine: sample budget exceeded");
            for (std::size_t k = 1; k <= n; ++k) pts.push_back(prev + d * (static_cast<double>(k) / n));
            prev = prev + d;
        }
        out.segments.push_back(segment_from_points(pts, seg.side));
    }
    return out;
}

void write_csv(std::ostream& os, const PolyCurve& c) {
    os << "segment_id,s,x,y,tx,ty,side\n";
    const auto prec = os.precision(17);
    for (std::size_t i = 0; i < c.segments.size(); ++i)
        for (const auto& s : c.segments[i].samples)
            os << i << ',' << s.s << ',' << s.p.x() << ',' << s.p.y() << ',' << s.t.x << ',' << s.t.y << ','
               << side_name(c.segments[i].side) << '\n';
    os.precision(prec);
}

} // namespace ptorus
