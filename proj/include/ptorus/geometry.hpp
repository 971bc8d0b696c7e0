#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace ptorus {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
Vec2 normalized(Vec2 a);

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    constexpr Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    [[nodiscard]] constexpr double det() const { return a * d - b * c; }
    [[nodiscard]] Mat2 inverse() const;
    /// Smallest and largest singular values.
    [[nodiscard]] double sigma_min() const;
    [[nodiscard]] double sigma_max() const;
    constexpr bool operator==(const Mat2&) const = default;
};

using TangentVector = Vec2;

/// Point of the flat torus; coordinates are kept in [0,1).
class TorusPoint {
public:
    TorusPoint() = default;
    TorusPoint(double x, double y);
    explicit TorusPoint(Vec2 v) : TorusPoint(v.x, v.y) {}

    [[nodiscard]] double x() const { return x_; }
    [[nodiscard]] double y() const { return y_; }
    [[nodiscard]] Vec2 vec() const { return {x_, y_}; }
    bool operator==(const TorusPoint&) const = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
};

enum class Side { plus, minus, interior };

const char* side_name(Side s);

struct SidedPoint {
    TorusPoint base;
    Side side = Side::interior;
};

/// Fractional part in [0,1). Throws InvalidArgument on non-finite input.
double frac(double v);
TorusPoint wrap(Vec2 v);

/// Shortest representative of q - p.
Vec2 min_image(Vec2 p, Vec2 q);
inline Vec2 min_image(TorusPoint p, TorusPoint q) { return min_image(p.vec(), q.vec()); }
double torus_distance(TorusPoint p, TorusPoint q);

struct CurveSample {
    TorusPoint p;
    Vec2 t;        ///< unit tangent
    double s = 0;  ///< arc length within the segment
};

struct CurveSegment {
    std::vector<CurveSample> samples;
    Side side = Side::interior;

    [[nodiscard]] double length() const {
        return samples.size() < 2 ? 0.0 : samples.back().s - samples.front().s;
    }
};

struct PolyCurve {
    std::vector<CurveSegment> segments;

    [[nodiscard]] std::size_t sample_count() const;
    [[nodiscard]] bool empty() const { return sample_count() == 0; }
};

/// Straight segment origin + s*dir, s in [0, length], sampled with spacing <= step.
CurveSegment straight_segment(Vec2 origin, Vec2 dir, double length, Side side, double step);

/// Builds arc lengths and chord tangents for a list of lifted positions.
CurveSegment segment_from_points(const std::vector<Vec2>& lifted, Side side);

double curve_length(const PolyCurve& c);

/// Largest torus distance between consecutive samples.
double max_step(const PolyCurve& c);

/// Lower bound on the distance between two curves refined to step <= h.
/// Throws InvalidArgument if a curve has a larger step.
double min_distance(const PolyCurve& c1, const PolyCurve& c2, double h);

/// Inserts samples so that consecutive images under a map with derivative bound
/// `map_derivative_bound` are within target_step. Throws BudgetExceeded above max_samples.
PolyCurve refine(const PolyCurve& c, double map_derivative_bound, double target_step,
                 std::size_t max_samples = 20'000'000);

/// CSV with header segment_id,s,x,y,tx,ty,side.
void write_csv(std::ostream& os, const PolyCurve& c);

} // namespace ptorus
