#pragma once

#include "ptorus/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace ptorus {

/// Uniform-grid index of short straight edges on the torus.
/// Queries see every edge passing within one cell width of the point.
class EdgeIndex {
public:
    struct Edge {
        Vec2 a;         ///< start, wrapped into [0,1)^2
        Vec2 d;         ///< end minus start (not wrapped)
        std::uint32_t run = 0;
        std::uint32_t idx = 0;  ///< caller-defined payload, usually the start sample index
    };

    struct Hit {
        const Edge* edge = nullptr;
        double dist = 0;  ///< torus distance from the query to the edge
        double u = 0;     ///< position of the closest point along the edge in [0,1]
    };

    explicit EdgeIndex(int resolution = 128);

    [[nodiscard]] int resolution() const { return res_; }
    [[nodiscard]] double cell_width() const { return 1.0 / res_; }
    [[nodiscard]] std::size_t size() const { return edges_.size(); }
    [[nodiscard]] const Edge& edge(std::size_t i) const { return edges_[i]; }

    void add(Vec2 a, Vec2 b_lifted, std::uint32_t run, std::uint32_t idx);

    /// Calls f(const Hit&) for every edge within `radius` (<= cell width) of p.
    template <class F>
    void for_each_near(Vec2 p, double radius, F&& f) const {
        const int ci = cell(p.x), cj = cell(p.y);
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                for (std::uint32_t e : cells_[index(ci + di, cj + dj)]) {
                    if (stamp_[e] == query_) continue;
                    stamp_[e] = query_;
                    const Hit h = closest(edges_[e], p);
                    if (h.dist <= radius) f(h);
                }
            }
        ++query_;
    }

    static Hit closest(const Edge& e, Vec2 p);

private:
    [[nodiscard]] int cell(double v) const;
    [[nodiscard]] std::size_t index(int i, int j) const;

    int res_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::uint32_t>> cells_;
    mutable std::vector<std::uint64_t> stamp_;
    mutable std::uint64_t query_ = 1;
};

/// Static index of edges grouped by direction and by the offset of their supporting line.
/// Finds edges nearly parallel to a query direction that pass close to a query point, which
/// stays cheap on families of dense parallel lines where a plain grid degenerates.
class ParallelIndex {
public:
    struct Edge {
        Vec2 a;         ///< start, wrapped
        Vec2 d;         ///< end minus start
        std::uint32_t run = 0;
        std::uint32_t idx = 0;
        double s0 = 0;  ///< arc length of the start within its run
    };

    struct Hit {
        const Edge* edge = nullptr;
        double dist = 0;
        double u = 0;
        double sin_angle = 0;
    };

    /// angle_tol bounds |sin| between query and edge directions; radius is the largest query radius.
    ParallelIndex(std::vector<Edge> edges, double angle_tol, double radius);

    [[nodiscard]] std::size_t size() const { return edges_.size(); }
    [[nodiscard]] const Edge& edge(std::size_t i) const { return edges_[i]; }
    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] double angle_tol() const { return angle_tol_; }

    /// Calls f(const Hit&) for every edge with |sin(angle)| <= angle_tol within `radius` of p.
    template <class F>
    void for_each_parallel(Vec2 p, Vec2 dir, double radius, F&& f) const {
        const Vec2 q = wrap(p).vec();
        const Vec2 u = normalized(dir);
        const int b = bucket_of(u);
        const int ci = cell_of(q.x), cj = cell_of(q.y);
        const Vec2 rel = min_image(Vec2{ci * cell_w_, cj * cell_w_}, q);
        for (int db = -1; db <= 1; ++db) {
            const int bb = (b + db + n_dir_) % n_dir_;
            const double off = cross(dir_[bb], rel);
            const int o_lo = static_cast<int>(std::floor((off - radius) / h_off_));
            const int o_hi = static_cast<int>(std::floor((off + radius) / h_off_));
            for (int oo = o_lo; oo <= o_hi; ++oo) {
                const auto [lo, hi] = lookup(key(bb, ci, cj, oo));
                for (std::size_t k = lo; k < hi; ++k) {
                    const std::uint32_t e = ids_[k];
                    if (stamp_[e] == query_) continue;
                    stamp_[e] = query_;
                    const Edge& ed = edges_[e];
                    const double len = norm(ed.d);
                    if (len == 0.0) continue;
                    const double s = std::abs(cross(u, ed.d)) / len;
                    if (s > angle_tol_) continue;
                    const EdgeIndex::Hit h = EdgeIndex::closest({ed.a, ed.d, ed.run, ed.idx}, q);
                    if (h.dist <= radius) f(Hit{&ed, h.dist, h.u, s});
                }
            }
        }
        ++query_;
    }

private:
    [[nodiscard]] int bucket_of(Vec2 u) const;
    [[nodiscard]] int cell_of(double v) const { return ((static_cast<int>(std::floor(v * res_)) % res_) + res_) % res_; }
    [[nodiscard]] std::uint64_t key(int b, int ci, int cj, int o) const;
    [[nodiscard]] std::pair<std::size_t, std::size_t> lookup(std::uint64_t k) const;

    double angle_tol_, radius_;
    int n_dir_;
    int res_;
    double cell_w_, h_off_;
    std::vector<Vec2> dir_;
    std::vector<Edge> edges_;
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> ids_;
    mutable std::vector<std::uint64_t> stamp_;
    mutable std::uint64_t query_ = 1;
};

} // namespace ptorus
