#include "ptorus/edge_index.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ptorus {

EdgeIndex::EdgeIndex(int resolution) : res_(resolution) {
    if (resolution < 1 || resolution > 4096) throw InvalidArgument("edge index resolution out of range");
    cells_.resize(static_cast<std::size_t>(res_) * res_);
}

int EdgeIndex::cell(double v) const {
    return static_cast<int>(std::floor(v * res_));
}

std::size_t EdgeIndex::index(int i, int j) const {
    i = ((i % res_) + res_) % res_;
    j = ((j % res_) + res_) % res_;
    return static_cast<std::size_t>(i) * res_ + j;
}

void EdgeIndex::add(Vec2 a, Vec2 b_lifted, std::uint32_t run, std::uint32_t idx) {
    const auto id = static_cast<std::uint32_t>(edges_.size());
    const Vec2 aw = wrap(a).vec();
    const Vec2 d = b_lifted - a;
    edges_.push_back({aw, d, run, idx});
    stamp_.push_back(0);
    // walk the edge at half-cell spacing
    const double len = norm(d);
    const int n = std::max(1, static_cast<int>(std::ceil(len * res_ * 2)));
    std::size_t last = static_cast<std::size_t>(-1);
    for (int k = 0; k <= n; ++k) {
        const Vec2 p = aw + d * (static_cast<double>(k) / n);
        const std::size_t c = index(cell(p.x), cell(p.y));
        if (c == last) continue;
        auto& bucket = cells_[c];
        if (bucket.empty() || bucket.back() != id) bucket.push_back(id);
        last = c;
    }
}

EdgeIndex::Hit EdgeIndex::closest(const Edge& e, Vec2 p) {
    const Vec2 r = min_image(e.a, p);  // p relative to a
    const double dd = dot(e.d, e.d);
    double u = dd > 0.0 ? dot(r, e.d) / dd : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const Vec2 q = e.d * u;
    return {&e, norm(min_image(q, r)), u};
}

namespace {
constexpr double pi = 3.14159265358979323846;
constexpr int offset_bias = 1 << 23;
} // namespace

ParallelIndex::ParallelIndex(std::vector<Edge> edges, double angle_tol, double radius)
    : angle_tol_(angle_tol), radius_(radius), edges_(std::move(edges)) {
    if (!(angle_tol > 0.0 && angle_tol < 0.5)) throw InvalidArgument("angle_tol out of range");
    if (!(radius > 0.0 && radius < 0.05)) throw InvalidArgument("parallel index radius out of range");
    n_dir_ = static_cast<int>(std::ceil(pi / (2.0 * angle_tol)));
    const double bw = pi / n_dir_;
    h_off_ = std::max(2.0 * radius, 2e-5);
    res_ = std::clamp(static_cast<int>(std::ceil(bw / (16.0 * h_off_))), 4, 256);
    cell_w_ = 1.0 / res_;
    dir_.resize(static_cast<std::size_t>(n_dir_));
    for (int b = 0; b < n_dir_; ++b) dir_[b] = {std::cos((b + 0.5) * bw), std::sin((b + 0.5) * bw)};

    // walk spacing and the offset drift between consecutive walk points
    const double walk = cell_w_ / 16;
    const double slack = walk * 2.0 * bw;
    const double pad = radius + walk;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
    pairs.reserve(edges_.size() * 8);
    std::vector<std::uint64_t> local;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        const double len = norm(ed.d);
        if (len == 0.0) continue;
        const int b = bucket_of(ed.d / len);
        const int n = std::max(1, static_cast<int>(std::ceil(len / walk)));
        local.clear();
        for (int i = 0; i <= n; ++i) {
            const Vec2 q = wrap(ed.a + ed.d * (static_cast<double>(i) / n)).vec();
            const int ci = static_cast<int>(std::floor(q.x * res_)), cj = static_cast<int>(std::floor(q.y * res_));
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const double x0 = (ci + di) * cell_w_, y0 = (cj + dj) * cell_w_;
                    const double bx = std::max({x0 - q.x, 0.0, q.x - (x0 + cell_w_)});
                    const double by = std::max({y0 - q.y, 0.0, q.y - (y0 + cell_w_)});
                    if (std::hypot(bx, by) > pad) continue;
                    const int cci = ((ci + di) % res_ + res_) % res_, ccj = ((cj + dj) % res_ + res_) % res_;
                    const Vec2 rel = min_image(Vec2{cci * cell_w_, ccj * cell_w_}, q);
                    const double off = cross(dir_[b], rel);
                    const int o_lo = static_cast<int>(std::floor((off - slack) / h_off_));
                    const int o_hi = static_cast<int>(std::floor((off + slack) / h_off_));
                    for (int o = o_lo; o <= o_hi; ++o) local.push_back(key(b, cci, ccj, o));
                }
        }
        std::sort(local.begin(), local.end());
        local.erase(std::unique(local.begin(), local.end()), local.end());
        for (auto k : local) pairs.emplace_back(k, static_cast<std::uint32_t>(e));
    }
    std::sort(pairs.begin(), pairs.end());
    ids_.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i == 0 || pairs[i].first != pairs[i - 1].first) {
            keys_.push_back(pairs[i].first);
            start_.push_back(static_cast<std::uint32_t>(i));
        }
        ids_.push_back(pairs[i].second);
    }
    start_.push_back(static_cast<std::uint32_t>(pairs.size()));
    stamp_.assign(edges_.size(), 0);
}

int ParallelIndex::bucket_of(Vec2 u) const {
    double th = std::atan2(u.y, u.x);
    if (th < 0.0) th += pi;
    if (th >= pi) th -= pi;
    const int b = static_cast<int>(th / (pi / n_dir_));
    return std::clamp(b, 0, n_dir_ - 1);
}

std::uint64_t ParallelIndex::key(int b, int ci, int cj, int o) const {
    ci = ((ci % res_) + res_) % res_;
    cj = ((cj % res_) + res_) % res_;
    const auto cell = (static_cast<std::uint64_t>(b) * res_ + ci) * res_ + cj;
    return (cell << 24) | static_cast<std::uint64_t>(std::clamp(o + offset_bias, 0, (1 << 24) - 1));
}

std::pair<std::size_t, std::size_t> ParallelIndex::lookup(std::uint64_t k) const {
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
    if (it == keys_.end() || *it != k) return {0, 0};
    const auto i = static_cast<std::size_t>(it - keys_.begin());
    return {start_[i], start_[i + 1]};
}

} // namespace ptorus
