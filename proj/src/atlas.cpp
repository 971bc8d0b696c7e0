#include "ptorus/atlas.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptorus {

namespace {

constexpr double pi = 3.14159265358979323846;

int direction_buckets(double angle_tol) { return static_cast<int>(std::ceil(pi / (2.0 * angle_tol))); }

int bucket(Vec2 u, int n) {
    double th = std::atan2(u.y, u.x);
    if (th < 0.0) th += pi;
    if (th >= pi) th -= pi;
    return std::clamp(static_cast<int>(th / (pi / n)), 0, n - 1);
}

bool same_curve(const BaseCurve& a, const BaseCurve& b) {
    return a.side == b.side && a.length == b.length && a.origin.x == b.origin.x && a.origin.y == b.origin.y &&
           a.dir.x == b.dir.x && a.dir.y == b.dir.y;
}

} // namespace

CurveTrace trace_curve(const MapSpec& spec, const BaseCurve& gamma, int K, int samples) {
    if (K < 1 || samples < 1) throw InvalidArgument("trace_curve: K >= 1 and samples >= 1 required");
    const Map& m = *spec.map;
    CurveTrace tr;
    tr.gamma = gamma;
    tr.levels.assign(static_cast<std::size_t>(K), {});
    for (int i = 0; i < samples; ++i) {
        const double t = gamma.length * (i + 0.5) / samples;
        tr.t.push_back(t);
        auto [raw, cell] = m.resolve({wrap(gamma.point(t)), gamma.side});
        Vec2 tan = gamma.dir;
        double lj = 0, lp = 0;
        for (int k = 1; k <= K; ++k) {
            const Mat2 d = m.jacobian_raw(raw, cell);
            const double w = spec.weight(raw, d);
            const Vec2 dt = d * tan;
            const double jj = norm(dt);
            lj += std::log(jj);
            lp += std::log(std::abs(w));
            tan = dt / jj;
            const Vec2 next = wrap(m.eval_raw(raw, cell)).vec();
            tr.levels[static_cast<std::size_t>(k - 1)].push_back({next, tan, lj, lp});
            raw = next;
            cell = m.cell_of(raw);
        }
    }
    return tr;
}

GammaAtlas GammaAtlas::build(const MapSpec& spec, int J, int geometric_depth, const OrbitOptions& opt,
                             std::shared_ptr<const CurveOrbit> reuse) {
    if (J < 1) throw InvalidArgument("atlas: J >= 1 required");
    GammaAtlas a;
    a.J_ = J;
    a.geo_ = std::clamp(geometric_depth, 0, J);
    a.angle_tol_ = opt.angle_tol;
    a.radius_ = std::max(1e-5, 10 * opt.tol_cover);
    const int nb = direction_buckets(a.angle_tol_);
    a.buckets_.assign(static_cast<std::size_t>(J), std::vector<char>(static_cast<std::size_t>(nb), 0));

    OrbitOptions budget = opt;
    budget.truncate_on_budget = true;
    for (const auto& side : sided_gamma(*spec.map)) {
        if (a.geo_ > 0) {
            if (reuse && same_curve(reuse->gamma(), side)) {
                a.orbits_.push_back(reuse);
                a.geo_ = std::min(a.geo_, reuse->depth());
            } else {
                a.orbits_.push_back(std::make_shared<const CurveOrbit>(CurveOrbit::propagate(spec, side, a.geo_, budget)));
                a.geo_ = std::min(a.geo_, a.orbits_.back()->depth());
            }
        }
        a.traces_.push_back(trace_curve(spec, side, J));
    }
    for (const auto& o : a.orbits_)
        for (int j = 1; j <= a.geo_; ++j)
            for (const auto& r : o->level(j).runs)
                for (const auto& s : r.samples) a.buckets_[static_cast<std::size_t>(j - 1)][bucket(s.tan, nb)] = 1;
    for (const auto& tr : a.traces_)
        for (int j = 1; j <= J; ++j)
            for (const auto& p : tr.levels[static_cast<std::size_t>(j - 1)])
                a.buckets_[static_cast<std::size_t>(j - 1)][bucket(p.tan, nb)] = 1;
    return a;
}

bool GammaAtlas::direction_present(int j, Vec2 dir) const {
    if (j < 1 || j > J_) throw InvalidArgument("atlas: level out of range");
    const auto& b = buckets_[static_cast<std::size_t>(j - 1)];
    const int n = static_cast<int>(b.size());
    const int c = bucket(normalized(dir), n);
    for (int d = -1; d <= 1; ++d)
        if (b[static_cast<std::size_t>((c + d + n) % n)]) return true;
    return false;
}

ParallelIndex GammaAtlas::level_index(int j) const {
    if (j < 1 || j > geo_) throw InvalidArgument("atlas: level has no geometry");
    std::vector<ParallelIndex::Edge> edges;
    for (std::size_t o = 0; o < orbits_.size(); ++o)
        for (auto e : orbits_[o]->edges(j)) {
            e.run = static_cast<std::uint32_t>(o);
            edges.push_back(e);
        }
    return ParallelIndex(std::move(edges), angle_tol_, radius_);
}

double GammaAtlas::parallel_distance(const ParallelIndex& idx, Vec2 p, Vec2 dir, double radius) {
    if (radius > idx.radius()) throw InvalidArgument("atlas: query radius above index radius");
    double best = std::numeric_limits<double>::infinity();
    idx.for_each_parallel(p, dir, radius, [&](const ParallelIndex::Hit& h) { best = std::min(best, h.dist); });
    return best;
}

} // namespace ptorus
