#include "ptorus/proper.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ptorus {

namespace {

constexpr double pi = 3.14159265358979323846;

std::vector<char> level_buckets(const OrbitLevel& lvl, int n) {
    std::vector<char> b(static_cast<std::size_t>(n), 0);
    for (const auto& r : lvl.runs)
        for (const auto& s : r.samples) {
            double th = std::atan2(s.tan.y, s.tan.x);
            if (th < 0.0) th += pi;
            b[static_cast<std::size_t>(std::clamp(static_cast<int>(th / (pi / n)), 0, n - 1))] = 1;
        }
    return b;
}

bool buckets_meet(const std::vector<char>& a, const std::vector<char>& b) {
    const auto n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] && (b[i] || b[(i + 1) % n] || b[(i + n - 1) % n])) return true;
    return false;
}

} // namespace

double check_a0(const MapSpec& m, const PolyCurve& c) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& seg : c.segments)
        for (const auto& s : seg.samples) {
            const TorusPoint p = wrap(s.p.vec());
            const TorusPoint a = m.map->evaluate({p, Side::plus});
            const TorusPoint b = m.map->evaluate({p, Side::minus});
            margin = std::min(margin, torus_distance(a, b));
        }
    return std::isfinite(margin) ? margin : 0.0;
}

double check_a1(const CurveOrbit& orbit) {
    double spread = 0;
    for (int k = 1; k <= orbit.depth(); ++k) spread = std::max(spread, orbit.level(k).alpha_spread);
    return spread;
}

std::vector<double> check_a2(const CurveOrbit& orbit, const GammaAtlas& atlas, int K, const ProperOptions& opt) {
    if (K > orbit.depth()) throw InvalidArgument("check_a2: orbit too shallow");
    if (atlas.geometric_depth() < 1) throw InvalidArgument("check_a2: atlas has no geometry");
    const double r = std::min(opt.probe_radius, atlas.index_radius());
    const ParallelIndex gamma1 = atlas.level_index(1);
    std::vector<double> out;
    for (int k = 2; k <= K; ++k) {
        double margin = r;
        for (const auto& run : orbit.level(k).runs)
            for (const auto& s : run.samples) {
                if (!atlas.direction_present(1, s.tan)) continue;
                margin = std::min(margin, GammaAtlas::parallel_distance(gamma1, s.pos, s.tan, r));
            }
        out.push_back(margin);
    }
    return out;
}

std::vector<A3Level> check_a3(const CurveOrbit& orbit, const GammaAtlas& atlas, int K, const ProperOptions& opt) {
    if (K > orbit.depth()) throw InvalidArgument("check_a3: orbit too shallow");
    const Map& m = *orbit.spec().map;
    const double r = opt.probe_radius;
    const double member = std::min(opt.tol_member, atlas.index_radius());

    struct Candidate {
        Vec2 q, u;
        int k;
        bool on = false, open = false;
    };
    std::vector<Candidate> cand;
    for (int k = 1; k < K; ++k) {
        const OrbitLevel& next = orbit.level(k + 1);
        const std::size_t stride = std::max<std::size_t>(1, (next.sample_count() + opt.a3_samples - 1) / opt.a3_samples);
        std::size_t count = 0;
        for (const auto& run : next.runs)
            for (const auto& s : run.samples) {
                if (count++ % stride != 0) continue;
                for (const auto& pre : m.preimages(TorusPoint(s.pos)))
                    cand.push_back({pre.point.base.vec(), normalized(pre.derivative.inverse() * s.tan), k});
            }
    }
    // membership in Gamma_j, one level index at a time
    std::vector<std::size_t> need;
    for (int j = 1; j <= atlas.depth(); ++j) {
        need.clear();
        for (std::size_t c = 0; c < cand.size(); ++c)
            if (!cand[c].on && atlas.direction_present(j, cand[c].u)) need.push_back(c);
        if (need.empty()) continue;
        if (j > atlas.geometric_depth()) {
            for (auto c : need) cand[c].open = true;
            continue;
        }
        const ParallelIndex idx = atlas.level_index(j);
        for (auto c : need)
            if (std::isfinite(GammaAtlas::parallel_distance(idx, cand[c].q, cand[c].u, member))) cand[c].on = true;
    }

    std::vector<A3Level> out(static_cast<std::size_t>(std::max(0, K - 1)));
    std::size_t c = 0;
    for (int k = 1; k < K; ++k) {
        A3Level& res = out[static_cast<std::size_t>(k - 1)];
        const auto edges = orbit.edges(k);
        const std::size_t begin = c;
        while (c < cand.size() && cand[c].k == k) ++c;
        if (edges.empty()) continue;
        const ParallelIndex own(edges, orbit.options().angle_tol, r);
        for (std::size_t i = begin; i < c; ++i) {
            if (!cand[i].on) {
                if (cand[i].open) ++res.uncertified;
                continue;
            }
            ++res.kept;
            double d = r;
            own.for_each_parallel(cand[i].q, cand[i].u, r, [&](const ParallelIndex::Hit& h) { d = std::min(d, h.dist); });
            res.distance = std::max(res.distance, d);
        }
    }
    return out;
}

double pairwise_margin(const CurveOrbit& orbit, int j, int k, double radius) {
    const auto edges = orbit.edges(j);
    if (edges.empty()) return radius;
    const ParallelIndex idx(edges, orbit.options().angle_tol, radius);
    double margin = radius;
    for (const auto& run : orbit.level(k).runs)
        for (const auto& s : run.samples)
            idx.for_each_parallel(s.pos, s.tan, radius, [&](const ParallelIndex::Hit& h) {
                margin = std::min(margin, h.dist);
            });
    return margin;
}

const char* verdict_name(MarkovVerdict v) {
    return v == MarkovVerdict::consistent_with_non_markov ? "consistent-with-non-Markov" : "inconclusive";
}

MarkovVerdict markov_heuristic(const CurveOrbit& orbit, int K, double tol_disjoint) {
    if (orbit.spec().map->gamma().empty() || K < 2 || K > orbit.depth()) return MarkovVerdict::inconclusive;
    // partial sums grow at least linearly
    double floor_len = std::numeric_limits<double>::infinity();
    for (int k = K / 2; k <= K; ++k) floor_len = std::min(floor_len, orbit.level(std::max(k, 1)).length());
    if (!(floor_len > tol_disjoint)) return MarkovVerdict::inconclusive;
    const int n = static_cast<int>(std::ceil(pi / (2.0 * orbit.options().angle_tol)));
    std::vector<std::vector<char>> dirs;
    for (int k = 1; k <= K; ++k) dirs.push_back(level_buckets(orbit.level(k), n));
    const double r = std::max(10 * tol_disjoint, 1e-5);
    for (int k = 2; k <= K; ++k)
        for (int j = 1; j < k; ++j) {
            if (!buckets_meet(dirs[static_cast<std::size_t>(k - 1)], dirs[static_cast<std::size_t>(j - 1)])) continue;
            if (pairwise_margin(orbit, j, k, r) <= tol_disjoint) return MarkovVerdict::inconclusive;
        }
    return MarkovVerdict::consistent_with_non_markov;
}

DiscontinuityReport check_proper(const MapSpec& m, int K, int J, const ProperOptions& opt, const OrbitOptions& oopt) {
    if (K < 2) throw InvalidArgument("check_proper: K >= 2 required");
    if (J == 0) J = 2 * K;
    if (J < K) throw InvalidArgument("check_proper: J >= K required");
    DiscontinuityReport rep;
    rep.map = m.map->name();
    rep.K = K;
    rep.J = J;
    rep.opt = opt;

    const BaseCurve g = default_gamma(*m.map);
    PolyCurve c;
    c.segments.push_back(straight_segment(g.origin, g.dir, g.length, g.side, g.length / 1000));
    rep.a0_margin = check_a0(m, c);
    rep.a0_pass = rep.a0_margin > opt.tol_jump;
    if (m.map->gamma().empty()) return rep;

    OrbitOptions deep = oopt;
    deep.truncate_on_budget = true;
    auto orbit = std::make_shared<const CurveOrbit>(CurveOrbit::propagate(m, g, J, deep));
    if (orbit->depth() < K) throw BudgetExceeded("check_proper: orbit budget exhausted before depth K");
    rep.a1_spread = check_a1(*orbit);
    rep.a1_pass = rep.a1_spread < opt.tol_alpha;

    const GammaAtlas atlas = GammaAtlas::build(m, J, J, oopt, orbit);
    rep.geometric_depth = atlas.geometric_depth();
    rep.a2_margin = check_a2(*orbit, atlas, K, opt);
    rep.a2_pass = std::all_of(rep.a2_margin.begin(), rep.a2_margin.end(), [&](double v) { return v > opt.tol_disjoint; });

    rep.a3_pass = true;
    for (const auto& l : check_a3(*orbit, atlas, K, opt)) {
        rep.a3_distance.push_back(l.distance);
        rep.a3_kept.push_back(l.kept);
        rep.a3_uncertified.push_back(l.uncertified);
        if (!(l.distance < opt.tol_disjoint) || l.uncertified > 0) rep.a3_pass = false;
    }
    return rep;
}

void DiscontinuityReport::write(std::ostream& os) const {
    const auto old = os.precision(17);
    const auto flag = [](bool b) { return b ? "pass" : "fail"; };
    os << "map = " << map << "\n"
       << "K = " << K << "\n"
       << "J = " << J << "\n"
       << "geometric_depth = " << geometric_depth << "\n"
       << "tol_jump = " << opt.tol_jump << "\n"
       << "tol_alpha = " << opt.tol_alpha << "\n"
       << "tol_disjoint = " << opt.tol_disjoint << "\n"
       << "tol_member = " << opt.tol_member << "\n"
       << "probe_radius = " << opt.probe_radius << "\n"
       << "a0 = " << flag(a0_pass) << "\n"
       << "a0.margin = " << a0_margin << "\n"
       << "a1 = " << flag(a1_pass) << "\n"
       << "a1.spread = " << a1_spread << "\n"
       << "a2 = " << flag(a2_pass) << "\n";
    for (std::size_t i = 0; i < a2_margin.size(); ++i) os << "a2.margin[" << i + 2 << "] = " << a2_margin[i] << "\n";
    os << "a3 = " << flag(a3_pass) << "\n";
    for (std::size_t i = 0; i < a3_distance.size(); ++i)
        os << "a3.distance[" << i + 1 << "] = " << a3_distance[i] << "\n"
           << "a3.kept[" << i + 1 << "] = " << a3_kept[i] << "\n"
           << "a3.uncertified[" << i + 1 << "] = " << a3_uncertified[i] << "\n";
    os << "result = " << flag(pass()) << "\n";
    os.precision(old);
}

} // namespace ptorus
