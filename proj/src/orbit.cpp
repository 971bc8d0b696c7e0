#include "ptorus/orbit.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ptorus {

BaseCurve default_gamma(const Map& m) {
    if (const auto* c = dynamic_cast<const SlitC*>(&m))
        return {{c->x0(), c->y0() - c->eps()}, {0, 1}, 2 * c->eps(), Side::plus, {1, 0}};
    if (dynamic_cast<const AffineA*>(&m) || dynamic_cast<const CocycleB*>(&m))
        return {{0, 0}, {0, 1}, 1.0, Side::minus, {1, 0}};
    return {{0, 0}, {0, 1}, 1.0, Side::interior, {1, 0}};
}

std::vector<BaseCurve> sided_gamma(const Map& m) {
    std::vector<BaseCurve> out;
    for (const auto& s : m.gamma()) {
        out.push_back({s.origin, s.dir, s.length, Side::plus, s.normal});
        out.push_back({s.origin, s.dir, s.length, Side::minus, s.normal});
    }
    return out;
}

double OrbitLevel::length() const {
    double l = bridged;
    for (const auto& r : runs) l += r.length();
    return l;
}

std::size_t OrbitLevel::sample_count() const {
    std::size_t n = 0;
    for (const auto& r : runs) n += r.samples.size();
    return n;
}

CurveOrbit::CurveOrbit(const MapSpec& spec, const BaseCurve& gamma, const OrbitOptions& opt)
    : spec_(spec), gamma_(gamma), opt_(opt) {
    if (!spec_.map) throw InvalidArgument("orbit: map missing");
    if (!(gamma_.length > 0.0)) throw InvalidArgument("orbit: gamma must have positive length");
    gamma_.dir = normalized(gamma_.dir);
    step_ = std::min(opt_.max_step, spec_.map->feature_step());
    if (!(step_ > 0.0) || step_ > 0.25) throw InvalidArgument("orbit: max_step must lie in (0, 0.25]");
}

const OrbitLevel& CurveOrbit::level(int k) const {
    if (k < 1 || k > depth()) throw InvalidArgument("orbit level out of range: " + std::to_string(k));
    return levels_[static_cast<std::size_t>(k - 1)];
}

OrbitSample CurveOrbit::advance(const OrbitSample& s) const {
    const Map& m = *spec_.map;
    const int cell = m.cell_of(s.pos);
    const Mat2 d = m.jacobian_raw(s.pos, cell);
    const double w = spec_.weight(s.pos, d);
    const Vec2 dt = d * s.tan;
    const double jj = norm(dt);
    OrbitSample o;
    o.t = s.t;
    o.pos = wrap(m.eval_raw(s.pos, cell)).vec();
    o.tan = dt / jj;
    o.normal = d * s.normal;
    o.jac = s.jac * jj;
    o.phi = s.phi * w;
    o.alpha = s.alpha / (w * jj);
    return o;
}

OrbitSample CurveOrbit::recompute(double t, int k) const {
    if (k < 1) throw InvalidArgument("recompute: k >= 1 required");
    const Map& m = *spec_.map;
    const auto [raw, cell] = m.resolve({wrap(gamma_.point(t)), gamma_.side});
    const Mat2 d = m.jacobian_raw(raw, cell);
    const double w = spec_.weight(raw, d);
    const Vec2 dt = d * gamma_.dir;
    const double jj = norm(dt);
    OrbitSample s;
    s.t = t;
    s.pos = wrap(m.eval_raw(raw, cell)).vec();
    s.tan = dt / jj;
    s.normal = d * gamma_.normal;
    s.jac = jj;
    s.phi = w;
    s.alpha = 1.0;
    for (int j = 1; j < k; ++j) s = advance(s);
    return s;
}

OrbitSample CurveOrbit::relift(const OrbitSample& prev, OrbitSample s) const {
    const Vec2 l = prev.lifted() + min_image(prev.pos, s.pos);
    s.ix = static_cast<int>(std::lround(l.x - s.pos.x));
    s.iy = static_cast<int>(std::lround(l.y - s.pos.y));
    return s;
}

int CurveOrbit::split_key(const OrbitSample& s) const {
    const int c = spec_.map->cell_of(s.pos);
    return spec_.map->seam_x() ? c + 1024 * s.ix : c;
}

void CurveOrbit::refine_run(std::vector<OrbitSample>& out, const OrbitRun& run, int k, double chord) const {
    out.clear();
    if (run.samples.empty()) return;
    out.push_back(run.samples.front());
    out.back().ix = out.back().iy = 0;
    std::vector<OrbitSample> stack;
    for (std::size_t i = 1; i < run.samples.size(); ++i) {
        stack.clear();
        stack.push_back(run.samples[i]);
        while (!stack.empty()) {
            const OrbitSample& a = out.back();
            const OrbitSample b = stack.back();
            if (norm(min_image(a.pos, b.pos)) <= chord || std::abs(b.t - a.t) < 1e-15) {
                out.push_back(relift(a, b));
                stack.pop_back();
            } else {
                stack.push_back(recompute(0.5 * (a.t + b.t), k));
            }
        }
    }
}

std::vector<OrbitRun> CurveOrbit::split_run(const std::vector<OrbitSample>& samples, int k,
                                            std::size_t& crossings) const {
    std::vector<OrbitRun> pieces;
    if (samples.empty()) return pieces;
    OrbitRun cur;
    cur.samples.push_back(samples.front());
    std::size_t i = 1;
    while (i < samples.size()) {
        const OrbitSample a = cur.samples.back();
        const OrbitSample b = relift(a, samples[i]);
        const int ka = split_key(a);
        if (split_key(b) == ka) {
            cur.samples.push_back(b);
            ++i;
            continue;
        }
        OrbitSample lo = a, hi = b;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo.t + hi.t);
            if (mid == lo.t || mid == hi.t) break;
            const OrbitSample m = relift(a, recompute(mid, k));
            if (split_key(m) == ka) lo = m; else hi = m;
        }
        if (lo.t != a.t) cur.samples.push_back(lo);
        pieces.push_back(std::move(cur));
        ++crossings;
        cur = OrbitRun{};
        hi.ix = hi.iy = 0;
        cur.samples.push_back(hi);
        if (hi.t == samples[i].t) ++i;
    }
    pieces.push_back(std::move(cur));
    return pieces;
}

std::vector<ParallelIndex::Edge> CurveOrbit::edges(int k) const {
    const OrbitLevel& lvl = level(k);
    std::vector<ParallelIndex::Edge> out;
    out.reserve(lvl.sample_count());
    for (std::size_t r = 0; r < lvl.runs.size(); ++r) {
        const auto& s = lvl.runs[r].samples;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            out.push_back({s[i].pos, s[i + 1].lifted() - s[i].lifted(), static_cast<std::uint32_t>(r),
                           static_cast<std::uint32_t>(i), s[i].s});
    }
    return out;
}

void CurveOrbit::collapse(OrbitLevel& lvl) const {
    std::vector<ParallelIndex::Edge> edges;
    for (std::size_t r = 0; r < lvl.runs.size(); ++r) {
        const auto& s = lvl.runs[r].samples;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            edges.push_back({s[i].pos, s[i + 1].lifted() - s[i].lifted(), static_cast<std::uint32_t>(r),
                             static_cast<std::uint32_t>(i), s[i].s});
    }
    if (edges.empty()) return;
    const ParallelIndex idx(std::move(edges), opt_.angle_tol, opt_.tol_cover);
    const double behind = 2.0 * step_;

    // alpha of the earliest covering edge, or NaN if the sample is not covered
    const ParallelIndex::Edge* best_edge = nullptr;
    auto cover_alpha = [&](const OrbitSample& s, std::size_t run) {
        double best_alpha = std::numeric_limits<double>::quiet_NaN();
        std::uint32_t best_run = ~0u;
        best_edge = nullptr;
        idx.for_each_parallel(s.pos, s.tan, opt_.tol_cover, [&](const ParallelIndex::Hit& h) {
            const auto& e = *h.edge;
            const bool earlier = e.run < run || (e.run == run && e.s0 + norm(e.d) < s.s - behind);
            if (!earlier || e.run > best_run) return;
            const auto& rs = lvl.runs[e.run].samples;
            best_alpha = rs[e.idx].alpha + h.u * (rs[e.idx + 1].alpha - rs[e.idx].alpha);
            best_run = e.run;
            best_edge = &e;
        });
        return best_alpha;
    };
    auto covered_at = [&](const OrbitSample& ref, double t, std::size_t run) {
        OrbitSample m = relift(ref, recompute(t, lvl.k));
        m.s = ref.s + norm(m.lifted() - ref.lifted());
        return std::make_pair(m, !std::isnan(cover_alpha(m, run)));
    };
    // boundary between a (state ca) and b by bisection; returns the last sample with state ca and
    // the first with the other state
    auto bisect = [&](OrbitSample a, OrbitSample b, bool ca, std::size_t run) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (a.t + b.t);
            if (mid == a.t || mid == b.t) break;
            auto [m, cm] = covered_at(a, mid, run);
            if (cm == ca) a = m; else b = m;
        }
        return std::make_pair(a, b);
    };
    // uncovered stretch between an uncovered sample and the edge covering its neighbour
    auto gap = [&](const OrbitSample& open, const OrbitSample& shut, std::size_t run) {
        cover_alpha(shut, run);
        if (best_edge == nullptr) return 0.0;
        const auto& e = *best_edge;
        const double d = EdgeIndex::closest({e.a, e.d, e.run, e.idx}, open.pos).dist;
        return d <= norm(min_image(open.pos, shut.pos)) + opt_.tol_cover ? d : 0.0;
    };

    std::vector<OrbitRun> kept;
    for (std::size_t r = 0; r < lvl.runs.size(); ++r) {
        const auto& s = lvl.runs[r].samples;
        std::vector<char> cov(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double a = cover_alpha(s[i], r);
            cov[i] = !std::isnan(a);
            if (cov[i]) {
                ++lvl.overlap_samples;
                const double spread = std::abs(s[i].alpha - a) / std::max(std::abs(s[i].alpha), std::abs(a));
                if (spread > lvl.alpha_spread) {
                    lvl.alpha_spread = spread;
                    lvl.alpha_worst_sample = i;
                }
            }
        }
        std::size_t i = 0;
        while (i < s.size()) {
            if (cov[i]) { ++i; continue; }
            std::size_t j = i;
            while (j + 1 < s.size() && !cov[j + 1]) ++j;
            OrbitRun piece;
            if (i > 0) {
                const auto [c, u] = bisect(s[i - 1], s[i], true, r);
                lvl.bridged += gap(u, c, r);
                piece.samples.push_back(u);
            }
            for (std::size_t q = i; q <= j; ++q) piece.samples.push_back(s[q]);
            if (j + 1 < s.size()) {
                const auto [u, c] = bisect(s[j], s[j + 1], false, r);
                lvl.bridged += gap(u, c, r);
                piece.samples.push_back(u);
            }
            if (piece.samples.size() >= 2) {
                const double s0 = piece.samples.front().s;
                for (auto& p : piece.samples) p.s -= s0;
                kept.push_back(std::move(piece));
            }
            i = j + 1;
        }
    }
    lvl.runs = std::move(kept);
}

CurveOrbit CurveOrbit::propagate(const MapSpec& spec, const BaseCurve& gamma, int K, const OrbitOptions& opt) {
    if (K < 1) throw InvalidArgument("orbit depth must be >= 1");
    CurveOrbit o(spec, gamma, opt);
    const Map& m = *spec.map;
    const double chord = o.step_ / std::max(1.0, m.derivative_bound());

    const auto sigma = m.sigma();
    const auto n0 = static_cast<std::size_t>(std::ceil(o.gamma_.length / chord));
    if (n0 > opt.max_samples) throw BudgetExceeded("orbit: base curve needs too many samples");
    OrbitLevel first;
    first.k = 1;
    OrbitRun base;
    for (std::size_t i = 0; i <= n0; ++i) {
        const double t = o.gamma_.length * static_cast<double>(i) / static_cast<double>(n0);
        const TorusPoint p = wrap(o.gamma_.point(t));
        for (const auto& q : sigma)
            if (torus_distance(p, q) < opt.tol_sigma) ++o.sigma_hits_;
        base.samples.push_back({t, p.vec(), 0, 0, o.gamma_.dir, o.gamma_.normal, 1, 1, 1, 0});
    }
    // gamma lies in the closure of one cell, so level 1 needs no splitting
    {
        OrbitRun run;
        for (const auto& b : base.samples) {
            OrbitSample s = o.recompute(b.t, 1);
            if (!run.samples.empty()) {
                s = o.relift(run.samples.back(), s);
                s.s = run.samples.back().s + norm(s.lifted() - run.samples.back().lifted());
            }
            run.samples.push_back(s);
        }
        first.runs.push_back(std::move(run));
    }
    if (opt.collapse) o.collapse(first);
    o.levels_.push_back(std::move(first));

    std::vector<OrbitSample> refined;
    for (int k = 1; k < K; ++k) {
        if (opt.truncate_on_budget && k >= 2) {
            const double a = static_cast<double>(o.levels_[k - 2].sample_count());
            const double b = static_cast<double>(o.levels_[k - 1].sample_count());
            if (a > 0 && b * b / a > static_cast<double>(opt.max_samples)) break;
        }
        OrbitLevel next;
        next.k = k + 1;
        std::size_t total = 0;
        for (const auto& run : o.levels_.back().runs) {
            o.refine_run(refined, run, k, chord);
            for (auto& piece : o.split_run(refined, k, next.crossings)) {
                if (piece.samples.size() < 2) continue;
                OrbitRun img;
                img.samples.reserve(piece.samples.size());
                for (const auto& s : piece.samples) {
                    OrbitSample n = o.advance(s);
                    if (!img.samples.empty()) {
                        const OrbitSample& p = img.samples.back();
                        n = o.relift(p, n);
                        n.s = p.s + norm(n.lifted() - p.lifted());
                    }
                    img.samples.push_back(n);
                }
                total += img.samples.size();
                if (total > opt.max_samples) {
                    if (opt.truncate_on_budget) return o;
                    throw BudgetExceeded("orbit: sample budget exceeded at k=" + std::to_string(k + 1));
                }
                next.runs.push_back(std::move(img));
            }
        }
        if (opt.collapse) o.collapse(next);
        o.levels_.push_back(std::move(next));
    }
    return o;
}

PolyCurve CurveOrbit::curve(int k) const {
    PolyCurve c;
    for (const auto& r : level(k).runs) {
        CurveSegment seg;
        seg.samples.reserve(r.samples.size());
        for (const auto& s : r.samples) seg.samples.push_back({TorusPoint(s.pos), s.tan, s.s});
        c.segments.push_back(std::move(seg));
    }
    return c;
}

void CurveOrbit::write_csv(std::ostream& os, int k) const {
    os << "s,x,y,tx,ty,vx,vy,jac_prod,phi_prod,alpha\n";
    const auto prec = os.precision(17);
    double offset = 0;
    for (const auto& r : level(k).runs) {
        for (const auto& s : r.samples)
            os << offset + s.s << ',' << s.pos.x << ',' << s.pos.y << ',' << s.tan.x << ',' << s.tan.y << ','
               << s.normal.x << ',' << s.normal.y << ',' << s.jac << ',' << s.phi << ',' << s.alpha << '\n';
        offset += r.length();
    }
    os.precision(prec);
}

std::vector<Vec2> transport_normal(const CurveOrbit& orbit, int k, double tol) {
    std::vector<Vec2> out;
    std::size_t i = 0;
    for (const auto& r : orbit.level(k).runs)
        for (const auto& s : r.samples) {
            if (std::abs(cross(s.tan, normalized(s.normal))) <= tol) throw ParallelNormal(k, i);
            out.push_back(s.normal);
            ++i;
        }
    return out;
}

std::vector<double> curve_jacobian(const Map& m, const PolyCurve& c) {
    std::vector<double> out;
    for (const auto& seg : c.segments)
        for (const auto& s : seg.samples) {
            const Mat2 d = seg.side == Side::interior ? m.jacobian(s.p.vec()) : m.derivative({s.p, seg.side});
            out.push_back(norm(d * s.t));
        }
    return out;
}

std::vector<std::vector<double>> compute_alpha(const CurveOrbit& orbit, double tol_alpha) {
    std::vector<std::vector<double>> out;
    for (int k = 1; k <= orbit.depth(); ++k) {
        const auto& lvl = orbit.level(k);
        if (lvl.alpha_spread > tol_alpha) throw A1Violation(k, lvl.alpha_worst_sample, lvl.alpha_spread);
        std::vector<double> a;
        for (const auto& r : lvl.runs)
            for (const auto& s : r.samples) a.push_back(s.alpha);
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace ptorus
