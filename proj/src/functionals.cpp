#include "ptorus/functionals.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <unordered_set>

namespace ptorus {

namespace {
constexpr double pi = 3.14159265358979323846;
}

JumpResult jump(const Observable& h, const JumpProbe& probe) {
    if (probe.levels < probe.order + 2 || probe.order < 0) throw InvalidArgument("jump: levels >= order + 2 required");
    if (!(probe.eps0 > 0.0)) throw InvalidArgument("jump: eps0 > 0 required");
    const double len = norm(probe.v);
    if (!(len > 0.0)) throw InvalidArgument("jump: zero direction");
    const Vec2 v = probe.v / len;
    std::vector<double> r(static_cast<std::size_t>(probe.levels));
    double eps = probe.eps0;
    for (auto& d : r) {
        d = h(probe.x + v * eps) - h(probe.x - v * eps);
        eps *= 0.5;
    }
    const int L = probe.levels;
    std::vector<double> prev = r;
    for (int m = 1; m <= probe.order; ++m) {
        const double f = std::ldexp(1.0, m) - 1.0;
        prev = r;
        for (int j = L - 1; j >= m; --j)
            r[static_cast<std::size_t>(j)] += (r[static_cast<std::size_t>(j)] - r[static_cast<std::size_t>(j - 1)]) / f;
    }
    JumpResult out;
    out.value = r.back();
    out.error = std::max(std::abs(r[r.size() - 1] - r[r.size() - 2]), std::abs(r.back() - prev.back()));
    out.eps0 = probe.eps0;
    return out;
}

// ---------------------------------------------------------------- field

DiscontinuityField DiscontinuityField::build(const MapSpec& spec, int n, const OrbitOptions& opt) {
    if (n < 0) throw InvalidArgument("DiscontinuityField: n >= 0 required");
    DiscontinuityField f;
    f.n_ = n;
    f.angle_tol_ = opt.angle_tol;
    if (n == 0 || spec.map->gamma().empty()) return f;
    const GammaAtlas atlas = GammaAtlas::build(spec, n, n, opt);
    if (atlas.geometric_depth() < n) throw BudgetExceeded("DiscontinuityField: geometry budget below depth " + std::to_string(n));
    for (const auto& o : atlas.orbits())
        for (int j = 1; j <= n; ++j)
            for (const auto& e : o->edges(j)) f.index_.add(e.a, e.a + e.d, e.run, e.idx);
    return f;
}

double DiscontinuityField::clearance(Vec2 p, Vec2 tangent, double cap) const {
    if (cap > index_.cell_width()) throw InvalidArgument("clearance: cap above the index cell width");
    const Vec2 u = normalized(tangent);
    double best = cap;
    index_.for_each_near(wrap(p).vec(), cap, [&](const EdgeIndex::Hit& h) {
        const double len = norm(h.edge->d);
        if (len == 0.0) return;
        const double s = std::abs(cross(u, h.edge->d)) / len;
        if (s <= angle_tol_ && h.dist <= tol_on_) return;
        best = std::min(best, h.dist);
    });
    return best;
}

std::vector<double> DiscontinuityField::crossings(Vec2 a, Vec2 d) const {
    std::vector<double> out;
    if (index_.size() == 0) return out;
    const double len = norm(d);
    if (len == 0.0) return out;
    const double w = index_.cell_width();
    const int n = std::max(1, static_cast<int>(std::ceil(2 * len / w)));
    std::unordered_set<const EdgeIndex::Edge*> seen;
    for (int i = 0; i <= n; ++i) {
        const Vec2 p = wrap(a + d * (static_cast<double>(i) / n)).vec();
        index_.for_each_near(p, w, [&](const EdgeIndex::Hit& h) {
            if (!seen.insert(h.edge).second) return;
            const Vec2 de = h.edge->d;
            const double le = norm(de);
            if (le == 0.0) return;
            const double den = cross(d, de);
            if (std::abs(den) <= angle_tol_ * len * le) return;
            const Vec2 r = min_image(h.edge->a, wrap(a).vec());  // a relative to the edge start
            const double s = -cross(r, de) / den;
            const double u = -cross(r, d) / den;
            if (s <= 0.0 || s >= 1.0 || u < 0.0 || u > 1.0) return;
            out.push_back(s);
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- quadrature

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw InvalidArgument("gauss_legendre: n >= 1 required");
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(n - 1 - i);
        x[a] = -z;
        x[b] = z;
        w[a] = w[b] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

// ---------------------------------------------------------------- functionals

BoundaryFunctionals::BoundaryFunctionals(std::shared_ptr<const CurveOrbit> orbit, int field_depth,
                                         const FunctionalOptions& opt)
    : orbit_(std::move(orbit)), opt_(opt) {
    if (!orbit_) throw InvalidArgument("BoundaryFunctionals: null orbit");
    if (opt.nodes < 1 || !(opt.panel_length > 0.0)) throw InvalidArgument("BoundaryFunctionals: bad quadrature options");
    field_ = std::make_shared<const DiscontinuityField>(
        DiscontinuityField::build(orbit_->spec(), field_depth, orbit_->options()));
    if (2 * opt_.ladder.eps0 > field_->max_radius())
        throw InvalidArgument("BoundaryFunctionals: eps0 too large for the field index");
}

JumpResult BoundaryFunctionals::jump_on_curve(const Observable& h, Vec2 x, Vec2 v, Vec2 tangent) const {
    if (h.depth() > field_->depth()) throw InvalidArgument("jump_on_curve: observable deeper than the field");
    const double c = field_->clearance(x, tangent, 2 * opt_.ladder.eps0);
    if (c < opt_.min_clearance) throw ProbeRejected("jump ladder touches another discontinuity curve");
    JumpProbe p = opt_.ladder;
    p.x = x;
    p.v = v;
    p.eps0 = std::min(opt_.ladder.eps0, 0.5 * c);
    return jump(h, p);
}

EllResult BoundaryFunctionals::ell(int k, const Observable& h) const {
    if (k < 1 || k > orbit_->depth()) throw InvalidArgument("ell: k out of the orbit range");
    if (h.depth() > field_->depth()) throw InvalidArgument("ell: observable deeper than the field");

    struct Piece {
        double t0, t1, len;
    };
    std::vector<Piece> pieces;
    for (const auto& run : orbit_->level(k).runs) {
        const auto& s = run.samples;
        if (s.size() < 2) continue;
        std::vector<std::pair<double, double>> br;  // (arc length, t)
        br.emplace_back(s.front().s, s.front().t);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            for (double u : field_->crossings(s[i].pos, s[i + 1].lifted() - s[i].lifted()))
                br.emplace_back(s[i].s + u * (s[i + 1].s - s[i].s), s[i].t + u * (s[i + 1].t - s[i].t));
            br.emplace_back(s[i + 1].s, s[i + 1].t);
        }
        std::sort(br.begin(), br.end());
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            const double len = br[i + 1].first - br[i].first;
            if (len > 1e-14) pieces.push_back({br[i].second, br[i + 1].second, len});
        }
    }

    std::vector<std::vector<double>> gx(static_cast<std::size_t>(opt_.nodes + 1)), gw(gx.size());
    for (int n = 1; n <= opt_.nodes; ++n) gauss_legendre(n, gx[static_cast<std::size_t>(n)], gw[static_cast<std::size_t>(n)]);
    const double panel = std::min(opt_.panel_length, h.feature_scale());
    const int min_nodes = std::min(opt_.nodes, 4);

    EllResult res;
    auto integrate = [&](int refine, bool record) {
        double q = 0, jerr = 0, dlen = 0;
        std::size_t nodes = 0, panels = 0, dropped = 0;
        for (const auto& pc : pieces) {
            const int m1 = std::max(1, static_cast<int>(std::ceil(pc.len / panel)));
            const int m = refine * m1;
            const double dt = (pc.t1 - pc.t0) / m;
            // short pieces get fewer nodes
            const int nn = std::clamp(static_cast<int>(std::ceil(opt_.nodes * pc.len / (m1 * panel))), min_nodes, opt_.nodes);
            const auto& xs = gx[static_cast<std::size_t>(nn)];
            const auto& ws = gw[static_cast<std::size_t>(nn)];
            for (int j = 0; j < m; ++j) {
                const double mid = pc.t0 + (j + 0.5) * dt;
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    const double t = mid + 0.5 * dt * xs[i];
                    const double wt = 0.5 * std::abs(dt) * ws[i];
                    const OrbitSample st = orbit_->recompute(t, k);
                    ++nodes;
                    try {
                        const JumpResult jr = jump_on_curve(h, st.pos, st.normal, st.tan);
                        q += wt * st.alpha * st.jac * jr.value;
                        jerr += wt * std::abs(st.alpha) * st.jac * jr.error;
                    } catch (const ProbeRejected&) {
                        ++dropped;
                        dlen += wt * st.jac;
                    }
                }
            }
            panels += static_cast<std::size_t>(m);
        }
        if (record) {
            res.value = q;
            res.jump_error = jerr;
            res.nodes = nodes;
            res.panels = panels;
            res.dropped = dropped;
            res.dropped_length = dlen;
        }
        return q;
    };

    if (opt_.estimate_error) {
        const double coarse = integrate(1, false);
        integrate(2, true);
        res.quad_error = std::abs(res.value - coarse);
    } else {
        integrate(1, true);
    }
    if (res.dropped_length > opt_.tol_len)
        throw ProbeRejected("ell: dropped arc length " + std::to_string(res.dropped_length) + " above tolerance");
    return res;
}

DualityRow BoundaryFunctionals::verify_duality(const ObsPtr& h, int k) const {
    if (k < 1) throw InvalidArgument("verify_duality: k >= 1 required");
    if (k + 1 > orbit_->depth()) throw InvalidArgument("verify_duality: orbit too shallow");
    const ObsPtr lh = transfer(spec(), h, 1);
    const EllResult a = ell(k + 1, *lh);
    const EllResult b = ell(k, *h);
    return {k, a.value, b.value, std::abs(a.value - b.value), a.error() + b.error()};
}

XiResult BoundaryFunctionals::xi_lambda(double lambda, const Observable& h, int K, double lambda_hat) const {
    if (!(lambda_hat > 0.0) || std::abs(lambda) >= 0.9 * lambda_hat)
        throw InvalidArgument("xi_lambda: |lambda| < 0.9 lambda_hat required");
    if (K < 1 || K > orbit_->depth()) throw InvalidArgument("xi_lambda: truncation beyond the orbit");
    XiResult r;
    double amp = 0, pw = 1;
    for (int k = 1; k <= K; ++k) {
        const double e = ell(k, h).value;
        r.ell.push_back(e);
        pw *= lambda;
        r.value += pw * e;
        amp = std::max(amp, std::abs(e) * std::pow(lambda_hat, k));
    }
    const double q = std::abs(lambda) / lambda_hat;
    r.tail_bound = amp * std::pow(q, K + 1) / (1.0 - q);
    return r;
}

std::vector<ShiftRow> BoundaryFunctionals::shift_identity(const ObsPtr& h, int k, int count, std::uint64_t seed) const {
    if (k < 1 || k + 1 > orbit_->depth()) throw InvalidArgument("shift_identity: k out of the orbit range");
    const ObsPtr lh = transfer(spec(), h, 1);
    if (lh->depth() > field_->depth()) throw InvalidArgument("shift_identity: observable deeper than the field");
    const Map& m = *spec().map;
    const double angle = orbit_->options().angle_tol;
    const ParallelIndex idx(orbit_->edges(k), angle, 1e-6);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, orbit_->gamma().length);

    std::vector<ShiftRow> rows;
    for (int attempt = 0; attempt < 20 * count && static_cast<int>(rows.size()) < count; ++attempt) {
        ShiftRow row;
        row.k = k;
        row.t = ut(rng);
        const OrbitSample st = orbit_->recompute(row.t, k + 1);
        row.y = st.pos;
        try {
            row.lhs = jump_on_curve(*lh, st.pos, st.normal, st.tan).value;
            for (const auto& pre : m.preimages(TorusPoint(st.pos))) {
                const Vec2 x = pre.point.base.vec();
                const Mat2 inv = pre.derivative.inverse();
                const Vec2 dir = inv * st.tan;
                bool on = false;
                idx.for_each_parallel(x, dir, 1e-9, [&](const ParallelIndex::Hit&) { on = true; });
                if (!on) continue;
                row.rhs += spec().weight(x, pre.derivative) * jump_on_curve(*h, x, inv * st.normal, dir).value;
                ++row.terms;
            }
        } catch (const ProbeRejected&) {
            continue;
        }
        row.residual = std::abs(row.lhs - row.rhs);
        rows.push_back(row);
    }
    if (static_cast<int>(rows.size()) < count) throw ProbeRejected("shift_identity: too many rejected probes");
    return rows;
}

void write_duality_csv(std::ostream& os, const std::vector<DualityRow>& rows) {
    const auto old = os.precision(17);
    os << "k,lhs,rhs,residual,error_budget\n";
    for (const auto& r : rows) os << r.k << ',' << r.lhs << ',' << r.rhs << ',' << r.residual << ',' << r.error_budget << '\n';
    os.precision(old);
}

// ---------------------------------------------------------------- h0 and K

H0 build_h0(const BoundaryFunctionals& f, double radius) {
    const CurveOrbit& o = f.orbit();
    const BaseCurve& g = o.gamma();
    H0 out;
    out.center = wrap(g.point(0.5 * g.length)).vec();
    if (radius > 0.0) {
        out.radius = radius;
    } else {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& s : f.spec().map->gamma()) {
            const EdgeIndex::Edge e{wrap(s.origin).vec(), s.dir * s.length, 0, 0};
            const EdgeIndex::Hit hit = EdgeIndex::closest(e, out.center);
            if (hit.dist < 1e-12 && std::abs(cross(s.dir, g.dir)) < 1e-9) continue;
            dmin = std::min(dmin, hit.dist);
        }
        out.radius = std::min(0.1, 0.25 * dmin);
    }
    out.g = std::make_shared<Bump>(out.center, out.radius);
    const ObsPtr lg = transfer(f.spec(), out.g, 1);
    out.ell1_raw = f.ell(1, *lg).value;
    if (std::abs(out.ell1_raw) < 1e-12) throw ConvergenceFailure("build_h0: ell_1 of the bump image vanishes");
    out.h0 = scaled(lg, 1.0 / out.ell1_raw);
    return out;
}

ObsPtr rank_one_K(const BoundaryFunctionals& f, const H0& h0, const ObsPtr& h) {
    const double c = f.ell(1, *transfer(f.spec(), h, 1)).value;
    return scaled(h0.h0, c);
}

ObsPtr reduced_transfer(const BoundaryFunctionals& f, const H0& h0, const ObsPtr& h) {
    const ObsPtr lh = transfer(f.spec(), h, 1);
    const double c = f.ell(1, *lh).value;
    return std::make_shared<Combination>(std::vector<ObsPtr>{lh, h0.h0}, std::vector<double>{1.0, -c});
}

} // namespace ptorus
