#include "ptorus/bounds.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ptorus {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double pi = 3.14159265358979323846;

double root(double log_a, int k) { return std::isnan(log_a) ? nan : std::exp(log_a / k); }

void fill_estimates(BoundReport& r) {
    r.bv = estimate_rate(r.log_bv, r.window_frac);
    r.linf1 = estimate_rate(r.log_linf1, r.window_frac);
    const auto finite = std::count_if(r.log_linf2.begin(), r.log_linf2.end(), [](double v) { return std::isfinite(v); });
    if (finite >= 2) r.linf2 = estimate_rate(r.log_linf2, r.window_frac);
    r.linf = std::max(r.linf1.value, r.linf2.value);
}

} // namespace

RateEstimate estimate_rate(const std::vector<double>& log_a, double window_frac) {
    RateEstimate e;
    int last = 0;
    for (int k = 1; k <= static_cast<int>(log_a.size()); ++k)
        if (std::isfinite(log_a[k - 1])) last = k;
    if (last < 2) throw InvalidArgument("estimate_rate: sequence too short");
    e.k_hi = last;
    e.k_lo = std::clamp(static_cast<int>(std::ceil(window_frac * last)), 1, last - 1);
    double n = 0, sk = 0, sy = 0, skk = 0, sky = 0;
    e.window_min = std::numeric_limits<double>::infinity();
    for (int k = e.k_lo; k <= e.k_hi; ++k) {
        const double y = log_a[k - 1];
        if (!std::isfinite(y)) continue;
        n += 1;
        sk += k;
        sy += y;
        skk += static_cast<double>(k) * k;
        sky += k * y;
        e.window_min = std::min(e.window_min, std::exp(y / k));
    }
    if (n < 2) throw InvalidArgument("estimate_rate: window has fewer than two entries");
    e.slope = (n * sky - sk * sy) / (n * skk - sk * sk);
    e.value = std::exp(e.slope);
    return e;
}

BoundReport lower_bounds(const CurveOrbit& orbit, double window_frac) {
    const int K = orbit.depth();
    if (K < 2) throw InvalidArgument("lower_bounds: orbit too shallow");
    BoundReport r;
    r.map = orbit.spec().map->name();
    r.weight = orbit.spec().weight.label();
    r.K = K;
    r.window_frac = window_frac;
    for (int k = 1; k <= K; ++k) {
        double bv = std::numeric_limits<double>::infinity(), l1 = bv;
        for (const auto& run : orbit.level(k).runs)
            for (const auto& s : run.samples) {
                bv = std::min(bv, std::log(std::abs(s.phi) * s.jac));
                l1 = std::min(l1, std::log(std::abs(s.phi)));
            }
        if (!std::isfinite(bv)) bv = l1 = nan;
        r.log_bv.push_back(bv);
        r.log_linf1.push_back(l1);
        r.log_linf2.push_back(k < K ? bv - std::log(orbit.level(k + 1).length()) : nan);
    }
    fill_estimates(r);
    return r;
}

BoundReport lower_bounds(const MapSpec& spec, const CurveTrace& trace, const CurveOrbit* lengths, double window_frac) {
    const int K = trace.depth();
    if (K < 2) throw InvalidArgument("lower_bounds: trace too shallow");
    BoundReport r;
    r.map = spec.map->name();
    r.weight = spec.weight.label();
    r.K = K;
    r.window_frac = window_frac;
    for (int k = 1; k <= K; ++k) {
        double bv = std::numeric_limits<double>::infinity(), l1 = bv;
        for (const auto& p : trace.levels[static_cast<std::size_t>(k - 1)]) {
            bv = std::min(bv, p.log_phi + p.log_jac);
            l1 = std::min(l1, p.log_phi);
        }
        r.log_bv.push_back(bv);
        r.log_linf1.push_back(l1);
        const bool have_len = lengths != nullptr && k + 1 <= lengths->depth();
        r.log_linf2.push_back(have_len ? bv - std::log(lengths->level(k + 1).length()) : nan);
    }
    fill_estimates(r);
    return r;
}

double lambda_bv(const CurveOrbit& orbit) {
    if (orbit.depth() < 10) throw InvalidArgument("lambda_bv: orbit depth >= 10 required");
    return lower_bounds(orbit).bv.value;
}

LinfEstimate lambda_linf(const CurveOrbit& orbit) {
    if (orbit.depth() < 10) throw InvalidArgument("lambda_linf: orbit depth >= 10 required");
    const BoundReport r = lower_bounds(orbit);
    return {r.linf1.value, r.linf2.value, r.linf};
}

void BoundReport::write_csv(std::ostream& os) const {
    const auto old = os.precision(17);
    os << "k,raw_bv,root_bv,raw_linf1,root_linf1,raw_linf2,root_linf2,window\n";
    for (int k = 1; k <= K; ++k) {
        const auto i = static_cast<std::size_t>(k - 1);
        const bool in = k >= bv.k_lo && k <= bv.k_hi;
        os << k << ',' << std::exp(log_bv[i]) << ',' << root(log_bv[i], k) << ',' << std::exp(log_linf1[i]) << ','
           << root(log_linf1[i], k) << ',' << std::exp(log_linf2[i]) << ',' << root(log_linf2[i], k) << ','
           << (in ? 1 : 0) << '\n';
    }
    os.precision(old);
}

void BoundReport::write_summary(std::ostream& os) const {
    const auto old = os.precision(12);
    auto line = [&](const char* name, const RateEstimate& e) {
        os << name << " = " << e.value << "\n"
           << name << ".window_min = " << e.window_min << "\n"
           << name << ".window = " << e.k_lo << ".." << e.k_hi << "\n";
    };
    os << "map = " << map << "\nweight = " << weight << "\nK = " << K << "\n";
    line("lambda_bv", bv);
    line("lambda_linf1", linf1);
    line("lambda_linf2", linf2);
    os << "lambda_linf = " << linf << "\n";
    os.precision(old);
}

// ---------------------------------------------------------------- cylinders

ComplexityReport cylinder_complexity(const MapSpec& spec, int n_max, const ComplexityOptions& opt) {
    if (n_max < 1) throw InvalidArgument("cylinder_complexity: n_max >= 1 required");
    if (opt.directions < 8 || !(opt.radius > 0.0)) throw InvalidArgument("cylinder_complexity: bad probe options");
    const Map& m = *spec.map;
    const auto bounds = m.partition_boundaries();

    std::vector<Vec2> probes;
    std::vector<Vec2> corners;
    for (const auto& s : bounds) {
        for (int i = 0; i < opt.along; ++i) probes.push_back(s.origin + s.dir * (s.length * (i + 0.5) / opt.along));
        corners.push_back(s.origin);
        corners.push_back(s.origin + s.dir * s.length);
    }
    for (std::size_t i = 0; i < bounds.size(); ++i)
        for (std::size_t j = i + 1; j < bounds.size(); ++j) {
            const auto& a = bounds[i];
            const auto& b = bounds[j];
            const double den = cross(a.dir, b.dir);
            if (std::abs(den) < 1e-12) continue;
            const Vec2 w = b.origin - a.origin;
            const double sa = cross(w, b.dir) / den, sb = cross(w, a.dir) / den;
            if (sa < -1e-12 || sa > a.length + 1e-12 || sb < -1e-12 || sb > b.length + 1e-12) continue;
            corners.push_back(a.origin + a.dir * sa);
        }
    std::vector<Vec2> layer = corners;
    for (int d = 0; d < opt.preimage_depth; ++d) {
        std::vector<Vec2> next;
        for (const auto& c : layer)
            for (const auto& p : m.preimages(wrap(c))) next.push_back(p.point.base.vec());
        corners.insert(corners.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    probes.insert(probes.end(), corners.begin(), corners.end());
    for (auto& p : probes) p = wrap(p).vec();

    ComplexityReport rep;
    rep.max_multiplicity.assign(static_cast<std::size_t>(n_max), 1);
    rep.argmax.assign(static_cast<std::size_t>(n_max), {});
    std::vector<std::vector<int>> seq(static_cast<std::size_t>(opt.directions));
    for (const auto& p : probes) {
        for (int i = 0; i < opt.directions; ++i) {
            const double th = 2 * pi * (i + 0.5) / opt.directions;
            Vec2 q = wrap(p + Vec2{std::cos(th), std::sin(th)} * opt.radius).vec();
            auto& s = seq[static_cast<std::size_t>(i)];
            s.clear();
            for (int n = 0; n < n_max; ++n) {
                s.push_back(m.branch_of(q));
                q = wrap(m.step(q)).vec();
            }
        }
        std::sort(seq.begin(), seq.end());
        for (int n = 1; n <= n_max; ++n) {
            int count = 1;
            for (std::size_t i = 1; i < seq.size(); ++i)
                if (!std::equal(seq[i].begin(), seq[i].begin() + n, seq[i - 1].begin())) ++count;
            auto& best = rep.max_multiplicity[static_cast<std::size_t>(n - 1)];
            if (count > best) {
                best = count;
                rep.argmax[static_cast<std::size_t>(n - 1)] = p;
            }
        }
    }
    std::vector<double> logs, incr;
    for (int n = 1; n <= n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        const double l = std::log(static_cast<double>(rep.max_multiplicity[i]));
        rep.rate.push_back(l / n);
        logs.push_back(l);
        const int d = n > 1 ? rep.max_multiplicity[i] - rep.max_multiplicity[i - 1] : 0;
        incr.push_back(d > 0 ? std::log(static_cast<double>(d)) : nan);
    }
    if (n_max >= 3) rep.log_slope = estimate_rate(logs).slope;
    const int lo = static_cast<int>(std::ceil(0.5 * n_max));
    int positive = 0;
    for (int n = lo; n <= n_max; ++n) positive += std::isfinite(incr[static_cast<std::size_t>(n - 1)]) ? 1 : 0;
    if (positive >= 2) {
        for (int n = 1; n < lo; ++n) incr[static_cast<std::size_t>(n - 1)] = nan;
        rep.h_estimate = std::max(0.0, estimate_rate(incr, 0.0).slope);
    }
    return rep;
}

UpperReport lambda_upper(const MapSpec& spec, int n_max, int n_growth, int grid, const ComplexityOptions& opt) {
    if (n_max < 3 || n_growth < 3 || grid < 1) throw InvalidArgument("lambda_upper: n >= 3 and grid >= 1 required");
    const Map& m = *spec.map;
    UpperReport rep;
    rep.complexity = cylinder_complexity(spec, n_max, opt);
    rep.log_norm.assign(static_cast<std::size_t>(n_growth), -std::numeric_limits<double>::infinity());
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            Vec2 q{(i + 0.5) / grid, (j + 0.5) / grid};
            Mat2 P;
            double log_phi = 0;
            for (int n = 1; n <= n_growth; ++n) {
                const int cell = m.cell_of(q);
                const Mat2 d = m.jacobian_raw(q, cell);
                log_phi += std::log(std::abs(spec.weight(q, d)));
                P = d * P;
                const double v = log_phi + std::log(std::abs(P.det())) - std::log(P.sigma_min());
                auto& best = rep.log_norm[static_cast<std::size_t>(n - 1)];
                best = std::max(best, v);
                q = wrap(m.eval_raw(q, cell)).vec();
            }
        }
    rep.growth = estimate_rate(rep.log_norm);
    rep.value = std::exp(rep.complexity.h_estimate) * rep.growth.value;
    return rep;
}

} // namespace ptorus
