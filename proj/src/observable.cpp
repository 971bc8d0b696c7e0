#include "ptorus/observable.hpp"

#include "ptorus/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace ptorus {

namespace {
constexpr double two_pi = 6.28318530717958647692;
}

TrigPolynomial TrigPolynomial::random(std::mt19937_64& rng, int degree) {
    if (degree < 0) throw InvalidArgument("TrigPolynomial::random: degree >= 0 required");
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<Term> terms;
    for (int kx = 0; kx <= degree; ++kx)
        for (int ky = -degree; ky <= degree; ++ky) {
            if (kx == 0 && ky < 0) continue;
            const double s = 1.0 / (1.0 + kx * kx + ky * ky);
            Term t{kx, ky, n01(rng) * s, n01(rng) * s};
            if (kx == 0 && ky == 0) t.s = 0;
            terms.push_back(t);
        }
    return TrigPolynomial(std::move(terms));
}

TrigPolynomial::TrigPolynomial(std::vector<Term> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) max_k_ = std::max({max_k_, std::abs(t.kx), std::abs(t.ky)});
    if (max_k_ > 64) throw InvalidArgument("TrigPolynomial: frequencies up to 64 supported");
}

double TrigPolynomial::value(Vec2 p) const {
    // powers of exp(2 pi i x) and exp(2 pi i y), index k + max_k
    std::array<std::complex<double>, 129> ex, ey;
    const int m = max_k_;
    const std::complex<double> zx = std::polar(1.0, two_pi * p.x), zy = std::polar(1.0, two_pi * p.y);
    ex[static_cast<std::size_t>(m)] = ey[static_cast<std::size_t>(m)] = 1.0;
    for (int k = 1; k <= m; ++k) {
        const auto i = static_cast<std::size_t>(m + k), j = static_cast<std::size_t>(m - k);
        ex[i] = ex[i - 1] * zx;
        ey[i] = ey[i - 1] * zy;
        ex[j] = std::conj(ex[i]);
        ey[j] = std::conj(ey[i]);
    }
    double v = 0;
    for (const auto& t : terms_) {
        const std::complex<double> e = ex[static_cast<std::size_t>(m + t.kx)] * ey[static_cast<std::size_t>(m + t.ky)];
        v += t.c * e.real() + t.s * e.imag();
    }
    return v;
}

Bump::Bump(Vec2 center, double radius, double amplitude) : c_(wrap(center).vec()), r_(radius), a_(amplitude) {
    if (!(radius > 0.0) || radius >= 0.5) throw InvalidArgument("Bump: radius in (0, 1/2) required");
}

double Bump::value(Vec2 p) const {
    const Vec2 d = min_image(c_, p);
    const double q = dot(d, d) / (r_ * r_);
    if (q >= 1.0) return 0.0;
    const double w = 1.0 - q;
    return a_ * w * w * w;
}

Combination::Combination(std::vector<ObsPtr> parts, std::vector<double> coeffs)
    : parts_(std::move(parts)), coeffs_(std::move(coeffs)) {
    if (parts_.size() != coeffs_.size()) throw InvalidArgument("Combination: size mismatch");
    for (const auto& p : parts_)
        if (!p) throw InvalidArgument("Combination: null part");
}

double Combination::value(Vec2 p) const {
    double v = 0;
    for (std::size_t i = 0; i < parts_.size(); ++i)
        if (coeffs_[i] != 0.0) v += coeffs_[i] * parts_[i]->value(p);
    return v;
}

double Combination::feature_scale() const {
    double f = 1.0;
    for (const auto& p : parts_) f = std::min(f, p->feature_scale());
    return f;
}

int Combination::depth() const {
    int d = 0;
    for (const auto& p : parts_) d = std::max(d, p->depth());
    return d;
}

TransferImage::TransferImage(MapSpec spec, ObsPtr base, int n) : spec_(std::move(spec)), base_(std::move(base)), n_(n) {
    if (!base_ || !spec_.map) throw InvalidArgument("TransferImage: null map or base");
    if (n < 0 || base_->depth() + n > max_depth)
        throw InvalidArgument("TransferImage: total depth must lie in [0, " + std::to_string(max_depth) + "]");
}

double TransferImage::eval(Vec2 p, int n) const {
    if (n == 0) return base_->value(p);
    double v = 0;
    for (const auto& pre : spec_.map->preimages(TorusPoint(p))) {
        const Vec2 x = pre.point.base.vec();
        v += spec_.weight(x, pre.derivative) * eval(x, n - 1);
    }
    return v;
}

double TransferImage::value(Vec2 p) const { return eval(p, n_); }

double transfer_apply(const MapSpec& spec, const Observable& h, TorusPoint y) {
    double v = 0;
    for (const auto& pre : spec.map->preimages(y)) {
        const Vec2 x = pre.point.base.vec();
        v += spec.weight(x, pre.derivative) * h.value(x);
    }
    return v;
}

ObsPtr transfer(const MapSpec& spec, const ObsPtr& h, int n) {
    if (!h) throw InvalidArgument("transfer: null observable");
    if (n == 0) return h;
    const auto* t = dynamic_cast<const TransferImage*>(h.get());
    if (t != nullptr && t->spec().map == spec.map && t->spec().weight.kind() == spec.weight.kind() &&
        (spec.weight.kind() == WeightKind::unit || spec.weight.kind() == WeightKind::inverse_det))
        return std::make_shared<TransferImage>(spec, t->base(), t->applications() + n);
    return std::make_shared<TransferImage>(spec, h, n);
}

ObsPtr scaled(const ObsPtr& h, double c) { return std::make_shared<Combination>(std::vector<ObsPtr>{h}, std::vector<double>{c}); }

} // namespace ptorus
