#pragma once

#include "ptorus/maps.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

namespace ptorus {

/// Real function on the torus.
class Observable {
public:
    virtual ~Observable() = default;

    /// Value at a point of [0,1)^2.
    [[nodiscard]] virtual double value(Vec2 p) const = 0;
    /// Number of transfer operator applications in the representation.
    [[nodiscard]] virtual int depth() const { return 0; }
    /// Length scale below which the function may vary quickly.
    [[nodiscard]] virtual double feature_scale() const { return 1.0; }

    [[nodiscard]] double operator()(Vec2 p) const { return value(wrap(p).vec()); }
};

using ObsPtr = std::shared_ptr<const Observable>;

/// Sum of c cos(2 pi (kx x + ky y)) + s sin(2 pi (kx x + ky y)).
class TrigPolynomial final : public Observable {
public:
    struct Term {
        int kx = 0, ky = 0;
        double c = 0, s = 0;
    };

    explicit TrigPolynomial(std::vector<Term> terms);

    /// All frequencies with |kx|, |ky| <= degree (half plane), coefficients N(0,1) / (1 + |k|^2).
    static TrigPolynomial random(std::mt19937_64& rng, int degree = 2);

    [[nodiscard]] double value(Vec2 p) const override;
    [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
    int max_k_ = 0;
};

/// amplitude * (1 - r^2/R^2)^3 on the disc of radius R around center, 0 outside (C^2).
class Bump final : public Observable {
public:
    Bump(Vec2 center, double radius, double amplitude = 1.0);
    [[nodiscard]] double value(Vec2 p) const override;
    [[nodiscard]] Vec2 center() const { return c_; }
    [[nodiscard]] double radius() const { return r_; }
    [[nodiscard]] double feature_scale() const override { return r_; }

private:
    Vec2 c_;
    double r_, a_;
};

/// height on x0 <= x < 1, 0 on 0 <= x < x0.
class Step final : public Observable {
public:
    Step(double x0, double height) : x0_(x0), h_(height) {}
    [[nodiscard]] double value(Vec2 p) const override { return p.x >= x0_ ? h_ : 0.0; }

private:
    double x0_, h_;
};

/// Finite linear combination.
class Combination final : public Observable {
public:
    Combination(std::vector<ObsPtr> parts, std::vector<double> coeffs);
    [[nodiscard]] double value(Vec2 p) const override;
    [[nodiscard]] int depth() const override;
    [[nodiscard]] double feature_scale() const override;

private:
    std::vector<ObsPtr> parts_;
    std::vector<double> coeffs_;
};

/// L^n base under a map and weight, evaluated by preimage recursion.
class TransferImage final : public Observable {
public:
    static constexpr int max_depth = 8;

    TransferImage(MapSpec spec, ObsPtr base, int n);
    [[nodiscard]] double value(Vec2 p) const override;
    [[nodiscard]] int depth() const override { return base_->depth() + n_; }
    [[nodiscard]] double feature_scale() const override { return base_->feature_scale(); }
    [[nodiscard]] const ObsPtr& base() const { return base_; }
    [[nodiscard]] int applications() const { return n_; }
    [[nodiscard]] const MapSpec& spec() const { return spec_; }

private:
    [[nodiscard]] double eval(Vec2 p, int n) const;

    MapSpec spec_;
    ObsPtr base_;
    int n_;
};

/// (L h)(y) = sum over F x = y of h(x) phi(x).
double transfer_apply(const MapSpec& spec, const Observable& h, TorusPoint y);

/// L^n h as an observable; nested images are flattened.
ObsPtr transfer(const MapSpec& spec, const ObsPtr& h, int n = 1);

ObsPtr scaled(const ObsPtr& h, double c);

} // namespace ptorus
