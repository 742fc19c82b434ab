#ifndef PFLACG_OBJECTIVE_HPP_
#define PFLACG_OBJECTIVE_HPP_

#include <cmath>
#include <memory>
#include <optional>

#include "pflacg/types.hpp"

namespace pflacg {

/// First-order oracle for a smooth convex objective. Implementations must be
/// immutable after construction; they are read concurrently by workers.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// d' * Hessian(x) * d, when it is cheap to evaluate (quadratics).
  /// Absent signals the line search to fall back to derivative-free search.
  virtual std::optional<double> curvature_along(const Vector& x,
                                                const Vector& d) const {
    (void)x;
    (void)d;
    return std::nullopt;
  }
};

struct FooResult {
  double value;
  Vector grad;
};

/// One first-order oracle query: f(x) and grad f(x), counted as one call.
inline FooResult eval_foo(const ObjectiveOracle& obj, const Vector& x,
                          FirstOrderCounters& counters) {
  check_dim(x.size(), obj.dim(), "eval_foo");
  ++counters.foo_calls;
  return FooResult{obj.value(x), obj.gradient(x)};
}

/// f(x) = x'Qx/2 + b'x with Q symmetric positive semidefinite.
class QuadraticObjective : public ObjectiveOracle {
 public:
  QuadraticObjective(Matrix q, Vector b) : q_(std::move(q)), b_(std::move(b)) {
    if (q_.rows() != q_.cols() || q_.rows() != b_.size()) {
      throw InputError("QuadraticObjective: Q must be n x n matching b");
    }
    const double scale = q_.cwiseAbs().maxCoeff();
    const double asym = (q_ - q_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1.0)) {
      throw InputError("QuadraticObjective: Q is not symmetric");
    }
  }

  Index dim() const override { return b_.size(); }

  double value(const Vector& x) const override {
    check_dim(x.size(), dim(), "QuadraticObjective::value");
    return 0.5 * x.dot(q_ * x) + b_.dot(x);
  }

  Vector gradient(const Vector& x) const override {
    check_dim(x.size(), dim(), "QuadraticObjective::gradient");
    return q_ * x + b_;
  }

  std::optional<double> curvature_along(const Vector& x,
                                        const Vector& d) const override {
    (void)x;
    check_dim(d.size(), dim(), "QuadraticObjective::curvature_along");
    return d.dot(q_ * d);
  }

  const Matrix& hessian() const { return q_; }
  const Vector& linear_term() const { return b_; }

 private:
  Matrix q_;
  Vector b_;
};

/// f_sigma(x) = f(x) + (sigma/2) ||x - anchor||^2. A view over a base oracle;
/// evaluating it queries the base oracle once per call.
class RegularizedObjective : public ObjectiveOracle {
 public:
  RegularizedObjective(const ObjectiveOracle& base, double sigma, Vector anchor)
      : base_(base), sigma_(sigma), anchor_(std::move(anchor)) {
    check_dim(anchor_.size(), base_.dim(), "RegularizedObjective");
  }

  Index dim() const override { return base_.dim(); }

  double value(const Vector& x) const override {
    return base_.value(x) + 0.5 * sigma_ * (x - anchor_).squaredNorm();
  }

  Vector gradient(const Vector& x) const override {
    return base_.gradient(x) + sigma_ * (x - anchor_);
  }

  std::optional<double> curvature_along(const Vector& x,
                                        const Vector& d) const override {
    auto base = base_.curvature_along(x, d);
    if (!base) return std::nullopt;
    return *base + sigma_ * d.squaredNorm();
  }

  double sigma() const { return sigma_; }
  const Vector& anchor() const { return anchor_; }

 private:
  const ObjectiveOracle& base_;
  double sigma_;
  Vector anchor_;
};

/// Curvature estimate 2(f(y) - f(x) - <grad f(x), y - x>) / ||y - x||^2.
/// For an m-strongly-convex, L-smooth f this lies in [m, L], so it serves as
/// the initial regularization weight for the accelerated runs.
inline double sigma0_estimate(const ObjectiveOracle& obj, const Vector& x,
                              const Vector& y) {
  check_dim(x.size(), obj.dim(), "sigma0_estimate");
  check_dim(y.size(), obj.dim(), "sigma0_estimate");
  const double dist2 = (y - x).squaredNorm();
  if (std::sqrt(dist2) < 1e-14) {
    throw InputError("sigma0_estimate: x and y coincide");
  }
  const double fx = obj.value(x);
  const double fy = obj.value(y);
  const Vector gx = obj.gradient(x);
  return 2.0 * (fy - fx - gx.dot(y - x)) / dist2;
}

}  // namespace pflacg

#endif  // PFLACG_OBJECTIVE_HPP_
