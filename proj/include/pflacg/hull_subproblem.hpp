#ifndef PFLACG_HULL_SUBPROBLEM_HPP_
#define PFLACG_HULL_SUBPROBLEM_HPP_

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "pflacg/active_set.hpp"
#include "pflacg/simplex_projection.hpp"
#include "pflacg/types.hpp"

namespace pflacg {

/// Precomputed geometry of a hull conv(S): the vertex matrix V (one column
/// per vertex), its Gram matrix V'V, and power-iteration bounds on its
/// spectrum. Built once per hull and shared across the many subproblem
/// solves performed over it.
struct HullGeometry {
  std::vector<std::shared_ptr<const Vertex>> verts;
  Matrix v;       // n x d
  Matrix gram;    // d x d
  double gram_lip = 0.0;      // power-iteration estimate of lambda_max(V'V)
  double gram_min_est = 0.0;  // rough estimate of lambda_min(V'V)

  Index ambient_dim() const { return v.rows(); }
  Index size() const { return v.cols(); }

  static HullGeometry from(std::vector<std::shared_ptr<const Vertex>> verts) {
    if (verts.empty()) throw InputError("HullGeometry: empty vertex set");
    HullGeometry h;
    const Index n = verts.front()->coords.size();
    const Index d = static_cast<Index>(verts.size());
    h.v.resize(n, d);
    for (Index j = 0; j < d; ++j) {
      check_dim(verts[j]->coords.size(), n, "HullGeometry");
      h.v.col(j) = verts[j]->coords;
    }
    h.verts = std::move(verts);
    h.gram = h.v.transpose() * h.v;
    h.gram_lip = power_iteration(h.gram);
    // Smallest eigenvalue via one shifted power iteration; used only for
    // iteration-cap sizing, never for certificates.
    Matrix shifted = Matrix::Identity(d, d) * (h.gram_lip * 1.01) - h.gram;
    h.gram_min_est = std::max(0.0, h.gram_lip * 1.01 - power_iteration(shifted));
    return h;
  }

  /// 20 rounds with early exit at relative tolerance 1e-3.
  static double power_iteration(const Matrix& m) {
    const Index d = m.rows();
    if (d == 1) return std::abs(m(0, 0));
    Vector x = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
    double prev = 0.0;
    for (int it = 0; it < 20; ++it) {
      Vector y = m * x;
      const double norm = y.norm();
      if (norm <= 0.0) return 0.0;
      x = y / norm;
      const double est = x.dot(m * x);
      if (it > 0 && std::abs(est - prev) <= 1e-3 * std::abs(est)) return est;
      prev = est;
    }
    return prev;
  }
};

enum class SubproblemCriterion { fw_gap, grad_map };

/// min over conv(S) of  <g, u> + (rho/2) ||u - c||^2, written in barycentric
/// coordinates over the |S|-dimensional probability simplex. This single
/// quadratic form instantiates both models the accelerated iteration solves.
struct HullSubproblem {
  const HullGeometry* hull = nullptr;
  Vector linear;  // g
  Vector center;  // c
  double rho = 1.0;
  double epsilon = 1e-9;  // target additive accuracy on the objective
  SubproblemCriterion criterion = SubproblemCriterion::fw_gap;
  const Vector* warm_start = nullptr;  // optional barycentric warm start
  // When set, the accepted threshold is adaptive_epsilon(u) evaluated at the
  // current iterate u = V lambda instead of the fixed epsilon.
  std::function<double(const Vector& u)> adaptive_epsilon;
  long max_iterations = 0;  // 0 derives the cap from the spectrum estimates
};

struct HullSolveResult {
  Vector lambda;
  Vector u;
  double certificate = 0.0;
  double epsilon_used = 0.0;  // threshold in force when the solve accepted
  long iterations = 0;
  // The iterate stopped moving at floating-point resolution before the
  // certificate reached the threshold; lambda is the fp-exact minimizer but
  // `certificate` is the best provable bound.
  bool stalled = false;
  // Best-so-far certificate recorded at each momentum restart; non-increasing
  // by construction.
  std::vector<double> restart_certificates;
};

namespace detail {

// Summed against the shifted gradient so every term is nonnegative; the
// plain form lambda'grad - min(grad) cancels catastrophically near optima.
inline double fw_gap_certificate(const Vector& lambda, const Vector& grad) {
  const double lo = grad.minCoeff();
  double gap = 0.0;
  for (Index i = 0; i < lambda.size(); ++i) {
    gap += lambda[i] * (grad[i] - lo);
  }
  return gap;
}

}  // namespace detail

/// Accelerated projected gradient over the barycentric simplex, with
/// O'Donoghue-Candes gradient restarts and per-iteration certificates.
///
/// The fw-gap criterion certifies the additive gap directly by convexity.
/// The grad-map criterion uses the strong convexity of the barycentric
/// Hessian rho V'V; when its smallest eigenvalue is not safely positive the
/// solver falls back to the fw-gap certificate.
inline HullSolveResult solve_hull_subproblem(const HullSubproblem& p) {
  if (p.hull == nullptr || p.hull->size() < 1) {
    throw InputError("solve_hull_subproblem: empty hull");
  }
  const HullGeometry& hull = *p.hull;
  const Index d = hull.size();
  HullSolveResult result;

  if (d == 1) {
    result.lambda = Vector::Ones(1);
    result.u = hull.v.col(0);
    result.certificate = 0.0;
    result.epsilon_used = p.epsilon;
    return result;
  }

  check_dim(p.linear.size(), hull.ambient_dim(), "solve_hull_subproblem/g");
  check_dim(p.center.size(), hull.ambient_dim(), "solve_hull_subproblem/c");
  if (p.rho <= 0) throw InputError("solve_hull_subproblem: rho must be > 0");

  // Gradient in lambda: q0 + rho * gram * lambda.
  const Vector q0 = hull.v.transpose() * (p.linear - p.rho * p.center);

  SubproblemCriterion criterion = p.criterion;
  double strong = 0.0;
  if (criterion == SubproblemCriterion::grad_map) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hull.gram,
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig > 1e-12) {
      strong = p.rho * min_eig;
    } else {
      criterion = SubproblemCriterion::fw_gap;
    }
  }

  auto certificate = [&](const Vector& lambda, const Vector& grad) {
    if (criterion == SubproblemCriterion::grad_map) {
      const Vector proj = project_to_simplex(lambda - grad / strong);
      return 0.5 * strong * (lambda - proj).squaredNorm();
    }
    return detail::fw_gap_certificate(lambda, grad);
  };

  Vector lambda;
  if (p.warm_start != nullptr && p.warm_start->size() == d &&
      p.warm_start->minCoeff() >= 0.0 && p.warm_start->sum() > 0.0) {
    lambda = *p.warm_start / p.warm_start->sum();
  } else {
    lambda = Vector::Constant(d, 1.0 / static_cast<double>(d));
  }

  Vector grad = q0 + p.rho * (hull.gram * lambda);
  double cert = certificate(lambda, grad);
  double best_cert = cert;
  Vector u = hull.v * lambda;
  double threshold =
      p.adaptive_epsilon ? p.adaptive_epsilon(u) : p.epsilon;
  if (cert <= threshold) {
    result.lambda = std::move(lambda);
    result.u = std::move(u);
    result.certificate = cert;
    result.epsilon_used = threshold;
    return result;
  }

  const double lip = std::max(1.1 * p.rho * hull.gram_lip, 1e-300);
  // The condition-number-based cap extends itself while the certificate
  // keeps halving: the power-iteration estimate of the smallest eigenvalue
  // can be orders of magnitude high on clustered spectra, and a cap sized
  // from it must not cut off a solve that is still converging. The hard
  // ceiling is where the accuracy error fires.
  constexpr long kCapCeiling = 2000000;
  long cap = p.max_iterations;
  bool extendable = false;
  if (cap <= 0) {
    const double min_est =
        std::max(p.rho * hull.gram_min_est / 16.0, lip * 1e-13);
    const double kappa = lip / min_est;
    const double eps_rel =
        std::clamp(threshold > 0 ? threshold / cert : 1e-16, 1e-16, 0.5);
    cap = static_cast<long>(
        std::ceil(10.0 * (1.0 + std::sqrt(kappa)) * std::log(1.0 / eps_rel)));
    cap = std::clamp(cap, 5000L, kCapCeiling);
    extendable = true;
  }
  double cert_at_extension = cert;

  Vector y = lambda;
  Vector best_lambda = lambda;
  double momentum = 1.0;
  int still = 0;
  double window_best = best_cert;
  for (long it = 1; it <= cap; ++it) {
    if (it == cap && extendable && cap < kCapCeiling &&
        best_cert <= 0.5 * cert_at_extension) {
      cap = std::min(2 * cap, kCapCeiling);
      cert_at_extension = best_cert;
    }
    const Vector grad_y = q0 + p.rho * (hull.gram * y);
    Vector next = project_to_simplex(y - grad_y / lip);
    if (grad_y.dot(next - lambda) > 0.0) {
      momentum = 1.0;
      y = next;
      result.restart_certificates.push_back(best_cert);
    } else {
      const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = next + ((momentum - 1.0) / m_next) * (next - lambda);
      momentum = m_next;
    }
    const double moved = (next - lambda).lpNorm<Eigen::Infinity>();
    lambda = std::move(next);

    grad = q0 + p.rho * (hull.gram * lambda);
    cert = certificate(lambda, grad);
    if (cert < best_cert) {
      best_cert = cert;
      best_lambda = lambda;
    }
    u = hull.v * lambda;
    threshold = p.adaptive_epsilon ? p.adaptive_epsilon(u) : p.epsilon;
    if (cert <= threshold) {
      result.lambda = std::move(lambda);
      result.u = std::move(u);
      result.certificate = cert;
      result.epsilon_used = threshold;
      result.iterations = it;
      return result;
    }

    // Stall acceptance: the iterate has hit floating-point resolution (no
    // movement) or the certificate has plateaued for a whole window; the
    // best iterate is returned with the best provable bound.
    still = moved <= 1e-13 ? still + 1 : 0;
    bool plateau = false;
    if (it % 512 == 0) {
      plateau = best_cert > (1.0 - 2e-3) * window_best;
      window_best = best_cert;
    }
    if (still >= 30 || plateau) {
      result.lambda = best_lambda;
      result.u = hull.v * best_lambda;
      result.certificate = best_cert;
      result.epsilon_used = threshold;
      result.iterations = it;
      result.stalled = true;
      return result;
    }
  }
  throw AccuracyError(
      "solve_hull_subproblem: iteration cap " + std::to_string(cap) +
          " reached (best certificate " + std::to_string(best_cert) +
          ", threshold " + std::to_string(threshold) + ")",
      best_cert);
}

/// Euclidean projection of a point onto conv(S), solved to the given additive
/// certificate on the projection objective.
inline HullSolveResult project_to_hull(const HullGeometry& hull,
                                       const Vector& point, double certificate,
                                       const Vector* warm_start = nullptr) {
  HullSubproblem p;
  p.hull = &hull;
  p.linear = Vector::Zero(point.size());
  p.center = point;
  p.rho = 1.0;
  p.epsilon = certificate;
  p.warm_start = warm_start;
  return solve_hull_subproblem(p);
}

}  // namespace pflacg

#endif  // PFLACG_HULL_SUBPROBLEM_HPP_
