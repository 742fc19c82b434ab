#ifndef PFLACG_AGD_HPP_
#define PFLACG_AGD_HPP_

#include <cmath>

#include "pflacg/gradient_mapping.hpp"
#include "pflacg/hull_subproblem.hpp"
#include "pflacg/objective.hpp"

namespace pflacg {

/// State threaded through the accelerated iterations over a fixed hull.
/// Every point is carried together with its barycentric coordinates, so the
/// iterate sequence stays inside conv(S) by construction and snapshots can
/// report a proper support.
struct AgdState {
  Vector y, v, z;
  Vector y_hat;
  Vector lambda_y, lambda_v, lambda_yhat;
  double a_sum = 1.0;  // A_k, strictly increasing, A_0 = a_0 = 1
  double eta = 0.0;    // running smoothness estimate
  double sigma = 0.0;  // regularization weight of f_sigma
  double eps0 = 0.0;   // per-call base accuracy
  double eta0 = 0.0;   // entry smoothness estimate (floor for eta)
  Vector anchor;       // regularization center x_0
};

struct AgdIterOutcome {
  GradMapValue g_tilde;
  long eta_doublings = 0;
};

/// One accelerated iteration with eta backtracking.
///
/// The trial eta starts at half the carried estimate and doubles until both
/// smoothness inequalities hold for f itself. Each trial recomputes the
/// coupling weight theta = sqrt(sigma / (2 (eta + sigma))), solves the
/// momentum model M to a_k eps0 / 4 and the local model l to theta eps0 / 4
/// over the hull, and the accepted trial updates the state in place and
/// returns the inexact gradient mapping (eta + sigma)(y_hat - y).
inline AgdIterOutcome agd_iter(AgdState& state, const ObjectiveOracle& obj,
                               const HullGeometry& hull,
                               FirstOrderCounters& counters,
                               long subproblem_cap = 0) {
  if (state.eps0 <= 0) throw InputError("agd_iter: eps0 must be positive");
  AgdIterOutcome outcome;

  const Vector y_prev = state.y;
  const Vector v_prev = state.v;
  const Vector z_prev = state.z;
  const Vector lambda_y_prev = state.lambda_y;
  const Vector lambda_v_prev = state.lambda_v;
  const double a_sum_prev = state.a_sum;

  double eta = state.eta / 2.0;
  const double ceiling = std::ldexp(state.eta0, 60);
  while (true) {
    eta *= 2.0;
    if (eta > ceiling) {
      throw DivergenceError("agd_iter: smoothness estimate diverged");
    }
    const double theta = std::sqrt(state.sigma / (2.0 * (eta + state.sigma)));
    const double a = theta / (1.0 - theta) * a_sum_prev;
    const double a_sum = a_sum_prev + a;
    const double eps_ell = theta * state.eps0 / 4.0;
    const double eps_m = a * state.eps0 / 4.0;

    const Vector x = (y_prev + theta * v_prev) / (1.0 + theta);
    const FooResult foo_x = eval_foo(obj, x, counters);
    const Vector grad_sigma_x =
        foo_x.grad + state.sigma * (x - state.anchor);
    const Vector z = z_prev - a * grad_sigma_x + state.sigma * a * x;

    HullSubproblem momentum_model;
    momentum_model.hull = &hull;
    momentum_model.linear = -z;
    momentum_model.center = Vector::Zero(z.size());
    momentum_model.rho = state.sigma * a_sum + state.eta0;
    momentum_model.epsilon = eps_m;
    momentum_model.warm_start = &lambda_v_prev;
    momentum_model.max_iterations = subproblem_cap;
    HullSolveResult v_sol = solve_hull_subproblem(momentum_model);

    const Vector y_hat = (1.0 - theta) * y_prev + theta * v_sol.u;
    const Vector lambda_yhat =
        (1.0 - theta) * lambda_y_prev + theta * v_sol.lambda;
    const FooResult foo_yhat = eval_foo(obj, y_hat, counters);
    const Vector grad_sigma_yhat =
        foo_yhat.grad + state.sigma * (y_hat - state.anchor);

    HullSubproblem local_model;
    local_model.hull = &hull;
    local_model.linear = grad_sigma_yhat;
    local_model.center = y_hat;
    local_model.rho = eta + state.sigma;
    local_model.epsilon = eps_ell;
    local_model.warm_start = &lambda_yhat;
    local_model.max_iterations = subproblem_cap;
    HullSolveResult y_sol = solve_hull_subproblem(local_model);

    ++counters.foo_calls;
    const double f_y = obj.value(y_sol.u);

    const Vector dx = y_hat - x;
    const Vector dy = y_sol.u - y_hat;
    const double rhs1 =
        foo_x.value + foo_x.grad.dot(dx) + 0.5 * eta * dx.squaredNorm();
    const double rhs2 =
        foo_yhat.value + foo_yhat.grad.dot(dy) + 0.5 * eta * dy.squaredNorm();
    const double slack1 = 1e-12 * (std::abs(rhs1) + std::abs(foo_yhat.value) + 1.0);
    const double slack2 = 1e-12 * (std::abs(rhs2) + std::abs(f_y) + 1.0);
    if (foo_yhat.value <= rhs1 + slack1 && f_y <= rhs2 + slack2) {
      state.eta = eta;
      state.a_sum = a_sum;
      state.z = z;
      state.v = v_sol.u;
      state.lambda_v = v_sol.lambda;
      state.y_hat = y_hat;
      state.lambda_yhat = lambda_yhat;
      state.y = y_sol.u;
      state.lambda_y = y_sol.lambda;

      outcome.g_tilde.g = (eta + state.sigma) * (y_hat - y_sol.u);
      outcome.g_tilde.eta_plus_sigma = eta + state.sigma;
      outcome.g_tilde.exactness = MappingExactness::inexact;
      outcome.g_tilde.eps_ell = eps_ell;
      return outcome;
    }
    ++outcome.eta_doublings;
  }
}

}  // namespace pflacg

#endif  // PFLACG_AGD_HPP_
