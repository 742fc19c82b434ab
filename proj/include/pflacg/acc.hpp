#ifndef PFLACG_ACC_HPP_
#define PFLACG_ACC_HPP_

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "pflacg/active_set.hpp"
#include "pflacg/agd.hpp"
#include "pflacg/gradient_mapping.hpp"
#include "pflacg/objective.hpp"

namespace pflacg {

struct AccConfig {
  long subproblem_cap = 0;        // 0 = automatic
  long max_inner_per_call = 200000;
  int max_sigma_halvings_per_call = 120;
  // Norm of the warm-start mapping at or below which an anchor counts as
  // optimal on its hull; the stream then idles instead of chasing zero.
  double entry_tolerance = 0.0;
};

struct AccTraceRow {
  long call = 0;
  long inner_iteration = 0;  // cumulative across the stream
  double eta = 0.0;
  double sigma = 0.0;
  double a_sum = 0.0;
  double eps0 = 0.0;
  double g_tilde_scaled = 0.0;  // ||G~|| / sqrt(eta + sigma)
};

enum class AccEvent {
  advanced,       // one unit of work done (an l0 phase or one AGD iteration)
  call_complete,  // both exit tests passed; the anchor moved
  converged,      // anchor is optimal on the hull at fp resolution
  idle,           // singleton hull or converged earlier; nothing to do
};

/// Resumable restarted accelerated run over the convex hull of an active set.
///
/// One advance() performs one unit: either the warm-start model phase that
/// opens a sigma round, or a single accelerated iteration. The hull and
/// anchor can be swapped between units, which is the cooperative checkpoint
/// the coupling layer relies on. Completed calls chain automatically: the
/// output point becomes the next anchor with eta and sigma carried over.
class AccStream {
 public:
  AccStream(const ObjectiveOracle& obj, FirstOrderCounters& counters,
            AccConfig cfg = {})
      : obj_(obj), counters_(counters), cfg_(cfg) {}

  /// Install a new hull and anchor. eta0/sigma0 from a curvature estimate
  /// between the anchor and the probe point (or the farthest hull vertex
  /// when no probe is given); explicit values win when provided.
  void seed(const ActiveSet& snapshot, const Vector* probe = nullptr,
            std::optional<double> eta0 = std::nullopt,
            std::optional<double> sigma0 = std::nullopt) {
    hull_ = std::make_shared<HullGeometry>(HullGeometry::from(snapshot.vertices()));
    anchor_ = snapshot.point();
    lambda_anchor_ = Eigen::Map<const Vector>(snapshot.weights().data(),
                                              static_cast<Index>(snapshot.size()));
    latest_lambda_ = lambda_anchor_;
    latest_point_ = anchor_;
    anchor_foo_.reset();

    if (hull_->size() < 2) {
      phase_ = Phase::idle;
      return;
    }
    double s0;
    if (sigma0) {
      s0 = *sigma0;
    } else {
      const Vector* other = probe;
      Index far = 0;
      double far_d = -1.0;
      if (other == nullptr) {
        for (Index j = 0; j < hull_->size(); ++j) {
          const double d = (hull_->v.col(j) - anchor_).norm();
          if (d > far_d) {
            far_d = d;
            far = j;
          }
        }
        if (far_d < 1e-13) {
          phase_ = Phase::idle;
          return;
        }
      }
      const Vector probe_pt = other ? *other : Vector(hull_->v.col(far));
      if ((probe_pt - anchor_).norm() < 1e-13) {
        phase_ = Phase::idle;
        return;
      }
      s0 = std::max(sigma0_estimate(obj_, anchor_, probe_pt), 1e-12);
      counters_.foo_calls += 2;  // the estimate evaluates f at both points
    }
    sigma_ = s0;
    eta_ = eta0 ? *eta0 : s0;
    eta_call0_ = eta_;
    inner_in_call_ = 0;
    sigma_halvings_ = 0;
    phase_ = Phase::l0;
  }

  bool active() const {
    return phase_ == Phase::l0 || phase_ == Phase::inner;
  }
  bool converged() const { return phase_ == Phase::converged; }

  double eta() const { return eta_; }
  double sigma() const { return sigma_; }
  double eps0() const { return eps0_; }
  long call_count() const { return calls_; }
  long total_inner_iterations() const { return inner_total_; }
  const Vector& latest_point() const { return latest_point_; }
  const std::shared_ptr<HullGeometry>& hull() const { return hull_; }

  /// The latest iterate as an active set over the hull (pruned weights).
  ActiveSet snapshot() const {
    if (!hull_) throw InputError("AccStream::snapshot: not seeded");
    std::vector<double> w(latest_lambda_.data(),
                          latest_lambda_.data() + latest_lambda_.size());
    return ActiveSet(hull_->verts, std::move(w));
  }

  std::function<void(const AccTraceRow&)> trace;

  AccEvent advance() {
    switch (phase_) {
      case Phase::idle:
      case Phase::converged:
        return AccEvent::idle;
      case Phase::l0:
        return run_l0_phase();
      case Phase::inner:
        return run_inner_unit();
    }
    return AccEvent::idle;
  }

 private:
  enum class Phase { idle, l0, inner, converged };

  // Warm-start phase of one sigma round: minimize the local model at the
  // anchor until the certificate drops below (eta0 + sigma)/32 times the
  // squared displacement of the current iterate, which fixes eps0.
  AccEvent run_l0_phase() {
    if (!anchor_foo_) {
      anchor_foo_ = eval_foo(obj_, anchor_, counters_);
    }
    const double rho0 = eta_call_base() + sigma_;
    HullSubproblem l0;
    l0.hull = hull_.get();
    l0.linear = anchor_foo_->grad;
    l0.center = anchor_;
    l0.rho = rho0;
    l0.warm_start = &lambda_anchor_;
    l0.max_iterations = cfg_.subproblem_cap;
    l0.adaptive_epsilon = [rho0, anchor = anchor_](const Vector& u) {
      return rho0 / 32.0 * (u - anchor).squaredNorm();
    };
    HullSolveResult sol = solve_hull_subproblem(l0);

    const double displacement = (sol.u - anchor_).norm();
    eps0_ = rho0 / 32.0 * displacement * displacement;
    const double mapping_norm = rho0 * displacement;
    const double floor =
        std::max(cfg_.entry_tolerance, 2e-14 * rho0 * (1.0 + anchor_.norm()));
    if (mapping_norm <= floor) {
      phase_ = Phase::converged;
      latest_point_ = anchor_;
      latest_lambda_ = lambda_anchor_;
      return AccEvent::converged;
    }

    state_ = AgdState{};
    state_.y = sol.u;
    state_.v = sol.u;
    state_.y_hat = sol.u;
    state_.lambda_y = sol.lambda;
    state_.lambda_v = sol.lambda;
    state_.lambda_yhat = sol.lambda;
    state_.z = rho0 * anchor_ - anchor_foo_->grad;
    state_.a_sum = 1.0;
    state_.eta = eta_;
    state_.sigma = sigma_;
    state_.eps0 = eps0_;
    state_.eta0 = eta_call_base();
    state_.anchor = anchor_;
    latest_point_ = sol.u;
    latest_lambda_ = sol.lambda;
    phase_ = Phase::inner;
    return AccEvent::advanced;
  }

  AccEvent run_inner_unit() {
    AgdIterOutcome outcome = agd_iter(state_, obj_, *hull_, counters_,
                                      cfg_.subproblem_cap);
    eta_ = state_.eta;
    ++inner_in_call_;
    ++inner_total_;
    latest_point_ = state_.y_hat;
    latest_lambda_ = state_.lambda_yhat;

    const double scaled = outcome.g_tilde.scaled_norm();
    if (trace) {
      trace(AccTraceRow{calls_, inner_total_, eta_, sigma_, state_.a_sum,
                        eps0_, scaled});
    }

    const bool inner_done = scaled * scaled <= 9.0 * eps0_ / 4.0;
    const bool budget_hit = inner_in_call_ >= cfg_.max_inner_per_call ||
                            state_.a_sum > 1e100;
    if (!inner_done && !budget_hit) return AccEvent::advanced;

    const double proximity = sigma_ / std::sqrt(state_.eta + sigma_) *
                             (state_.y_hat - anchor_).norm();
    if (inner_done && proximity > std::sqrt(eps0_) &&
        sigma_halvings_ < cfg_.max_sigma_halvings_per_call) {
      sigma_ /= 2.0;
      ++sigma_halvings_;
      phase_ = Phase::l0;
      return AccEvent::advanced;
    }

    // Call complete (or inner budget spent): chain the next call from here.
    ++calls_;
    anchor_ = state_.y_hat;
    lambda_anchor_ = state_.lambda_yhat;
    anchor_foo_.reset();
    inner_in_call_ = 0;
    sigma_halvings_ = 0;
    eta_call0_ = eta_;
    phase_ = Phase::l0;
    return AccEvent::call_complete;
  }

  // The call-entry smoothness estimate: fixed across the sigma rounds of one
  // call, used in the warm-start model and the momentum model's quadratic.
  double eta_call_base() const { return eta_call0_; }

  const ObjectiveOracle& obj_;
  FirstOrderCounters& counters_;
  AccConfig cfg_;

  std::shared_ptr<HullGeometry> hull_;
  Vector anchor_;
  Vector lambda_anchor_;
  std::optional<FooResult> anchor_foo_;
  Vector latest_point_;
  Vector latest_lambda_;

  AgdState state_;
  Phase phase_ = Phase::idle;
  double eta_ = 0.0;
  double eta_call0_ = 0.0;
  double sigma_ = 0.0;
  double eps0_ = 0.0;
  long calls_ = 0;
  long inner_in_call_ = 0;
  long inner_total_ = 0;
  int sigma_halvings_ = 0;
};

struct AccCallResult {
  ActiveSet output;
  double eta_out = 0.0;
  double sigma_out = 0.0;
  bool converged_entry = false;
  long inner_iterations = 0;
  std::vector<AccTraceRow> trace;
};

/// One blocking call to the accelerated procedure: runs sigma rounds until
/// both the inexact-mapping test and the sigma-proximity test pass, then
/// returns the triple (output point, eta, sigma).
inline AccCallResult acc(const ObjectiveOracle& obj, const ActiveSet& start,
                         double eta0, double sigma_in,
                         FirstOrderCounters& counters, AccConfig cfg = {}) {
  AccStream stream(obj, counters, cfg);
  stream.seed(start, nullptr, eta0, sigma_in);
  AccCallResult result;
  stream.trace = [&result](const AccTraceRow& row) {
    result.trace.push_back(row);
  };
  if (!stream.active()) {
    result.output = start;
    result.eta_out = eta0;
    result.sigma_out = sigma_in;
    result.converged_entry = true;
    return result;
  }
  while (true) {
    const AccEvent ev = stream.advance();
    if (ev == AccEvent::call_complete) {
      result.output = stream.snapshot();
      result.eta_out = stream.eta();
      result.sigma_out = stream.sigma();
      result.inner_iterations = stream.total_inner_iterations();
      return result;
    }
    if (ev == AccEvent::converged || ev == AccEvent::idle) {
      result.output = start;
      result.eta_out = stream.eta();
      result.sigma_out = stream.sigma();
      result.converged_entry = true;
      result.inner_iterations = stream.total_inner_iterations();
      return result;
    }
  }
}

struct AccRestartedResult {
  ActiveSet output;
  double final_mapping_norm = 0.0;
  double eta_out = 0.0;
  double sigma_out = 0.0;
  long calls = 0;
  bool converged = false;
  std::vector<double> mapping_norms;  // exact mapping norm after each call
};

/// Chains calls, threading (eta, sigma), until the exact gradient mapping at
/// the output (projection certificate 1e-12) has norm at most target_eps.
inline AccRestartedResult acc_restarted(const ObjectiveOracle& obj,
                                        const ActiveSet& start, double eta0,
                                        double sigma0, double target_eps,
                                        FirstOrderCounters& counters,
                                        long max_calls = 200,
                                        AccConfig cfg = {}) {
  AccRestartedResult result;
  result.output = start;
  result.eta_out = eta0;
  result.sigma_out = sigma0;
  HullGeometry hull = HullGeometry::from(start.vertices());

  for (long call = 0; call <= max_calls; ++call) {
    GradMapValue g = exact_gradient_mapping(
        obj, hull, result.output.point(), result.eta_out + result.sigma_out);
    ++counters.foo_calls;
    result.final_mapping_norm = g.norm();
    if (call > 0) result.mapping_norms.push_back(g.norm());
    if (g.norm() <= target_eps) {
      result.converged = true;
      return result;
    }
    if (call == max_calls) break;
    AccCallResult one = acc(obj, result.output, result.eta_out,
                            result.sigma_out, counters, cfg);
    result.output = one.output;
    result.eta_out = one.eta_out;
    result.sigma_out = one.sigma_out;
    ++result.calls;
    if (one.converged_entry) {
      // The hull optimum is reached at fp resolution; the mapping norm above
      // is the best this hull admits.
      result.converged = g.norm() <= target_eps;
      return result;
    }
  }
  return result;
}

}  // namespace pflacg

#endif  // PFLACG_ACC_HPP_
