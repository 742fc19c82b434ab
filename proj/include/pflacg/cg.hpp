#ifndef PFLACG_CG_HPP_
#define PFLACG_CG_HPP_

#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "pflacg/active_set.hpp"
#include "pflacg/line_search.hpp"
#include "pflacg/wolfe_gap.hpp"

namespace pflacg {

enum class StepKind { fw, away, pairwise, none };

struct StepChoice {
  StepKind kind = StepKind::none;
  Vector direction;
  double lambda_max = 0.0;
  double slope = 0.0;  // <grad, direction>, reused by the line search
  std::shared_ptr<const Vertex> fw_vertex;
  std::shared_ptr<const Vertex> away_vertex;
};

/// Away-step selection: the FW direction wins whenever its descent product
/// dominates (ties go to FW); otherwise the away direction with
/// lambda_max = alpha_s / (1 - alpha_s).
inline StepChoice select_afw_step(const ActiveSet& s, const WolfeGapInfo& gap) {
  StepChoice choice;
  choice.fw_vertex = gap.fw_vertex;
  choice.away_vertex = gap.away_vertex;
  const Vector& x = s.point();
  const double fw_descent = gap.grad.dot(x - gap.fw_vertex->coords);
  const double away_descent = gap.grad.dot(gap.away_vertex->coords - x);
  if (fw_descent >= away_descent) {
    choice.kind = StepKind::fw;
    choice.direction = gap.fw_vertex->coords - x;
    choice.lambda_max = 1.0;
    choice.slope = -fw_descent;
  } else {
    choice.kind = StepKind::away;
    choice.direction = x - gap.away_vertex->coords;
    const double alpha = s.weights()[gap.away_index];
    choice.lambda_max = alpha >= 1.0 ? std::numeric_limits<double>::infinity()
                                     : alpha / (1.0 - alpha);
    choice.slope = -away_descent;
  }
  return choice;
}

/// Pairwise selection: mass moves straight from the away vertex to the FW
/// vertex, capped by the away weight.
inline StepChoice select_pfw_step(const ActiveSet& s, const WolfeGapInfo& gap) {
  StepChoice choice;
  choice.fw_vertex = gap.fw_vertex;
  choice.away_vertex = gap.away_vertex;
  if (gap.fw_vertex->id == gap.away_vertex->id) {
    choice.kind = StepKind::none;
    choice.direction = Vector::Zero(s.dim());
    return choice;
  }
  choice.kind = StepKind::pairwise;
  choice.direction = gap.fw_vertex->coords - gap.away_vertex->coords;
  choice.lambda_max = s.weights()[gap.away_index];
  choice.slope = gap.grad.dot(choice.direction);
  return choice;
}

enum class CgVariant { afw, pfw, lazy_afw };

inline const char* to_string(CgVariant v) {
  switch (v) {
    case CgVariant::afw: return "afw";
    case CgVariant::pfw: return "pfw";
    case CgVariant::lazy_afw: return "lazy-afw";
  }
  return "?";
}

/// A single conditional-gradient run: owns its active set, the cached gap
/// information, and for the lazified variant the vertex cache and threshold.
/// One step() performs one iteration at the cost of one FOO plus at most one
/// LMO. Shared oracles are only read; counters are owned by the caller.
class CgStream {
 public:
  CgStream(const ObjectiveOracle& obj, const FeasibleRegion& region,
           ActiveSet start, CgVariant variant, FirstOrderCounters& counters)
      : obj_(obj),
        region_(region),
        set_(std::move(start)),
        variant_(variant),
        counters_(counters) {
    gap_ = strong_wolfe_gap(obj_, region_, set_, counters_);
    if (variant_ == CgVariant::lazy_afw) {
      phi_ = gap_.w / 2.0;
      bound_ = gap_.w;
    }
  }

  const ActiveSet& active() const { return set_; }
  const WolfeGapInfo& gap() const { return gap_; }
  double f_value() const { return gap_.f_value; }
  long iteration() const { return iteration_; }
  CgVariant variant() const { return variant_; }

  /// Current optimality measure: the strong Wolfe gap, or for the lazified
  /// variant the certified upper bound maintained through threshold halving.
  double w() const { return variant_ == CgVariant::lazy_afw ? bound_ : gap_.w; }

  /// One iteration. Returns false when stationary (w <= 0 up to rounding),
  /// in which case nothing moved and the iteration is not counted.
  bool step() {
    if (variant_ == CgVariant::lazy_afw) {
      ++iteration_;
      return lazy_step();
    }
    if (gap_.w <= 0.0) return false;
    ++iteration_;
    const StepChoice choice = variant_ == CgVariant::afw
                                  ? select_afw_step(set_, gap_)
                                  : select_pfw_step(set_, gap_);
    apply(choice);
    gap_ = strong_wolfe_gap(obj_, region_, set_, counters_);
    return true;
  }

  /// Adopt a snapshot taken from another stream and refresh the gap data.
  void reseed(ActiveSet snapshot) {
    set_ = std::move(snapshot);
    gap_ = strong_wolfe_gap(obj_, region_, set_, counters_);
    if (variant_ == CgVariant::lazy_afw) {
      bound_ = gap_.w;
      phi_ = gap_.w / 2.0;
    }
  }

  /// Force a fresh strong-Wolfe-gap evaluation (used by the coupling when the
  /// lazified bound is not enough).
  const WolfeGapInfo& refresh_gap() {
    gap_ = strong_wolfe_gap(obj_, region_, set_, counters_);
    if (variant_ == CgVariant::lazy_afw) bound_ = std::min(bound_, gap_.w);
    return gap_;
  }

  std::size_t cache_size() const { return cache_.size(); }
  double lazy_threshold() const { return phi_; }

 private:
  void apply(const StepChoice& choice) {
    if (choice.kind == StepKind::none || choice.lambda_max <= 0.0) return;
    const double lambda = line_search(obj_, set_.point(), choice.direction,
                                      choice.lambda_max, choice.slope,
                                      counters_);
    if (lambda <= 0.0) return;
    switch (choice.kind) {
      case StepKind::fw:
        set_.move_toward(choice.fw_vertex, lambda);
        break;
      case StepKind::away:
        set_.move_away_from(choice.away_vertex, lambda);
        break;
      case StepKind::pairwise:
        set_.move_mass(choice.away_vertex, choice.fw_vertex, lambda);
        break;
      case StepKind::none:
        break;
    }
  }

  // Simplified lazification: consult the vertex cache and the active set
  // against the threshold phi before paying for an LMO; when both the cache
  // and a fresh LMO fall short, the sum of descents certifies w < 2 phi and
  // phi halves without a step.
  bool lazy_step() {
    FooResult foo = eval_foo(obj_, set_.point(), counters_);
    gap_.grad = std::move(foo.grad);
    gap_.f_value = foo.value;
    const Vector& g = gap_.grad;
    const Vector& x = set_.point();
    const double gx = g.dot(x);

    double away_val = -std::numeric_limits<double>::infinity();
    int away_index = -1;
    for (std::size_t i = 0; i < set_.size(); ++i) {
      const double val = g.dot(set_.vertices()[i]->coords);
      if (val > away_val) {
        away_val = val;
        away_index = static_cast<int>(i);
      }
    }
    const double away_descent = away_val - gx;
    gap_.away_vertex = set_.vertices()[away_index];
    gap_.away_index = away_index;

    double cached_descent = -std::numeric_limits<double>::infinity();
    std::shared_ptr<const Vertex> cached;
    for (const auto& v : cache_) {
      const double descent = gx - g.dot(v->coords);
      if (descent > cached_descent) {
        cached_descent = descent;
        cached = v;
      }
    }

    std::shared_ptr<const Vertex> fw;
    double fw_descent = cached_descent;
    if (cached_descent < phi_ && away_descent < phi_) {
      fw = eval_lmo(region_, g, counters_);
      cache_.push_back(fw);
      fw_descent = gx - g.dot(fw->coords);
      if (fw_descent < phi_) {
        // Certified: w = fw descent + away descent < 2 phi.
        bound_ = std::min(bound_, fw_descent + away_descent);
        phi_ /= 2.0;
        gap_.fw_vertex = fw;
        gap_.w = fw_descent + away_descent;
        return true;
      }
    } else {
      fw = cached;
    }
    gap_.fw_vertex = fw;

    StepChoice choice;
    choice.fw_vertex = fw;
    choice.away_vertex = gap_.away_vertex;
    if (fw_descent >= away_descent) {
      choice.kind = StepKind::fw;
      choice.direction = fw->coords - x;
      choice.lambda_max = 1.0;
      choice.slope = -fw_descent;
    } else {
      choice.kind = StepKind::away;
      choice.direction = x - gap_.away_vertex->coords;
      const double alpha = set_.weights()[away_index];
      choice.lambda_max = alpha >= 1.0
                              ? std::numeric_limits<double>::infinity()
                              : alpha / (1.0 - alpha);
      choice.slope = -away_descent;
    }
    apply(choice);
    return true;
  }

  const ObjectiveOracle& obj_;
  const FeasibleRegion& region_;
  ActiveSet set_;
  CgVariant variant_;
  FirstOrderCounters& counters_;
  WolfeGapInfo gap_;
  long iteration_ = 0;

  // Lazified-variant state.
  std::vector<std::shared_ptr<const Vertex>> cache_;
  double phi_ = 0.0;
  double bound_ = 0.0;
};

struct RunBudget {
  long max_iterations = 1000000;
  double max_seconds = std::numeric_limits<double>::infinity();
};

struct CgTraceEvent {
  long iteration = 0;
  double f_value = 0.0;
  double w = 0.0;
  std::size_t support_size = 0;
  bool epoch_end = false;
  long epoch = 0;
};
using CgTraceFn = std::function<void(const CgTraceEvent&)>;

struct EpochMark {
  long epoch = 0;
  long iteration = 0;
  double w = 0.0;
};

struct CgRunResult {
  ActiveSet final_set;
  double final_w = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<EpochMark> epochs;
};

/// One halving epoch of the away-step loop: iterate until w(x_k, S_k) drops
/// to half its entry value or the budget runs out. A zero entry gap returns
/// immediately.
inline CgRunResult afw_run(const ObjectiveOracle& obj,
                           const FeasibleRegion& region, ActiveSet start,
                           const RunBudget& budget,
                           FirstOrderCounters& counters,
                           const CgTraceFn& trace = {}) {
  CgStream stream(obj, region, std::move(start), CgVariant::afw, counters);
  const double w0 = stream.w();
  const auto t0 = std::chrono::steady_clock::now();
  bool halved = w0 <= 0.0;
  while (!halved && stream.iteration() < budget.max_iterations) {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    if (elapsed > budget.max_seconds) break;
    if (!stream.step()) break;
    halved = stream.w() <= w0 / 2.0;
    if (trace) {
      trace(CgTraceEvent{stream.iteration(), stream.f_value(), stream.w(),
                         stream.active().size(), halved, 0});
    }
  }
  CgRunResult result;
  result.final_set = stream.active();
  result.final_w = stream.w();
  result.iterations = stream.iteration();
  result.converged = halved;
  return result;
}

/// Restarted conditional-gradient run: halving epochs chained until the gap
/// (or, for the lazified variant, its certified bound) reaches epsilon.
inline CgRunResult run_cg(const ObjectiveOracle& obj,
                          const FeasibleRegion& region, ActiveSet start,
                          CgVariant variant, double epsilon,
                          const RunBudget& budget,
                          FirstOrderCounters& counters,
                          const CgTraceFn& trace = {}) {
  CgStream stream(obj, region, std::move(start), variant, counters);
  CgRunResult result;
  const auto t0 = std::chrono::steady_clock::now();
  double epoch_w = stream.w();
  long epoch = 0;
  if (trace) {
    trace(CgTraceEvent{0, stream.f_value(), stream.w(), stream.active().size(),
                       false, 0});
  }
  while (stream.w() > epsilon && stream.iteration() < budget.max_iterations) {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    if (elapsed > budget.max_seconds) break;
    if (!stream.step()) break;
    bool epoch_end = false;
    if (stream.w() <= epoch_w / 2.0) {
      ++epoch;
      epoch_end = true;
      result.epochs.push_back(EpochMark{epoch, stream.iteration(), stream.w()});
      epoch_w = stream.w();
    }
    if (trace) {
      trace(CgTraceEvent{stream.iteration(), stream.f_value(), stream.w(),
                         stream.active().size(), epoch_end, epoch});
    }
  }
  result.final_set = stream.active();
  result.final_w = stream.w();
  result.iterations = stream.iteration();
  result.converged = stream.w() <= epsilon;
  return result;
}

}  // namespace pflacg

#endif  // PFLACG_CG_HPP_
