#ifndef PFLACG_WOLFE_GAP_HPP_
#define PFLACG_WOLFE_GAP_HPP_

#include <memory>

#include "pflacg/active_set.hpp"
#include "pflacg/objective.hpp"
#include "pflacg/region.hpp"

namespace pflacg {

/// Everything one strong-Wolfe-gap evaluation yields: the gap itself, the
/// Frank-Wolfe and away vertices it was computed from, and the gradient and
/// objective value at the iterate (one FOO plus one LMO). CG iterations
/// reuse all of it, so they cost exactly one oracle query of each kind.
struct WolfeGapInfo {
  double w = 0.0;
  std::shared_ptr<const Vertex> fw_vertex;
  std::shared_ptr<const Vertex> away_vertex;
  int away_index = -1;  // position of the away vertex in the support
  Vector grad;
  double f_value = 0.0;
};

/// w(x, S) = max_{y in S, z in X} <grad f(x), y - z>. The away vertex is the
/// support maximizer of <grad, .> (ties toward the earliest support entry),
/// the FW vertex is the LMO answer.
inline WolfeGapInfo strong_wolfe_gap(const ObjectiveOracle& obj,
                                     const FeasibleRegion& region,
                                     const ActiveSet& s,
                                     FirstOrderCounters& counters) {
  if (s.size() == 0) throw InputError("strong_wolfe_gap: empty active set");
  WolfeGapInfo info;
  FooResult foo = eval_foo(obj, s.point(), counters);
  info.f_value = foo.value;
  info.grad = std::move(foo.grad);

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double val = info.grad.dot(s.vertices()[i]->coords);
    if (val > best) {
      best = val;
      info.away_index = static_cast<int>(i);
    }
  }
  info.away_vertex = s.vertices()[info.away_index];
  info.fw_vertex = eval_lmo(region, info.grad, counters);
  info.w = best - info.grad.dot(info.fw_vertex->coords);
  return info;
}

}  // namespace pflacg

#endif  // PFLACG_WOLFE_GAP_HPP_
