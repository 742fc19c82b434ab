#ifndef PFLACG_LINE_SEARCH_HPP_
#define PFLACG_LINE_SEARCH_HPP_

#include <algorithm>
#include <cmath>

#include "pflacg/objective.hpp"

namespace pflacg {

/// Step size minimizing f(x + lambda d) over [0, lambda_max].
///
/// With a curvature oracle (quadratics) the minimizer is closed form:
/// clamp(-slope / curvature). Zero curvature with a negative slope means the
/// objective decreases linearly along d, so the full step is taken. Without
/// curvature the search falls back to golden-section to an interval width of
/// 1e-10 * lambda_max; its value queries are charged to the FOO counter.
inline double line_search(const ObjectiveOracle& obj, const Vector& x,
                          const Vector& d, double lambda_max, double slope,
                          FirstOrderCounters& counters) {
  if (lambda_max <= 0.0) return 0.0;
  if (slope >= 0.0) return 0.0;

  if (auto curvature = obj.curvature_along(x, d)) {
    if (*curvature <= 0.0) return lambda_max;
    return std::clamp(-slope / *curvature, 0.0, lambda_max);
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = lambda_max;
  double m1 = hi - inv_phi * (hi - lo);
  double m2 = lo + inv_phi * (hi - lo);
  auto eval = [&](double t) {
    ++counters.foo_calls;
    return obj.value(x + t * d);
  };
  double f1 = eval(m1);
  double f2 = eval(m2);
  while (hi - lo > 1e-10 * lambda_max) {
    if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - inv_phi * (hi - lo);
      f1 = eval(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + inv_phi * (hi - lo);
      f2 = eval(m2);
    }
  }
  return 0.5 * (lo + hi);
}

inline double line_search(const ObjectiveOracle& obj, const Vector& x,
                          const Vector& d, double lambda_max,
                          FirstOrderCounters& counters) {
  ++counters.foo_calls;
  const double slope = obj.gradient(x).dot(d);
  return line_search(obj, x, d, lambda_max, slope, counters);
}

}  // namespace pflacg

#endif  // PFLACG_LINE_SEARCH_HPP_
