#ifndef PFLACG_SIMPLEX_PROJECTION_HPP_
#define PFLACG_SIMPLEX_PROJECTION_HPP_

#include <algorithm>
#include <vector>

#include "pflacg/types.hpp"

namespace pflacg {

/// Euclidean projection onto the unit probability simplex by sort and
/// threshold, O(n log n). Output is clamped nonnegative and renormalized so
/// membership holds exactly up to a final division.
inline Vector project_to_simplex(const Vector& v) {
  const Index n = v.size();
  if (n < 1) throw InputError("project_to_simplex: empty input");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  Index support = 0;
  for (Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) {
      theta = t;
      support = j + 1;
    }
  }
  (void)support;
  Vector x(n);
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    x[i] = std::max(v[i] - theta, 0.0);
    sum += x[i];
  }
  x /= sum;
  return x;
}

}  // namespace pflacg

#endif  // PFLACG_SIMPLEX_PROJECTION_HPP_
