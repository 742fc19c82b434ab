#ifndef PFLACG_GRADIENT_MAPPING_HPP_
#define PFLACG_GRADIENT_MAPPING_HPP_

#include "pflacg/hull_subproblem.hpp"
#include "pflacg/objective.hpp"

namespace pflacg {

enum class MappingExactness { exact, inexact };

/// G_rho(x) = rho (x - P_C(x - grad f(x) / rho)) over C = conv(S), or its
/// inexact counterpart formed from an approximate model minimizer.
struct GradMapValue {
  Vector g;
  double eta_plus_sigma = 0.0;
  MappingExactness exactness = MappingExactness::exact;
  double eps_ell = 0.0;  // model accuracy for the inexact variant

  double norm() const { return g.norm(); }
  /// The scale-free quantity the accelerated loops contract: ||G|| / sqrt(rho).
  double scaled_norm() const { return g.norm() / std::sqrt(eta_plus_sigma); }
};

/// Exact gradient mapping of `obj` over the hull, with the projection solved
/// to the given additive certificate (default 1e-12). Used for halting checks
/// and tests, never inside the accelerated iteration itself.
inline GradMapValue exact_gradient_mapping(const ObjectiveOracle& obj,
                                           const HullGeometry& hull,
                                           const Vector& x, double rho,
                                           double certificate = 1e-12,
                                           const Vector* warm = nullptr) {
  if (rho <= 0) throw InputError("exact_gradient_mapping: rho must be > 0");
  const Vector target = x - obj.gradient(x) / rho;
  HullSolveResult proj = project_to_hull(hull, target, certificate, warm);
  GradMapValue out;
  out.g = rho * (x - proj.u);
  out.eta_plus_sigma = rho;
  out.exactness = MappingExactness::exact;
  return out;
}

}  // namespace pflacg

#endif  // PFLACG_GRADIENT_MAPPING_HPP_
