#ifndef PFLACG_PROBLEM_GEN_HPP_
#define PFLACG_PROBLEM_GEN_HPP_

#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "pflacg/hpolytope.hpp"
#include "pflacg/objective.hpp"
#include "pflacg/region.hpp"
#include "pflacg/rng.hpp"

namespace pflacg {

enum class ProblemKind { simplex, structured_lasso, constrained_birkhoff, custom };

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::simplex: return "simplex";
    case ProblemKind::structured_lasso: return "structured-lasso";
    case ProblemKind::constrained_birkhoff: return "constrained-birkhoff";
    case ProblemKind::custom: return "custom";
  }
  return "?";
}

inline ProblemKind problem_kind_from(const std::string& s) {
  if (s == "simplex") return ProblemKind::simplex;
  if (s == "structured-lasso") return ProblemKind::structured_lasso;
  if (s == "constrained-birkhoff") return ProblemKind::constrained_birkhoff;
  if (s == "custom") return ProblemKind::custom;
  throw InputError("unknown problem kind: " + s);
}

/// Everything needed to regenerate an experiment instance bit-identically:
/// the family, dimensions, the strong-convexity shift alpha, the RNG seed,
/// and the per-family extras. The objective is always
/// f(x) = x'(M'M + alpha I)x/2 + b'x with M, b drawn uniformly; the b range
/// is [0, 100] for the lasso family and [0, 1] otherwise.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::simplex;
  Index n = 2;
  double alpha = 1.0;
  std::uint64_t seed = 0;

  double tau = 1.0;        // lasso: l1 radius
  Index pair_count = 0;    // lasso: merged coordinate pairs
  Index zero_count = 0;    // birkhoff: cells fixed to zero
  Index cap_count = 0;     // birkhoff: capped cells
  double cap_value = 0.5;  // birkhoff: cap
  double max_eig = 1e5;    // birkhoff: target top eigenvalue of M'M

  std::string label() const {
    return std::string(to_string(kind)) + "-n" + std::to_string(n) + "-s" +
           std::to_string(seed);
  }
};

struct Experiment {
  std::shared_ptr<QuadraticObjective> objective;
  std::shared_ptr<FeasibleRegion> region;
  std::shared_ptr<const Vertex> start;
  std::string description;
};

namespace detail {

// Fixed 100-round power iteration; deterministic for a given matrix.
inline double top_eigenvalue(const Matrix& m) {
  Vector x = Vector::Ones(m.rows());
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector y = m * x;
    const double norm = y.norm();
    if (norm <= 0.0) return 0.0;
    x = y / norm;
    est = x.dot(m * x);
  }
  return est;
}

}  // namespace detail

/// Deterministic experiment generation. The RNG stream is consumed in a
/// fixed order: M row by row, then b, then the family extras (merged pairs
/// or zero/cap cells), then the start-vertex direction; identical specs
/// therefore yield bit-identical instances.
inline Experiment generate_experiment(const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::custom) {
    throw InputError(
        "generate_experiment: custom problems are constructed directly");
  }
  if (spec.n < 2) throw InputError("generate_experiment: n must be >= 2");
  if (spec.alpha <= 0) throw InputError("generate_experiment: alpha must be > 0");

  const Index n = spec.n;
  Rng rng(spec.seed);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = rng.uniform();
  }
  const double b_hi =
      spec.kind == ProblemKind::structured_lasso ? 100.0 : 1.0;
  Vector b(n);
  for (Index i = 0; i < n; ++i) b[i] = rng.uniform(0.0, b_hi);

  Matrix q = m.transpose() * m;
  if (spec.kind == ProblemKind::constrained_birkhoff) {
    const double top = detail::top_eigenvalue(q);
    if (top > 0) q *= spec.max_eig / top;
  }
  q += spec.alpha * Matrix::Identity(n, n);
  // Symmetrize the product exactly; A'A in floating point is symmetric only
  // up to rounding and the objective constructor checks it.
  q = ((q + q.transpose()) / 2.0).eval();
  auto objective = std::make_shared<QuadraticObjective>(std::move(q), std::move(b));

  std::shared_ptr<FeasibleRegion> region;
  switch (spec.kind) {
    case ProblemKind::simplex:
      region = std::make_shared<SimplexRegion>(n);
      break;
    case ProblemKind::structured_lasso: {
      const Index pairs = spec.pair_count;
      if (2 * pairs > n) {
        throw InputError("generate_experiment: too many merged pairs");
      }
      auto picked = rng.sample_distinct(static_cast<std::size_t>(n),
                                        static_cast<std::size_t>(2 * pairs));
      std::vector<int> group_of(static_cast<std::size_t>(n), -1);
      for (Index p = 0; p < pairs; ++p) {
        group_of[picked[2 * p]] = static_cast<int>(p);
        group_of[picked[2 * p + 1]] = static_cast<int>(p);
      }
      int next = static_cast<int>(pairs);
      for (auto& g : group_of) {
        if (g < 0) g = next++;
      }
      region = std::make_shared<MergedL1Ball>(std::move(group_of), spec.tau);
      break;
    }
    case ProblemKind::constrained_birkhoff: {
      const auto side = static_cast<Index>(std::llround(std::sqrt(double(n))));
      if (side * side != n) {
        throw InputError("generate_experiment: birkhoff needs a square n");
      }
      auto picked = rng.sample_distinct(
          static_cast<std::size_t>(n),
          static_cast<std::size_t>(spec.zero_count + spec.cap_count));
      std::vector<Index> zeros, caps;
      for (Index i = 0; i < spec.zero_count; ++i) {
        zeros.push_back(static_cast<Index>(picked[i]));
      }
      for (Index i = 0; i < spec.cap_count; ++i) {
        caps.push_back(static_cast<Index>(picked[spec.zero_count + i]));
      }
      region = std::make_shared<HPolytope>(
          make_birkhoff_region(side, zeros, caps, spec.cap_value));
      break;
    }
    case ProblemKind::custom:
      break;  // unreachable
  }

  Vector direction(n);
  for (Index i = 0; i < n; ++i) direction[i] = rng.uniform(-1.0, 1.0);
  Experiment exp;
  exp.start = region->lmo(direction);
  exp.objective = std::move(objective);
  exp.region = std::move(region);
  exp.description = spec.label() + " over " + exp.region->description();
  return exp;
}

/// Key-value (de)serialization of a ProblemSpec; the run-config file embeds
/// these keys directly.
inline void problem_spec_to_map(const ProblemSpec& spec,
                                std::map<std::string, std::string>& kv) {
  kv["kind"] = to_string(spec.kind);
  kv["n"] = std::to_string(spec.n);
  kv["alpha"] = std::to_string(spec.alpha);
  kv["seed"] = std::to_string(spec.seed);
  kv["tau"] = std::to_string(spec.tau);
  kv["pairs"] = std::to_string(spec.pair_count);
  kv["zeros"] = std::to_string(spec.zero_count);
  kv["caps"] = std::to_string(spec.cap_count);
  kv["cap_value"] = std::to_string(spec.cap_value);
  kv["max_eig"] = std::to_string(spec.max_eig);
}

inline ProblemSpec problem_spec_from_map(
    const std::map<std::string, std::string>& kv) {
  ProblemSpec spec;
  auto get = [&kv](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("kind")) spec.kind = problem_kind_from(*v);
  if (auto* v = get("n")) spec.n = std::stol(*v);
  if (auto* v = get("alpha")) spec.alpha = std::stod(*v);
  if (auto* v = get("seed")) spec.seed = std::stoull(*v);
  if (auto* v = get("tau")) spec.tau = std::stod(*v);
  if (auto* v = get("pairs")) spec.pair_count = std::stol(*v);
  if (auto* v = get("zeros")) spec.zero_count = std::stol(*v);
  if (auto* v = get("caps")) spec.cap_count = std::stol(*v);
  if (auto* v = get("cap_value")) spec.cap_value = std::stod(*v);
  if (auto* v = get("max_eig")) spec.max_eig = std::stod(*v);
  return spec;
}

}  // namespace pflacg

#endif  // PFLACG_PROBLEM_GEN_HPP_
