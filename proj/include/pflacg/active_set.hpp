#ifndef PFLACG_ACTIVE_SET_HPP_
#define PFLACG_ACTIVE_SET_HPP_

#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "pflacg/region.hpp"
#include "pflacg/types.hpp"

namespace pflacg {

/// Barycentric representation of an iterate: an ordered list of distinct
/// vertices with a probability vector of weights, plus the cached point
/// x = sum_v alpha_v v. Vertices are immutable and shared, so copying an
/// ActiveSet (for snapshots handed between workers) is cheap.
///
/// Weights below the drop tolerance are pruned and the remainder
/// renormalized after every update; floating-point drop steps otherwise
/// leave dead residues in the support.
class ActiveSet {
 public:
  static constexpr double kDropTolerance = 1e-12;

  ActiveSet() = default;

  explicit ActiveSet(std::shared_ptr<const Vertex> v) {
    verts_.push_back(std::move(v));
    weights_.push_back(1.0);
    point_ = verts_.front()->coords;
  }

  ActiveSet(std::vector<std::shared_ptr<const Vertex>> verts,
            std::vector<double> weights)
      : verts_(std::move(verts)), weights_(std::move(weights)) {
    if (verts_.size() != weights_.size() || verts_.empty()) {
      throw InputError("ActiveSet: vertex/weight size mismatch");
    }
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      for (std::size_t j = i + 1; j < verts_.size(); ++j) {
        if (verts_[i]->id == verts_[j]->id) {
          throw InputError("ActiveSet: duplicate vertex");
        }
      }
    }
    prune_and_normalize();
  }

  std::size_t size() const { return verts_.size(); }
  Index dim() const { return point_.size(); }
  const Vector& point() const { return point_; }
  const std::vector<std::shared_ptr<const Vertex>>& vertices() const {
    return verts_;
  }
  const std::vector<double>& weights() const { return weights_; }

  /// Index of a vertex id in the support, or -1.
  int find(std::uint64_t id) const {
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      if (verts_[i]->id == id) return static_cast<int>(i);
    }
    return -1;
  }

  /// x <- (1 - lambda) x + lambda v. A full step (lambda = 1) collapses the
  /// support to {v}.
  void move_toward(const std::shared_ptr<const Vertex>& v, double lambda) {
    if (lambda < 0.0 || lambda > 1.0 + 1e-12) {
      throw InputError("ActiveSet::move_toward: lambda outside [0, 1]");
    }
    if (lambda >= 1.0) {
      verts_.assign(1, v);
      weights_.assign(1, 1.0);
      point_ = v->coords;
      return;
    }
    for (auto& w : weights_) w *= (1.0 - lambda);
    const int pos = find(v->id);
    if (pos >= 0) {
      weights_[pos] += lambda;
    } else {
      verts_.push_back(v);
      weights_.push_back(lambda);
    }
    prune_and_normalize();
  }

  /// x <- x + lambda (x - s) for s in the support; lambda is capped at
  /// alpha_s / (1 - alpha_s), and hitting the cap drops s entirely.
  void move_away_from(const std::shared_ptr<const Vertex>& s, double lambda) {
    const int pos = find(s->id);
    if (pos < 0) throw InputError("ActiveSet::move_away_from: s not in support");
    if (lambda < 0.0) throw InputError("ActiveSet::move_away_from: lambda < 0");
    const double alpha = weights_[pos];
    const double lambda_max =
        alpha >= 1.0 ? std::numeric_limits<double>::infinity()
                     : alpha / (1.0 - alpha);
    if (lambda > lambda_max + 1e-12) {
      throw InputError("ActiveSet::move_away_from: lambda exceeds lambda_max");
    }
    for (auto& w : weights_) w *= (1.0 + lambda);
    weights_[pos] -= lambda;
    if (weights_[pos] < 0.0) weights_[pos] = 0.0;
    prune_and_normalize();
  }

  /// Pairwise transfer of lambda <= alpha_s of mass from s onto v.
  void move_mass(const std::shared_ptr<const Vertex>& from,
                 const std::shared_ptr<const Vertex>& to, double lambda) {
    const int pos = find(from->id);
    if (pos < 0) throw InputError("ActiveSet::move_mass: source not in support");
    if (lambda < 0.0 || lambda > weights_[pos] + 1e-12) {
      throw InputError("ActiveSet::move_mass: lambda exceeds source weight");
    }
    lambda = std::min(lambda, weights_[pos]);
    weights_[pos] -= lambda;
    const int tpos = find(to->id);
    if (tpos >= 0) {
      weights_[tpos] += lambda;
    } else {
      verts_.push_back(to);
      weights_.push_back(lambda);
    }
    prune_and_normalize();
  }

  /// Max weight discrepancy diagnostics used by tests.
  double cache_residual() const {
    Vector acc = Vector::Zero(point_.size());
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      acc += weights_[i] * verts_[i]->coords;
    }
    return (acc - point_).norm();
  }

 private:
  void prune_and_normalize() {
    std::vector<std::shared_ptr<const Vertex>> verts;
    std::vector<double> weights;
    verts.reserve(verts_.size());
    weights.reserve(weights_.size());
    double sum = 0.0;
    double max_w = 0.0;
    std::size_t max_at = 0;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      if (weights_[i] > max_w) {
        max_w = weights_[i];
        max_at = i;
      }
    }
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      if (weights_[i] < kDropTolerance && i != max_at) continue;
      verts.push_back(std::move(verts_[i]));
      weights.push_back(weights_[i]);
      sum += weights.back();
    }
    for (auto& w : weights) w /= sum;
    verts_ = std::move(verts);
    weights_ = std::move(weights);
    recompute_point();
  }

  void recompute_point() {
    point_ = Vector::Zero(verts_.front()->coords.size());
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      point_ += weights_[i] * verts_[i]->coords;
    }
  }

  std::vector<std::shared_ptr<const Vertex>> verts_;
  std::vector<double> weights_;
  Vector point_;
};

/// Functional forms of the step updates; each returns a fresh snapshot.
inline ActiveSet apply_fw_step(const ActiveSet& s,
                               const std::shared_ptr<const Vertex>& v,
                               double lambda) {
  ActiveSet out = s;
  out.move_toward(v, lambda);
  return out;
}

inline ActiveSet apply_away_step(const ActiveSet& s,
                                 const std::shared_ptr<const Vertex>& away,
                                 double lambda) {
  ActiveSet out = s;
  out.move_away_from(away, lambda);
  return out;
}

inline ActiveSet apply_pairwise_step(const ActiveSet& s,
                                     const std::shared_ptr<const Vertex>& from,
                                     const std::shared_ptr<const Vertex>& to,
                                     double lambda) {
  ActiveSet out = s;
  out.move_mass(from, to, lambda);
  return out;
}

}  // namespace pflacg

#endif  // PFLACG_ACTIVE_SET_HPP_
