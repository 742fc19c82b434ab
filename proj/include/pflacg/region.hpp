#ifndef PFLACG_REGION_HPP_
#define PFLACG_REGION_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pflacg/types.hpp"

namespace pflacg {

/// A polytope vertex: coordinates plus a stable identity key derived from the
/// coordinates quantized at 1e-10. The key lets active sets deduplicate LP
/// answers that differ only by solver rounding noise.
struct Vertex {
  std::uint64_t id = 0;
  Vector coords;
};

inline std::uint64_t vertex_id_of(const Vector& coords) {
  // FNV-1a over the quantized coordinates.
  std::uint64_t h = 1469598103934665603ULL;
  for (Index i = 0; i < coords.size(); ++i) {
    const auto q = static_cast<std::int64_t>(std::llround(coords[i] * 1e10));
    auto bytes = static_cast<std::uint64_t>(q);
    for (int b = 0; b < 8; ++b) {
      h ^= (bytes >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

inline std::shared_ptr<const Vertex> make_vertex(Vector coords) {
  auto v = std::make_shared<Vertex>();
  v->coords = std::move(coords);
  v->id = vertex_id_of(v->coords);
  return v;
}

/// Linear minimization oracle over a polytope. Answers are genuine vertices.
/// Regions are immutable and safe for concurrent lmo() calls.
class FeasibleRegion {
 public:
  virtual ~FeasibleRegion() = default;

  virtual Index dim() const = 0;
  virtual std::shared_ptr<const Vertex> lmo(const Vector& direction) const = 0;
  virtual bool contains(const Vector& x, double tol) const = 0;
  virtual std::string description() const = 0;
};

/// One LMO query with call accounting.
inline std::shared_ptr<const Vertex> eval_lmo(const FeasibleRegion& region,
                                              const Vector& direction,
                                              FirstOrderCounters& counters) {
  ++counters.lmo_calls;
  return region.lmo(direction);
}

/// The unit probability simplex. lmo(c) = e_i with i = argmin_j c_j,
/// ties broken toward the smallest index.
class SimplexRegion : public FeasibleRegion {
 public:
  explicit SimplexRegion(Index n) : n_(n) {
    if (n < 1) throw InputError("SimplexRegion: dimension must be >= 1");
  }

  Index dim() const override { return n_; }

  std::shared_ptr<const Vertex> lmo(const Vector& c) const override {
    check_dim(c.size(), n_, "SimplexRegion::lmo");
    Index best = 0;
    for (Index i = 1; i < n_; ++i) {
      if (c[i] < c[best]) best = i;
    }
    Vector v = Vector::Zero(n_);
    v[best] = 1.0;
    return make_vertex(std::move(v));
  }

  bool contains(const Vector& x, double tol) const override {
    if (x.size() != n_) return false;
    if (x.minCoeff() < -tol) return false;
    return std::abs(x.sum() - 1.0) <= tol;
  }

  std::string description() const override {
    return "simplex(n=" + std::to_string(n_) + ")";
  }

 private:
  Index n_;
};

/// Intersection of the l1 ball of radius tau with coordinate-merging equality
/// constraints x_i = x_j. Merging turns the region into a weighted l1 ball in
/// group space, whose LMO is closed form: score each group by |sum of c over
/// the group| / multiplicity and load the winning group at -sign * tau / w.
class MergedL1Ball : public FeasibleRegion {
 public:
  /// group_of[i] = index of the group ambient coordinate i belongs to.
  /// Groups must be numbered 0..G-1 with every index used.
  MergedL1Ball(std::vector<int> group_of, double tau)
      : group_of_(std::move(group_of)), tau_(tau) {
    if (tau_ <= 0) throw InputError("MergedL1Ball: tau must be positive");
    int groups = 0;
    for (int g : group_of_) {
      if (g < 0) throw InputError("MergedL1Ball: negative group index");
      groups = std::max(groups, g + 1);
    }
    members_.resize(groups);
    for (std::size_t i = 0; i < group_of_.size(); ++i) {
      members_[group_of_[i]].push_back(static_cast<Index>(i));
    }
    for (const auto& m : members_) {
      if (m.empty()) throw InputError("MergedL1Ball: empty group");
    }
  }

  Index dim() const override { return static_cast<Index>(group_of_.size()); }
  std::size_t group_count() const { return members_.size(); }
  double radius() const { return tau_; }
  const std::vector<Index>& group_members(std::size_t g) const {
    return members_[g];
  }

  std::shared_ptr<const Vertex> lmo(const Vector& c) const override {
    check_dim(c.size(), dim(), "MergedL1Ball::lmo");
    std::size_t best = 0;
    double best_score = -1.0;
    double best_sum = 0.0;
    for (std::size_t g = 0; g < members_.size(); ++g) {
      double s = 0.0;
      for (Index i : members_[g]) s += c[i];
      const double score = std::abs(s) / static_cast<double>(members_[g].size());
      if (score > best_score) {
        best_score = score;
        best_sum = s;
        best = g;
      }
    }
    Vector v = Vector::Zero(dim());
    const double w = static_cast<double>(members_[best].size());
    // All-zero direction keeps the documented default: group 0, +tau/w0.
    const double sign = best_sum > 0 ? -1.0 : 1.0;
    for (Index i : members_[best]) v[i] = sign * tau_ / w;
    return make_vertex(std::move(v));
  }

  bool contains(const Vector& x, double tol) const override {
    if (x.size() != dim()) return false;
    double weighted_l1 = 0.0;
    for (const auto& m : members_) {
      const double rep = x[m[0]];
      for (Index i : m) {
        if (std::abs(x[i] - rep) > tol) return false;
      }
      weighted_l1 += static_cast<double>(m.size()) * std::abs(rep);
    }
    return weighted_l1 <= tau_ + tol;
  }

  std::string description() const override {
    return "merged-l1(n=" + std::to_string(dim()) +
           ", groups=" + std::to_string(members_.size()) +
           ", tau=" + std::to_string(tau_) + ")";
  }

 private:
  std::vector<int> group_of_;
  double tau_;
  std::vector<std::vector<Index>> members_;
};

}  // namespace pflacg

#endif  // PFLACG_REGION_HPP_
