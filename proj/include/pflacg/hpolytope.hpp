#ifndef PFLACG_HPOLYTOPE_HPP_
#define PFLACG_HPOLYTOPE_HPP_

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pflacg/lp.hpp"
#include "pflacg/region.hpp"

namespace pflacg {

namespace detail {

inline std::string render_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace detail

/// Polytope in halfspace form: A_ub x <= b_ub, A_eq x = b_eq, lb <= x <= ub.
/// Feasibility is certified at construction by one phase-1 LP solve, so a
/// constructed region is always a usable LMO.
class HPolytope : public FeasibleRegion {
 public:
  HPolytope(Matrix a_ub, Vector b_ub, Matrix a_eq, Vector b_eq, Vector lb,
            Vector ub, std::string name = "hpolytope")
      : a_ub_(std::move(a_ub)),
        b_ub_(std::move(b_ub)),
        a_eq_(std::move(a_eq)),
        b_eq_(std::move(b_eq)),
        lb_(std::move(lb)),
        ub_(std::move(ub)),
        name_(std::move(name)) {
    auto probe = solve(Vector::Zero(lb_.size()));
    if (probe.status == LpStatus::infeasible) {
      throw InputError("HPolytope: description is infeasible");
    }
  }

  Index dim() const override { return lb_.size(); }

  /// Full LP solve in direction c; exposed for tests and tooling.
  LpResult solve(const Vector& c) const {
    SimplexLp lp(a_ub_, b_ub_, a_eq_, b_eq_, lb_, ub_);
    return lp.minimize(c);
  }

  std::shared_ptr<const Vertex> lmo(const Vector& c) const override {
    check_dim(c.size(), dim(), "HPolytope::lmo");
    LpResult r = solve(c);
    if (r.status == LpStatus::unbounded) {
      // An LMO over a polytope can only see this through a broken
      // description; surface it rather than returning garbage.
      throw std::runtime_error("HPolytope::lmo: direction is unbounded");
    }
    if (r.status != LpStatus::optimal) {
      throw std::runtime_error("HPolytope::lmo: LP solve failed");
    }
    if (!contains(r.x, 1e-8)) {
      throw std::runtime_error(
          "HPolytope::lmo: solution violates the 1e-8 residual bound");
    }
    return make_vertex(std::move(r.x));
  }

  bool contains(const Vector& x, double tol) const override {
    if (x.size() != dim()) return false;
    for (Index r = 0; r < a_ub_.rows(); ++r) {
      if (a_ub_.row(r).dot(x) > b_ub_[r] + tol) return false;
    }
    for (Index r = 0; r < a_eq_.rows(); ++r) {
      if (std::abs(a_eq_.row(r).dot(x) - b_eq_[r]) > tol) return false;
    }
    for (Index i = 0; i < dim(); ++i) {
      if (x[i] < lb_[i] - tol || x[i] > ub_[i] + tol) return false;
    }
    return true;
  }

  std::string description() const override {
    return name_ + "(n=" + std::to_string(dim()) +
           ", ineq=" + std::to_string(a_ub_.rows()) +
           ", eq=" + std::to_string(a_eq_.rows()) + ")";
  }

  /// Rows of constraints active at x (within tol), stacked as a matrix whose
  /// rank certifies whether x is a vertex.
  Matrix active_constraints(const Vector& x, double tol) const {
    std::vector<Vector> rows;
    for (Index r = 0; r < a_ub_.rows(); ++r) {
      if (std::abs(a_ub_.row(r).dot(x) - b_ub_[r]) <= tol) {
        rows.push_back(a_ub_.row(r).transpose());
      }
    }
    for (Index r = 0; r < a_eq_.rows(); ++r) {
      rows.push_back(a_eq_.row(r).transpose());
    }
    for (Index i = 0; i < dim(); ++i) {
      if ((std::isfinite(lb_[i]) && std::abs(x[i] - lb_[i]) <= tol) ||
          (std::isfinite(ub_[i]) && std::abs(x[i] - ub_[i]) <= tol)) {
        Vector e = Vector::Zero(dim());
        e[i] = 1.0;
        rows.push_back(e);
      }
    }
    Matrix out(static_cast<Index>(rows.size()), dim());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.row(static_cast<Index>(r)) = rows[r].transpose();
    }
    return out;
  }

  const Matrix& ineq_matrix() const { return a_ub_; }
  const Vector& ineq_rhs() const { return b_ub_; }
  const Matrix& eq_matrix() const { return a_eq_; }
  const Vector& eq_rhs() const { return b_eq_; }
  const Vector& lower_bounds() const { return lb_; }
  const Vector& upper_bounds() const { return ub_; }

  /// Plain-text fixture format. Layout:
  ///   hpolytope <name>
  ///   dim N
  ///   ineq R            followed by R rows of N coefficients then the rhs
  ///   eq R              same layout
  ///   lb                one row of N values (inf allowed)
  ///   ub                one row of N values
  /// Values are written in shortest round-trip decimal form, so that
  /// save-then-load reproduces the description exactly.
  void save_text(std::ostream& os) const {
    os << "hpolytope " << name_ << "\n";
    os << "dim " << dim() << "\n";
    os << "ineq " << a_ub_.rows() << "\n";
    for (Index r = 0; r < a_ub_.rows(); ++r) {
      for (Index j = 0; j < dim(); ++j) {
        os << detail::render_double(a_ub_(r, j)) << ' ';
      }
      os << detail::render_double(b_ub_[r]) << "\n";
    }
    os << "eq " << a_eq_.rows() << "\n";
    for (Index r = 0; r < a_eq_.rows(); ++r) {
      for (Index j = 0; j < dim(); ++j) {
        os << detail::render_double(a_eq_(r, j)) << ' ';
      }
      os << detail::render_double(b_eq_[r]) << "\n";
    }
    os << "lb\n";
    for (Index j = 0; j < dim(); ++j) {
      os << detail::render_double(lb_[j]) << (j + 1 < dim() ? " " : "\n");
    }
    os << "ub\n";
    for (Index j = 0; j < dim(); ++j) {
      os << detail::render_double(ub_[j]) << (j + 1 < dim() ? " " : "\n");
    }
  }

  static HPolytope load_text(std::istream& is) {
    std::string tag, name;
    is >> tag >> name;
    if (tag != "hpolytope") throw InputError("HPolytope::load_text: bad header");
    Index n = 0;
    is >> tag >> n;
    if (tag != "dim" || n < 1) throw InputError("HPolytope::load_text: bad dim");
    auto read_block = [&](const char* want, Matrix& a, Vector& b) {
      Index rows = 0;
      is >> tag >> rows;
      if (tag != want) throw InputError("HPolytope::load_text: bad block");
      a.resize(rows, n);
      b.resize(rows);
      std::string tok;
      for (Index r = 0; r < rows; ++r) {
        for (Index j = 0; j < n; ++j) {
          is >> tok;
          a(r, j) = detail::parse_double(tok);
        }
        is >> tok;
        b[r] = detail::parse_double(tok);
      }
    };
    Matrix a_ub, a_eq;
    Vector b_ub, b_eq;
    read_block("ineq", a_ub, b_ub);
    read_block("eq", a_eq, b_eq);
    auto read_bounds = [&](const char* want, Vector& v) {
      is >> tag;
      if (tag != want) throw InputError("HPolytope::load_text: bad bounds");
      v.resize(n);
      std::string tok;
      for (Index j = 0; j < n; ++j) {
        is >> tok;
        v[j] = detail::parse_double(tok);
      }
    };
    Vector lb, ub;
    read_bounds("lb", lb);
    read_bounds("ub", ub);
    if (!is) throw InputError("HPolytope::load_text: truncated input");
    return HPolytope(std::move(a_ub), std::move(b_ub), std::move(a_eq),
                     std::move(b_eq), std::move(lb), std::move(ub), name);
  }

 private:
  Matrix a_ub_;
  Vector b_ub_;
  Matrix a_eq_;
  Vector b_eq_;
  Vector lb_;
  Vector ub_;
  std::string name_;
};

inline HPolytope make_unit_box(Index n) {
  return HPolytope(Matrix(0, n), Vector(0), Matrix(0, n), Vector(0),
                   Vector::Zero(n), Vector::Ones(n), "box");
}

/// The unit probability simplex in halfspace form; used to cross-check the
/// closed-form simplex LMO against the LP route.
inline HPolytope make_simplex_hpolytope(Index n) {
  Matrix a_eq = Matrix::Ones(1, n);
  Vector b_eq = Vector::Ones(1);
  const double inf = std::numeric_limits<double>::infinity();
  return HPolytope(Matrix(0, n), Vector(0), std::move(a_eq), std::move(b_eq),
                   Vector::Zero(n), Vector::Constant(n, inf), "simplex-h");
}

/// Doubly stochastic matrices of order n_side (flattened row-major), with
/// selected cells fixed to zero and selected cells capped. Cell (r, c) is
/// coordinate r * n_side + c.
inline HPolytope make_birkhoff_region(Index n_side,
                                      const std::vector<Index>& zero_idx,
                                      const std::vector<Index>& cap_idx,
                                      double cap) {
  const Index n = n_side * n_side;
  for (Index i : zero_idx) {
    if (i < 0 || i >= n) throw InputError("make_birkhoff_region: bad zero index");
    for (Index j : cap_idx) {
      if (i == j) {
        throw InputError("make_birkhoff_region: zero and cap sets overlap");
      }
    }
  }
  for (Index i : cap_idx) {
    if (i < 0 || i >= n) throw InputError("make_birkhoff_region: bad cap index");
  }

  Matrix a_eq = Matrix::Zero(2 * n_side, n);
  Vector b_eq = Vector::Ones(2 * n_side);
  for (Index r = 0; r < n_side; ++r) {
    for (Index c = 0; c < n_side; ++c) {
      a_eq(r, r * n_side + c) = 1.0;           // row sums
      a_eq(n_side + c, r * n_side + c) = 1.0;  // column sums
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  Vector lb = Vector::Zero(n);
  Vector ub = Vector::Constant(n, inf);
  for (Index i : zero_idx) ub[i] = 0.0;
  for (Index i : cap_idx) ub[i] = cap;
  return HPolytope(Matrix(0, n), Vector(0), std::move(a_eq), std::move(b_eq),
                   std::move(lb), std::move(ub), "birkhoff");
}

}  // namespace pflacg

#endif  // PFLACG_HPOLYTOPE_HPP_
