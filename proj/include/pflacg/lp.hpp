#ifndef PFLACG_LP_HPP_
#define PFLACG_LP_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "pflacg/types.hpp"

namespace pflacg {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;                      // solution in the original variable space
  double objective = 0.0;
  std::vector<Index> basis;      // basic column indices of the standard form
};

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
///
/// Minimizes c'x subject to A_ub x <= b_ub, A_eq x = b_eq, lb <= x <= ub.
/// Finite upper bounds become explicit rows; variables with a finite lower
/// bound are shifted, variables unbounded below are split. Answers are basic
/// feasible solutions, i.e. genuine polytope vertices, which the active-set
/// bookkeeping downstream depends on. Dense tableau; intended for the desk
/// scales this project runs at (up to roughly a thousand rows).
class SimplexLp {
 public:
  SimplexLp(const Matrix& a_ub, const Vector& b_ub, const Matrix& a_eq,
            const Vector& b_eq, const Vector& lb, const Vector& ub)
      : n_(lb.size()) {
    if (ub.size() != n_) throw InputError("SimplexLp: lb/ub size mismatch");
    if (a_ub.rows() != b_ub.size() || (a_ub.rows() > 0 && a_ub.cols() != n_)) {
      throw InputError("SimplexLp: A_ub/b_ub shape mismatch");
    }
    if (a_eq.rows() != b_eq.size() || (a_eq.rows() > 0 && a_eq.cols() != n_)) {
      throw InputError("SimplexLp: A_eq/b_eq shape mismatch");
    }

    // Column layout of the standard form: one column per variable with a
    // finite lower bound, a (+,-) pair per free variable, then slacks.
    col_of_var_.assign(static_cast<std::size_t>(n_), -1);
    neg_col_of_var_.assign(static_cast<std::size_t>(n_), -1);
    Index cols = 0;
    for (Index i = 0; i < n_; ++i) {
      if (std::isfinite(lb[i])) {
        col_of_var_[i] = cols++;
      } else {
        col_of_var_[i] = cols++;
        neg_col_of_var_[i] = cols++;
      }
    }
    n_struct_cols_ = cols;

    std::vector<Index> bounded_vars;
    for (Index i = 0; i < n_; ++i) {
      if (std::isfinite(ub[i])) bounded_vars.push_back(i);
    }
    const Index m =
        a_eq.rows() + a_ub.rows() + static_cast<Index>(bounded_vars.size());
    const Index n_slack = a_ub.rows() + static_cast<Index>(bounded_vars.size());
    rows_ = m;
    cols_ = cols + n_slack;

    tableau_ = Matrix::Zero(m, cols_ + 1);  // last column is the rhs
    Index row = 0;
    auto emit_var = [&](Index r, Index var, double coef) {
      tableau_(r, col_of_var_[var]) += coef;
      if (neg_col_of_var_[var] >= 0) tableau_(r, neg_col_of_var_[var]) -= coef;
    };
    for (Index r = 0; r < a_eq.rows(); ++r, ++row) {
      double rhs = b_eq[r];
      for (Index j = 0; j < n_; ++j) {
        if (a_eq(r, j) == 0.0) continue;
        emit_var(row, j, a_eq(r, j));
        if (std::isfinite(lb[j])) rhs -= a_eq(r, j) * lb[j];
      }
      tableau_(row, cols_) = rhs;
    }
    Index slack = cols;
    for (Index r = 0; r < a_ub.rows(); ++r, ++row, ++slack) {
      double rhs = b_ub[r];
      for (Index j = 0; j < n_; ++j) {
        if (a_ub(r, j) == 0.0) continue;
        emit_var(row, j, a_ub(r, j));
        if (std::isfinite(lb[j])) rhs -= a_ub(r, j) * lb[j];
      }
      tableau_(row, slack) = 1.0;
      tableau_(row, cols_) = rhs;
    }
    for (Index i : bounded_vars) {
      emit_var(row, i, 1.0);
      tableau_(row, slack) = 1.0;
      tableau_(row, cols_) =
          std::isfinite(lb[i]) ? ub[i] - lb[i] : ub[i];
      ++row;
      ++slack;
    }
    for (Index r = 0; r < rows_; ++r) {
      if (tableau_(r, cols_) < 0) tableau_.row(r) = -tableau_.row(r);
    }
    lb_ = lb;
  }

  LpResult minimize(const Vector& c) {
    check_dim(c.size(), n_, "SimplexLp::minimize");
    LpResult result;

    // Working copy with artificial columns appended for phase 1.
    const Index total = cols_ + rows_;
    Matrix t(rows_, total + 1);
    t.leftCols(cols_) = tableau_.leftCols(cols_);
    t.middleCols(cols_, rows_) = Matrix::Identity(rows_, rows_);
    t.col(total) = tableau_.col(cols_);

    std::vector<Index> basis(rows_);
    for (Index r = 0; r < rows_; ++r) basis[r] = cols_ + r;

    // Phase 1 reduced costs: minimize the sum of artificials.
    Eigen::RowVectorXd d1 = Eigen::RowVectorXd::Zero(total + 1);
    for (Index r = 0; r < rows_; ++r) d1 -= t.row(r);
    d1.segment(cols_, rows_).setZero();

    // Phase 2 cost row in standard-form columns.
    Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(total + 1);
    for (Index i = 0; i < n_; ++i) {
      cost[col_of_var_[i]] += c[i];
      if (neg_col_of_var_[i] >= 0) cost[neg_col_of_var_[i]] -= c[i];
    }
    Eigen::RowVectorXd d2 = cost;

    const double scale = 1.0 + (t.size() > 0 ? t.cwiseAbs().maxCoeff() : 0.0);
    const double cost_tol = 1e-10 * (1.0 + d2.cwiseAbs().maxCoeff());
    const double p1_tol = 1e-10 * scale;

    if (!run_simplex(t, d1, basis, total, /*phase1=*/true, p1_tol, &d2)) {
      result.status = LpStatus::unbounded;  // cannot happen in phase 1
      return result;
    }
    if (-d1[total] > 1e-8 * scale) {
      result.status = LpStatus::infeasible;
      return result;
    }
    purge_artificials(t, d1, d2, basis, total);

    if (!run_simplex(t, d2, basis, cols_, /*phase1=*/false, cost_tol, nullptr)) {
      result.status = LpStatus::unbounded;
      return result;
    }

    // Recover the original-space solution.
    Vector z = Vector::Zero(cols_);
    for (Index r = 0; r < rows_; ++r) {
      if (basis[r] < cols_) z[basis[r]] = t(r, total);
    }
    result.x = Vector(n_);
    for (Index i = 0; i < n_; ++i) {
      double v = z[col_of_var_[i]];
      if (neg_col_of_var_[i] >= 0) v -= z[neg_col_of_var_[i]];
      if (std::isfinite(lb_[i])) v += lb_[i];
      result.x[i] = v;
    }
    result.objective = c.dot(result.x);
    result.basis = basis;
    result.status = LpStatus::optimal;
    return result;
  }

 private:
  // Bland's rule throughout: entering column is the lowest index with a
  // negative reduced cost; leaving row breaks ratio ties by the lowest basic
  // column index. Returns false on detecting an unbounded direction.
  bool run_simplex(Matrix& t, Eigen::RowVectorXd& d, std::vector<Index>& basis,
                   Index eligible_cols, bool phase1, double tol,
                   Eigen::RowVectorXd* shadow) {
    const Index rhs = t.cols() - 1;
    while (true) {
      Index enter = -1;
      for (Index j = 0; j < eligible_cols; ++j) {
        if (d[j] < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < t.rows(); ++r) {
        const double a = t(r, enter);
        if (a <= 1e-11) continue;
        const double ratio = t(r, rhs) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (leave < 0 || basis[r] < basis[leave]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return phase1 ? true : false;

      pivot(t, d, shadow, leave, enter);
      basis[leave] = enter;
    }
  }

  void pivot(Matrix& t, Eigen::RowVectorXd& d, Eigen::RowVectorXd* shadow,
             Index row, Index col) {
    t.row(row) /= t(row, col);
    for (Index r = 0; r < t.rows(); ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (f != 0.0) t.row(r) -= f * t.row(row);
    }
    d -= d[col] * t.row(row);
    if (shadow) *shadow -= (*shadow)[col] * t.row(row);
  }

  // Pivot basic artificials (all at value zero after a feasible phase 1) out
  // of the basis; rows that admit no pivot are redundant and are blanked.
  void purge_artificials(Matrix& t, Eigen::RowVectorXd& d1,
                         Eigen::RowVectorXd& d2, std::vector<Index>& basis,
                         Index total) {
    for (Index r = 0; r < t.rows(); ++r) {
      if (basis[r] < cols_) continue;
      Index col = -1;
      for (Index j = 0; j < cols_; ++j) {
        if (std::abs(t(r, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(t, d1, &d2, r, col);
        basis[r] = col;
      } else {
        t.row(r).setZero();
        t(r, total) = 0.0;
      }
    }
    // Artificials must never re-enter.
    for (Index j = cols_; j < total; ++j) {
      d2[j] = std::numeric_limits<double>::infinity();
      t.col(j).setZero();
    }
  }

  Index n_;             // original variables
  Index n_struct_cols_; // structural standard-form columns
  Index rows_;
  Index cols_;          // structural + slack columns
  Matrix tableau_;      // rows x (cols_ + 1), rhs in the last column
  Vector lb_;
  std::vector<Index> col_of_var_;
  std::vector<Index> neg_col_of_var_;
};

}  // namespace pflacg

#endif  // PFLACG_LP_HPP_
