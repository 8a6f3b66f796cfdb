#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace binomix {

// Dense two-phase primal simplex for
//   minimize c'x  subject to  A x = b,  x >= 0,
// with Bland's rule for anti-cycling. Sized for the small problems in this
// project (moment-matching LPs: a few thousand columns, <= ~70 rows).
struct LpResult {
  bool feasible = false;
  bool bounded = true;
  double objective = 0.0;
  std::vector<double> x;
};

class SimplexSolver {
 public:
  SimplexSolver(std::vector<std::vector<double>> A, std::vector<double> b,
                std::vector<double> c)
      : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
    m_ = A_.size();
    n_ = m_ ? A_[0].size() : 0;
    if (b_.size() != m_ || c_.size() != n_)
      throw std::invalid_argument("SimplexSolver: dimension mismatch");
    for (std::size_t i = 0; i < m_; ++i)
      if (b_[i] < 0.0) {
        for (auto& a : A_[i]) a = -a;
        b_[i] = -b_[i];
      }
  }

  LpResult solve() {
    // Phase 1: artificial basis.
    tableau_.assign(m_, std::vector<double>(n_ + m_ + 1, 0.0));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) tableau_[i][j] = A_[i][j];
      tableau_[i][n_ + i] = 1.0;
      tableau_[i][n_ + m_] = b_[i];
      basis_[i] = n_ + i;
    }
    std::vector<double> phase1_cost(n_ + m_, 0.0);
    for (std::size_t j = n_; j < n_ + m_; ++j) phase1_cost[j] = 1.0;
    double art = run(phase1_cost, n_ + m_);
    LpResult res;
    if (art > kFeasTol) return res;  // infeasible
    res.feasible = true;
    // Drive artificials out of the basis where possible; rows whose
    // artificial cannot leave are redundant constraints.
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j)
        if (std::abs(tableau_[i][j]) > kPivotTol) {
          enter = j;
          break;
        }
      if (enter < n_) pivot(i, enter);
    }
    // Phase 2 on the original cost, artificial columns frozen.
    std::vector<double> cost(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = c_[j];
    double obj = run(cost, n_);
    if (!bounded_) {
      res.bounded = false;
      return res;
    }
    res.objective = obj;
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = tableau_[i][n_ + m_];
    return res;
  }

 private:
  static constexpr double kFeasTol = 1e-7;
  static constexpr double kPivotTol = 1e-9;

  void pivot(std::size_t row, std::size_t col) {
    const double piv = tableau_[row][col];
    for (auto& v : tableau_[row]) v /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tableau_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_ + m_; ++j)
        tableau_[i][j] -= f * tableau_[row][j];
    }
    basis_[row] = col;
  }

  // Minimizes cost over columns [0, ncols); returns the objective value.
  double run(const std::vector<double>& cost, std::size_t ncols) {
    bounded_ = true;
    while (true) {
      // Reduced costs via the basic cost vector.
      std::vector<double> y(m_);
      for (std::size_t i = 0; i < m_; ++i) y[i] = cost[basis_[i]];
      std::size_t enter = ncols;
      for (std::size_t j = 0; j < ncols; ++j) {
        double r = cost[j];
        for (std::size_t i = 0; i < m_; ++i)
          if (y[i] != 0.0) r -= y[i] * tableau_[i][j];
        if (r < -kReducedTol) {
          enter = j;  // Bland: smallest index
          break;
        }
      }
      if (enter == ncols) break;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (tableau_[i][enter] > kPivotTol) {
          const double ratio = tableau_[i][n_ + m_] / tableau_[i][enter];
          if (ratio < best - 1e-15 ||
              (ratio < best + 1e-15 && (leave == m_ || basis_[i] < basis_[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m_) {
        bounded_ = false;
        return 0.0;
      }
      pivot(leave, enter);
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      obj += cost[basis_[i]] * tableau_[i][n_ + m_];
    return obj;
  }

  static constexpr double kReducedTol = 1e-10;

  std::vector<std::vector<double>> A_;
  std::vector<double> b_, c_;
  std::size_t m_ = 0, n_ = 0;
  std::vector<std::vector<double>> tableau_;
  std::vector<std::size_t> basis_;
  bool bounded_ = true;
};

inline LpResult solve_lp(std::vector<std::vector<double>> A,
                         std::vector<double> b, std::vector<double> c) {
  return SimplexSolver(std::move(A), std::move(b), std::move(c)).solve();
}

}  // namespace binomix
