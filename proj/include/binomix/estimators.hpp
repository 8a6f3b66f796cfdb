#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "binomix/common.hpp"
#include "binomix/lp.hpp"
#include "binomix/mixture.hpp"
#include "binomix/statistics.hpp"

namespace binomix {

// Support discretization for the grid-based estimators.
struct GridSpec {
  std::vector<double> points;

  static GridSpec uniform(std::size_t size = 101) {
    if (size < 2) throw std::invalid_argument("GridSpec: need >= 2 points");
    GridSpec g;
    g.points.resize(size);
    for (std::size_t i = 0; i < size; ++i)
      g.points[i] = static_cast<double>(i) / static_cast<double>(size - 1);
    return g;
  }

  void validate() const {
    if (points.size() < 2 || points.front() != 0.0 || points.back() != 1.0)
      throw std::invalid_argument("GridSpec: grid must include 0 and 1");
    for (std::size_t i = 1; i < points.size(); ++i)
      if (!(points[i] > points[i - 1]))
        throw std::invalid_argument("GridSpec: grid must be strictly increasing");
  }
};

struct EstimateMeta {
  std::size_t iterations = 0;
  double objective = 0.0;  // final log-likelihood (NPMLE) or L1 value (MOM)
  bool converged = false;
};

// Fixed-grid NPMLE via multiplicative (EM) updates of the gamma-truncated
// per-record log-likelihood. The likelihood is nondecreasing across
// iterations; records whose mixture likelihood sits below gamma contribute
// a flat term and drop out of the update for that sweep.
inline MixingDistribution npmle(const Dataset& data, const GridSpec& grid,
                                double gamma = kDefaultGamma,
                                std::size_t max_iter = 5000, double tol = 1e-10,
                                EstimateMeta* meta = nullptr) {
  grid.validate();
  const std::size_t G = grid.points.size();
  const std::size_t n = data.size();
  // Per-record densities f_k(x_i); rows are records.
  std::vector<std::vector<double>> f(n, std::vector<double>(G));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < G; ++k)
      f[i][k] = binom_pmf(data[i].trials, data[i].count, grid.points[k]);

  std::vector<double> w(G, 1.0 / static_cast<double>(G));
  std::vector<double> mix(n);
  auto loglik = [&]() {
    KahanSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(std::log(std::max(gamma, mix[i])));
    return s.value();
  };
  auto update_mix = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      KahanSum s;
      for (std::size_t k = 0; k < G; ++k)
        if (w[k] > 0.0) s.add(w[k] * f[i][k]);
      mix[i] = s.value();
    }
  };
  update_mix();
  double prev = loglik();
  std::size_t it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    std::vector<double> next(G, 0.0);
    std::size_t active = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mix[i] <= gamma) continue;  // flat region of the truncated objective
      ++active;
      for (std::size_t k = 0; k < G; ++k)
        if (w[k] > 0.0) next[k] += w[k] * f[i][k] / mix[i];
    }
    if (active == 0) break;
    double total = 0.0;
    for (std::size_t k = 0; k < G; ++k) {
      next[k] /= static_cast<double>(active);
      total += next[k];
    }
    for (auto& v : next) v /= total;
    w.swap(next);
    update_mix();
    const double cur = loglik();
    const double denom = std::max(1.0, std::abs(prev));
    if (std::abs(cur - prev) / denom < tol) {
      prev = cur;
      converged = true;
      ++it;
      break;
    }
    prev = cur;
  }
  if (meta) {
    meta->iterations = it;
    meta->objective = prev;
    meta->converged = converged;
  }
  return MixingDistribution::from_unnormalized(grid.points, w);
}

// Unbiased moment estimates m^_j = ratio form of Eq.-(K.3)/(L.1); entries
// with no eligible record (j > every t_i) are absent.
inline std::vector<std::optional<double>> unbiased_moments(const Dataset& data,
                                                           int J) {
  if (J < 1) throw std::invalid_argument("unbiased_moments: J must be >= 1");
  std::vector<std::optional<double>> out(J);
  for (int j = 1; j <= J; ++j) {
    KahanSum s;
    std::size_t eligible = 0;
    for (const auto& r : data.records()) {
      if (j > r.trials) continue;
      ++eligible;
      s.add(binom_coeff(r.count, j) / binom_coeff(r.trials, j));
    }
    if (eligible > 0) out[j - 1] = s.value() / static_cast<double>(eligible);
  }
  return out;
}

// Method-of-moments estimator: grid weights minimizing the L1 distance
// between the grid measure's moments and the unbiased estimates, solved as
// a linear program with split residuals. The j = 0 row of the paper's
// objective is inert (both sides are 1) and omitted from the LP.
inline MixingDistribution mom(const Dataset& data, const GridSpec& grid,
                              EstimateMeta* meta = nullptr) {
  grid.validate();
  const std::size_t G = grid.points.size();
  const int J = data.max_trials();
  const auto mhat = unbiased_moments(data, J);
  std::vector<int> rows;
  for (int j = 1; j <= J; ++j)
    if (mhat[j - 1]) rows.push_back(j);
  const std::size_t R = rows.size();
  // Variables: w (G), then u_j, v_j per moment row (residual split).
  const std::size_t ncols = G + 2 * R;
  std::vector<std::vector<double>> A(R + 1, std::vector<double>(ncols, 0.0));
  std::vector<double> b(R + 1, 0.0);
  std::vector<double> c(ncols, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    const int j = rows[r];
    for (std::size_t k = 0; k < G; ++k)
      A[r][k] = std::pow(grid.points[k], j);
    A[r][G + 2 * r] = -1.0;
    A[r][G + 2 * r + 1] = 1.0;
    b[r] = *mhat[j - 1];
    c[G + 2 * r] = 1.0;
    c[G + 2 * r + 1] = 1.0;
  }
  for (std::size_t k = 0; k < G; ++k) A[R][k] = 1.0;
  b[R] = 1.0;
  auto res = solve_lp(std::move(A), std::move(b), std::move(c));
  if (!res.feasible || !res.bounded)
    throw std::runtime_error("mom: LP solve failed");  // simplex is always feasible
  std::vector<double> w(res.x.begin(), res.x.begin() + G);
  for (auto& v : w) v = std::max(0.0, v);
  if (meta) {
    meta->iterations = 1;
    meta->objective = res.objective;
    meta->converged = true;
  }
  return MixingDistribution::from_unnormalized(grid.points, w);
}

enum class EstimatorKind { Npmle, Mom };

// Distance-to-estimator statistic (Appendix-K style): W1 of the fitted
// grid estimate against the null.
inline double stat_dist_to_estimator(const Dataset& data,
                                     const MixingDistribution& pi0,
                                     EstimatorKind kind,
                                     const GridSpec& grid = GridSpec::uniform(),
                                     double gamma = kDefaultGamma) {
  const MixingDistribution est =
      kind == EstimatorKind::Npmle ? npmle(data, grid, gamma) : mom(data, grid);
  return w1(est, pi0);
}

}  // namespace binomix
