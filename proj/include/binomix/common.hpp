#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace binomix {

// Neumaier-compensated accumulator. Summation order is fixed by the caller,
// which keeps results identical across runs and thread counts.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

inline const std::vector<std::vector<double>>& pascal_rows(int max_n) {
  static std::vector<std::vector<double>> rows = [] {
    std::vector<std::vector<double>> r(65);
    r[0] = {1.0};
    for (int n = 1; n <= 64; ++n) {
      r[n].assign(n + 1, 1.0);
      for (int k = 1; k < n; ++k) r[n][k] = r[n - 1][k - 1] + r[n - 1][k];
    }
    return r;
  }();
  if (max_n > 64) throw std::invalid_argument("pascal_rows: n > 64");
  return rows;
}

}  // namespace detail

// C(n, k); zero when k < 0 or k > n. Exact for n <= 64, lgamma beyond.
inline double binom_coeff(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  if (n <= 64) return detail::pascal_rows(n)[n][k];
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

// Binomial pmf B_{j,t}(p). Exact products for t <= 30, log-gamma otherwise,
// with explicit handling of the degenerate endpoints.
inline double binom_pmf(int t, int j, double p) {
  if (t < 1 || j < 0 || j > t) return 0.0;
  if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return j == t ? 1.0 : 0.0;
  if (t <= 30) {
    return binom_coeff(t, j) * std::pow(p, j) * std::pow(1.0 - p, t - j);
  }
  double logv = std::lgamma(t + 1.0) - std::lgamma(j + 1.0) -
                std::lgamma(t - j + 1.0) + j * std::log(p) +
                (t - j) * std::log1p(-p);
  return std::exp(logv);
}

inline double sq(double x) { return x * x; }

// mu_p = p(1-p)
inline double bernoulli_var(double p) { return p * (1.0 - p); }

}  // namespace binomix
