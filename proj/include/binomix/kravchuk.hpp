#pragma once

#include <sstream>
#include <stdexcept>

#include "binomix/common.hpp"
#include "binomix/mixture.hpp"

namespace binomix {

namespace detail {
inline void check_kravchuk_args(int m, int x, double p, int t) {
  if (t < 1) throw std::invalid_argument("kravchuk: t must be >= 1");
  if (m < 0 || m > t) throw std::invalid_argument("kravchuk: m outside 0..t");
  if (x < 0 || x > t) throw std::invalid_argument("kravchuk: x outside 0..t");
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("kravchuk: p must lie in the open interval (0,1)");
}
}  // namespace detail

// K_m(x,p,t) = sum_v (-1)^{m-v} C(t-x, m-v) C(x, v) p^{m-v} (1-p)^v,
// with C(a,b) = 0 for b > a. Direct summation with exact coefficient
// tables and compensated accumulation.
inline double kravchuk(int m, int x, double p, int t) {
  detail::check_kravchuk_args(m, x, p, t);
  KahanSum s;
  for (int v = 0; v <= m; ++v) {
    const double c = binom_coeff(t - x, m - v) * binom_coeff(x, v);
    if (c == 0.0) continue;
    const double sign = ((m - v) % 2 == 0) ? 1.0 : -1.0;
    s.add(sign * c * std::pow(p, m - v) * std::pow(1.0 - p, v));
  }
  return s.value();
}

// Normalized form K~_m = K_m / C(t,m).
inline double kravchuk_norm(int m, int x, double p, int t) {
  detail::check_kravchuk_args(m, x, p, t);
  return kravchuk(m, x, p, t) / binom_coeff(t, m);
}

// Closed forms for the two orders the statistics use. Both extend
// continuously to p in {0,1}, which the endpoint nulls rely on.
inline double kravchuk_norm1(int x, double p, int t) {
  return static_cast<double>(x) / t - p;
}

inline double kravchuk_norm2(int x, double p, int t) {
  const double b = static_cast<double>(x) / t;
  return sq(b - p) - bernoulli_var(b) / (t - 1);
}

// Evaluator bound to (t, p); caches nothing beyond the argument checks but
// gives the statistics a single place to pin the center.
class KravchukEvaluator {
 public:
  KravchukEvaluator(int trials, double center) : t_(trials), p_(center) {
    if (t_ < 1) throw std::invalid_argument("KravchukEvaluator: trials < 1");
    if (!(p_ > 0.0 && p_ < 1.0))
      throw std::domain_error("KravchukEvaluator: center must be in (0,1)");
  }
  int trials() const { return t_; }
  double center() const { return p_; }
  double operator()(int m, int x) const { return kravchuk(m, x, p_, t_); }
  double normalized(int m, int x) const { return kravchuk_norm(m, x, p_, t_); }

 private:
  int t_;
  double p_;
};

// (1/n) sum_i K~_m(x_i, p, t_i); unbiased for (-1)^m (p-q)^m per record.
inline double centered_moment_estimate(const Dataset& data, double p, int m) {
  if (m < 1)
    throw std::invalid_argument("centered_moment_estimate: m must be >= 1");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (m > data[i].trials) {
      std::ostringstream msg;
      msg << "centered_moment_estimate: m=" << m << " exceeds trials of record "
          << i << " (t=" << data[i].trials << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  KahanSum s;
  for (const auto& r : data.records())
    s.add(kravchuk_norm(m, r.count, p, r.trials));
  return s.value() / static_cast<double>(data.size());
}

}  // namespace binomix
