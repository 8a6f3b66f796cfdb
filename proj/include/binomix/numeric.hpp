#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace binomix {

namespace detail {

// Regularized lower incomplete gamma P(a,x): series for x < a+1, Lentz
// continued fraction for the upper tail otherwise.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad args");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

}  // namespace detail

// P(chi^2_k <= x).
inline double chi2_cdf(int dof, double x) {
  if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
  if (x <= 0.0) return 0.0;
  return detail::gamma_p(dof / 2.0, x / 2.0);
}

inline double chi2_sf(int dof, double x) { return 1.0 - chi2_cdf(dof, x); }

// (1-alpha)-quantile of chi^2_k via Wilson-Hilferty start and safeguarded
// Newton; accurate to ~1e-10 relative.
inline double chi2_quantile(int dof, double prob) {
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("chi2_quantile: prob must be in (0,1)");
  const double k = dof;
  // Wilson-Hilferty initialization from the normal quantile.
  // Acklam-style rational approximation is overkill here; a couple of
  // Newton steps fix any coarse start, so use the logistic-like seed.
  double z;
  {
    // Beasley-Springer-Moro style inverse normal.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p = prob;
    const double plow = 0.02425, phigh = 1 - plow;
    if (p < plow) {
      const double q = std::sqrt(-2 * std::log(p));
      z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
          ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= phigh) {
      const double q = p - 0.5, r = q * q;
      z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
          q /
          (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
      const double q = std::sqrt(-2 * std::log(1 - p));
      z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
          ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
  }
  const double wh = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  double x = k * wh * wh * wh;
  if (!(x > 0.0)) x = k;
  for (int it = 0; it < 100; ++it) {
    const double f = chi2_cdf(dof, x) - prob;
    const double pdf = std::exp((k / 2.0 - 1.0) * std::log(x) - x / 2.0 -
                                std::lgamma(k / 2.0) - (k / 2.0) * std::log(2.0));
    if (pdf <= 0.0) break;
    const double step = f / pdf;
    double next = x - step;
    if (next <= 0.0) next = x / 2.0;
    if (std::abs(next - x) < 1e-12 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace binomix
