#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "binomix/common.hpp"
#include "binomix/kravchuk.hpp"
#include "binomix/mixture.hpp"

namespace binomix {

constexpr double kDefaultGamma = 1e-10;

// Null hypothesis specification.
struct MixingNull {
  MixingDistribution pi0;
};
struct PointNull {
  double p0;
  PointNull(double p) : p0(p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("PointNull: p0 must lie in [0,1]");
  }
};
struct CompositePointMassNull {};

using NullSpec = std::variant<MixingNull, PointNull, CompositePointMassNull>;

inline const MixingDistribution& require_mixing_null(const NullSpec& null) {
  if (const auto* m = std::get_if<MixingNull>(&null)) return m->pi0;
  throw std::invalid_argument("statistic requires a mixing-distribution null");
}

inline double require_point_null(const NullSpec& null) {
  if (const auto* p = std::get_if<PointNull>(&null)) return p->p0;
  if (const auto* m = std::get_if<MixingNull>(&null)) {
    if (m->pi0.num_atoms() == 1) return m->pi0.support()[0];
  }
  throw std::invalid_argument("statistic requires a point-mass null p0");
}

// Observed fingerprint counts n_j, j = 0..t.
struct Fingerprints {
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
  int trials = 0;
};

inline Fingerprints fingerprints(const Dataset& data) {
  const auto t = data.homogeneous_trials();
  if (!t)
    throw std::invalid_argument(
        "fingerprints: trials vary across records; use the varying-trials "
        "statistics instead");
  Fingerprints f;
  f.trials = *t;
  f.counts.assign(*t + 1, 0);
  f.total = static_cast<std::int64_t>(data.size());
  for (const auto& r : data.records()) ++f.counts[r.count];
  return f;
}

// --- Goodness-of-fit statistics -------------------------------------------

// Empirical mixing measure: atoms at the distinct x_i/t_i with
// multiplicity weights.
inline MixingDistribution empirical_mixing(const Dataset& data) {
  std::vector<double> props(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    props[i] = static_cast<double>(data[i].count) / data[i].trials;
  std::vector<double> w(props.size(), 1.0 / static_cast<double>(props.size()));
  return MixingDistribution::from_unnormalized(std::move(props), std::move(w));
}

inline double stat_w1_plugin(const Dataset& data, const MixingDistribution& pi0) {
  return w1(empirical_mixing(data), pi0);
}

// Debiased Pearson chi-squared statistic: centered K~2 of each fingerprint
// cell over max(1/(t+1), mu_b).
inline double stat_debiased_pearson(const Dataset& data,
                                    const MixingDistribution& pi0) {
  const auto f = fingerprints(data);
  const int t = f.trials;
  const auto n = static_cast<double>(f.total);
  if (f.total < 2)
    throw std::invalid_argument("stat_debiased_pearson: requires n >= 2");
  const auto b = marginal_pmf(BinomialMixtureModel(t, pi0));
  KahanSum s;
  for (int j = 0; j <= t; ++j) {
    const double bj = b[j];
    const double hat = static_cast<double>(f.counts[j]) / n;
    const double k2 = sq(hat - bj) - bernoulli_var(hat) / (n - 1.0);
    s.add(k2 / std::max(1.0 / (t + 1), bernoulli_var(bj)));
  }
  return s.value() / (t + 1);
}

inline double stat_modified_pearson_gof(const Dataset& data,
                                        const MixingDistribution& pi0,
                                        double gamma = kDefaultGamma) {
  const auto f = fingerprints(data);
  const int t = f.trials;
  const auto n = static_cast<double>(f.total);
  const auto b = marginal_pmf(BinomialMixtureModel(t, pi0));
  KahanSum s;
  for (int j = 0; j <= t; ++j) {
    const double hat = static_cast<double>(f.counts[j]) / n;
    s.add(sq(hat - b[j]) / std::max(bernoulli_var(b[j]), gamma));
  }
  return s.value() / (t + 1);
}

inline double stat_modified_lrt_gof(const Dataset& data,
                                    const MixingDistribution& pi0,
                                    double gamma = kDefaultGamma) {
  const auto f = fingerprints(data);
  const int t = f.trials;
  const auto n = static_cast<double>(f.total);
  const auto b = marginal_pmf(BinomialMixtureModel(t, pi0));
  KahanSum s;
  for (int j = 0; j <= t; ++j) {
    const double hat = static_cast<double>(f.counts[j]) / n;
    if (hat == 0.0) continue;
    s.add(hat * std::log(std::max(hat, gamma) / std::max(b[j], gamma)));
  }
  return std::abs(s.value() / (t + 1));
}

// --- Homogeneity statistics with a reference effect ------------------------

// T1 = n^{-1} sum (x_i/t_i - p0).
inline double stat_mean_t1(const Dataset& data, double p0) {
  KahanSum s;
  for (const auto& r : data.records())
    s.add(kravchuk_norm1(r.count, p0, r.trials));
  return s.value() / static_cast<double>(data.size());
}

// T2 = n^{-1} sum K~2(x_i, p0, t_i); unbiased for the integrated (p-p0)^2.
inline double stat_debiased_l2_t2(const Dataset& data, double p0) {
  KahanSum s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].trials < 2) {
      std::ostringstream msg;
      msg << "stat_debiased_l2_t2: record " << i << " has t=" << data[i].trials
          << " < 2";
      throw std::invalid_argument(msg.str());
    }
    s.add(kravchuk_norm2(data[i].count, p0, data[i].trials));
  }
  return s.value() / static_cast<double>(data.size());
}

inline double stat_l2(const Dataset& data, double p0) {
  KahanSum s;
  for (const auto& r : data.records())
    s.add(sq(static_cast<double>(r.count) / r.trials - p0));
  return s.value() / static_cast<double>(data.size());
}

// Application form n^{-1} sum t_i (x_i/t_i - p0)^2; the textbook form
// additionally divides by mu_{p0}.
inline double stat_modified_pearson_homog(const Dataset& data, double p0,
                                          bool use_variance_norm = false) {
  KahanSum s;
  for (const auto& r : data.records())
    s.add(r.trials * sq(static_cast<double>(r.count) / r.trials - p0));
  double v = s.value() / static_cast<double>(data.size());
  if (use_variance_norm) v /= bernoulli_var(p0);
  return v;
}

inline double stat_modified_lrt_homog(const Dataset& data, double p0,
                                      double gamma = kDefaultGamma) {
  KahanSum s;
  for (const auto& r : data.records()) {
    const double hat = static_cast<double>(r.count) / r.trials;
    if (r.count > 0)
      s.add(r.count * std::log(std::max(hat, gamma) / std::max(p0, gamma)));
    if (r.count < r.trials)
      s.add((r.trials - r.count) *
            std::log(std::max(1.0 - hat, gamma) / std::max(1.0 - p0, gamma)));
  }
  return std::abs(s.value() / static_cast<double>(data.size()));
}

// --- Homogeneity statistics without a reference effect ---------------------

namespace detail {
// Pairwise U-statistics reduce to the per-record sums below; the closed
// forms keep evaluation O(n) and order-independent. Unit tests pin them
// against the direct pair enumeration.
struct UStatSums {
  double sum_a = 0.0;   // sum C(x,2)/C(t,2)
  double sum_b = 0.0;   // sum x/t
  double sum_b2 = 0.0;  // sum (x/t)^2
  std::size_t n = 0;
};

inline UStatSums ustat_sums(const Dataset& data, bool need_a) {
  UStatSums s;
  KahanSum a, b, b2;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    if (need_a && r.trials < 2) {
      std::ostringstream msg;
      msg << "variance U-statistic: record " << i << " has t=" << r.trials
          << " < 2";
      throw std::invalid_argument(msg.str());
    }
    const double bi = static_cast<double>(r.count) / r.trials;
    if (need_a)
      a.add(static_cast<double>(r.count) * (r.count - 1) /
            (static_cast<double>(r.trials) * (r.trials - 1)));
    b.add(bi);
    b2.add(bi * bi);
  }
  s.sum_a = a.value();
  s.sum_b = b.value();
  s.sum_b2 = b2.value();
  s.n = data.size();
  return s;
}

inline double pooled_mean(const Dataset& data) {
  KahanSum num, den;
  for (const auto& r : data.records()) {
    num.add(r.count);
    den.add(r.trials);
  }
  return num.value() / den.value();
}
}  // namespace detail

// Unbiased variance estimator, Eq.-(36)-style U-statistic with the
// varying-trials kernel.
inline double stat_vhat(const Dataset& data) {
  if (data.size() < 2) throw std::invalid_argument("stat_vhat: requires n >= 2");
  const auto s = detail::ustat_sums(data, true);
  const double n = static_cast<double>(s.n);
  return ((n - 1.0) * s.sum_a - (sq(s.sum_b) - s.sum_b2)) / (n * (n - 1.0));
}

// Unbiased estimator of mu_{m_1(pi)} = m_1 (1 - m_1).
inline double stat_muhat(const Dataset& data) {
  if (data.size() < 2)
    throw std::invalid_argument("stat_muhat: requires n >= 2");
  const auto s = detail::ustat_sums(data, false);
  const double n = static_cast<double>(s.n);
  return ((n - 1.0) * s.sum_b - (sq(s.sum_b) - s.sum_b2)) / (n * (n - 1.0));
}

// Modified Cochran statistic: V~ / max(mu_{m^1}, gamma) with the trials
// folded into V~ (varying-trials form; reduces to t V~/mu for equal t).
inline double stat_cochran_modified(const Dataset& data,
                                    double gamma = kDefaultGamma) {
  if (data.size() < 2)
    throw std::invalid_argument("stat_cochran_modified: requires n >= 2");
  const double m1 = detail::pooled_mean(data);
  KahanSum s;
  for (const auto& r : data.records())
    s.add(r.trials * sq(static_cast<double>(r.count) / r.trials - m1));
  const double vtilde = s.value() / (static_cast<double>(data.size()) - 1.0);
  return vtilde / std::max(bernoulli_var(m1), gamma);
}

// Debiased Cochran (V.1): V^ / max(mu_{m^1}, gamma).
inline double stat_debiased_cochran_v1(const Dataset& data,
                                       double gamma = kDefaultGamma) {
  const double m1 = detail::pooled_mean(data);
  return stat_vhat(data) / std::max(bernoulli_var(m1), gamma);
}

// Debiased Cochran (V.2): V^ / max(mu^, gamma).
inline double stat_debiased_cochran_v2(const Dataset& data,
                                       double gamma = kDefaultGamma) {
  return stat_vhat(data) / std::max(stat_muhat(data), gamma);
}

// --- Registry ---------------------------------------------------------------

enum class NullKind { Mixing, Point, Composite };

struct StatisticInfo {
  std::string id;
  NullKind null_kind;
  // Evaluate on a dataset against a null; gamma feeds the truncated forms.
  std::function<double(const Dataset&, const NullSpec&, double gamma)> eval;
};

inline const std::vector<StatisticInfo>& statistic_registry();

inline const StatisticInfo& find_statistic(const std::string& id) {
  for (const auto& s : statistic_registry())
    if (s.id == id) return s;
  std::ostringstream msg;
  msg << "unknown statistic id '" << id << "'; known ids:";
  for (const auto& s : statistic_registry()) msg << " " << s.id;
  throw std::invalid_argument(msg.str());
}

}  // namespace binomix
