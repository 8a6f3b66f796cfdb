#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "binomix/common.hpp"
#include "binomix/rng.hpp"

namespace binomix {

// Finitely supported probability measure on [0,1]. Immutable after
// construction; support is strictly increasing, weights are positive and
// sum to one. Atoms closer than kAtomMergeTol are merged.
class MixingDistribution {
 public:
  static constexpr double kAtomMergeTol = 1e-12;
  static constexpr double kWeightSumTol = 1e-12;

  MixingDistribution(std::vector<double> support, std::vector<double> weights)
      : MixingDistribution(std::move(support), std::move(weights), true) {}

  // Rescales any nonnegative weight vector with positive total mass.
  static MixingDistribution from_unnormalized(std::vector<double> support,
                                              std::vector<double> weights) {
    return MixingDistribution(std::move(support), std::move(weights), false);
  }

  static MixingDistribution point_mass(double p) {
    return MixingDistribution({p}, {1.0});
  }

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t num_atoms() const { return support_.size(); }

  double mean() const {
    KahanSum s;
    for (std::size_t k = 0; k < support_.size(); ++k)
      s.add(weights_[k] * support_[k]);
    return s.value();
  }

  double variance() const {
    const double m1 = mean();
    KahanSum s;
    for (std::size_t k = 0; k < support_.size(); ++k)
      s.add(weights_[k] * sq(support_[k] - m1));
    return std::max(0.0, s.value());
  }

  // CDF evaluated from the right-continuous convention F(x) = pi([0, x]).
  double cdf(double x) const {
    KahanSum s;
    for (std::size_t k = 0; k < support_.size() && support_[k] <= x; ++k)
      s.add(weights_[k]);
    return s.value();
  }

  // Smallest median (left tie-break).
  double median() const {
    KahanSum s;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      s.add(weights_[k]);
      if (s.value() >= 0.5 - 1e-15) return support_[k];
    }
    return support_.back();
  }

  bool operator==(const MixingDistribution& o) const {
    return support_ == o.support_ && weights_ == o.weights_;
  }

 private:
  MixingDistribution(std::vector<double> support, std::vector<double> weights,
                     bool strict) {
    if (support.size() != weights.size() || support.empty())
      throw std::invalid_argument(
          "MixingDistribution: support/weights must be nonempty and equal "
          "length");
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] >= 0.0))
        throw std::invalid_argument("MixingDistribution: negative weight");
      if (support[i] < 0.0 || support[i] > 1.0)
        throw std::invalid_argument(
            "MixingDistribution: support point outside [0,1]");
      total += weights[i];
    }
    if (strict && std::abs(total - 1.0) > kWeightSumTol)
      throw std::invalid_argument(
          "MixingDistribution: weights must sum to 1 within 1e-12");
    if (!(total > 0.0))
      throw std::invalid_argument("MixingDistribution: zero total mass");
    for (std::size_t idx : order) {
      const double x = support[idx];
      const double w = weights[idx] / total;
      if (w == 0.0) continue;
      if (!support_.empty() && x - support_.back() < kAtomMergeTol) {
        weights_.back() += w;
      } else {
        support_.push_back(x);
        weights_.push_back(w);
      }
    }
    if (support_.empty())
      throw std::invalid_argument("MixingDistribution: all weights zero");
  }

  std::vector<double> support_;
  std::vector<double> weights_;
};

// One observation: x successes out of t trials.
struct Record {
  int count;
  int trials;
};

inline bool operator==(const Record& a, const Record& b) {
  return a.count == b.count && a.trials == b.trials;
}

// Sequence of (x_i, t_i) records; nonempty, 0 <= x_i <= t_i.
class Dataset {
 public:
  explicit Dataset(std::vector<Record> records) : records_(std::move(records)) {
    if (records_.empty()) throw std::invalid_argument("Dataset: empty");
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      if (r.trials < 1 || r.count < 0 || r.count > r.trials) {
        std::ostringstream msg;
        msg << "Dataset: record " << i << " violates 0 <= x <= t (x="
            << r.count << ", t=" << r.trials << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }

  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const Record& operator[](std::size_t i) const { return records_[i]; }

  // Common trial count, if all records share one.
  std::optional<int> homogeneous_trials() const {
    int t = records_.front().trials;
    for (const auto& r : records_)
      if (r.trials != t) return std::nullopt;
    return t;
  }

  int min_trials() const {
    int t = records_.front().trials;
    for (const auto& r : records_) t = std::min(t, r.trials);
    return t;
  }

  int max_trials() const {
    int t = records_.front().trials;
    for (const auto& r : records_) t = std::max(t, r.trials);
    return t;
  }

  std::vector<int> trials_profile() const {
    std::vector<int> out(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) out[i] = records_[i].trials;
    return out;
  }

  bool operator==(const Dataset& o) const { return records_ == o.records_; }

 private:
  std::vector<Record> records_;
};

// Pair (t, pi); the marginal measure P_pi over {0,...,t}.
class BinomialMixtureModel {
 public:
  BinomialMixtureModel(int trials, MixingDistribution mixing)
      : trials_(trials), mixing_(std::move(mixing)) {
    if (trials_ < 1)
      throw std::invalid_argument("BinomialMixtureModel: trials must be >= 1");
  }

  int trials() const { return trials_; }
  const MixingDistribution& mixing() const { return mixing_; }

 private:
  int trials_;
  MixingDistribution mixing_;
};

// Expected fingerprint b_{j,t}(pi) for j = 0..t.
inline std::vector<double> marginal_pmf(const BinomialMixtureModel& model) {
  const int t = model.trials();
  const auto& sup = model.mixing().support();
  const auto& w = model.mixing().weights();
  std::vector<double> pmf(t + 1, 0.0);
  for (int j = 0; j <= t; ++j) {
    KahanSum s;
    for (std::size_t k = 0; k < sup.size(); ++k)
      s.add(w[k] * binom_pmf(t, j, sup[k]));
    pmf[j] = s.value();
  }
  return pmf;
}

// m_l(pi) for l = 1..L.
inline std::vector<double> moments(const MixingDistribution& pi, int L) {
  if (L < 1) throw std::invalid_argument("moments: L must be >= 1");
  std::vector<double> out(L);
  std::vector<double> pw(pi.support().begin(), pi.support().end());
  for (int l = 1; l <= L; ++l) {
    KahanSum s;
    for (std::size_t k = 0; k < pw.size(); ++k) {
      if (l > 1) pw[k] *= pi.support()[k];
      s.add(pi.weights()[k] * pw[k]);
    }
    out[l - 1] = s.value();
  }
  return out;
}

// Exact 1-Wasserstein distance: integral of |F0 - F1| over the merged
// support partition.
inline double w1(const MixingDistribution& pi0, const MixingDistribution& pi1) {
  const auto& s0 = pi0.support();
  const auto& s1 = pi1.support();
  std::size_t i = 0, j = 0;
  double F0 = 0.0, F1 = 0.0;
  double prev = 0.0;
  KahanSum total;
  while (i < s0.size() || j < s1.size()) {
    double x;
    if (j >= s1.size() || (i < s0.size() && s0[i] <= s1[j])) {
      x = s0[i];
    } else {
      x = s1[j];
    }
    total.add(std::abs(F0 - F1) * (x - prev));
    while (i < s0.size() && s0[i] <= x) F0 += pi0.weights()[i++];
    while (j < s1.size() && s1[j] <= x) F1 += pi1.weights()[j++];
    prev = x;
  }
  total.add(std::abs(F0 - F1) * (1.0 - prev));
  return total.value();
}

// min over p0 of W1(pi, delta_{p0}) together with the minimizing point
// (smallest median). The distance is what tests consume; the argmin is
// reporting-only.
struct PointMassProjection {
  double distance;
  double argmin;
};

inline PointMassProjection w1_to_pointmass_set(const MixingDistribution& pi) {
  const double m = pi.median();
  return {w1(pi, MixingDistribution::point_mass(m)), m};
}

// Total variation between two marginal measures on the same trial count.
inline double tv(const BinomialMixtureModel& a, const BinomialMixtureModel& b) {
  if (a.trials() != b.trials())
    throw std::invalid_argument("tv: trial-count mismatch");
  const auto pa = marginal_pmf(a);
  const auto pb = marginal_pmf(b);
  KahanSum s;
  for (std::size_t j = 0; j < pa.size(); ++j) s.add(std::abs(pa[j] - pb[j]));
  return 0.5 * s.value();
}

// chi^2(P_alt, P_null) = sum_j (alt_j - null_j)^2 / null_j.
inline double chi2_marginal(const BinomialMixtureModel& null_model,
                            const BinomialMixtureModel& alt_model) {
  if (null_model.trials() != alt_model.trials())
    throw std::invalid_argument("chi2_marginal: trial-count mismatch");
  const auto p0 = marginal_pmf(null_model);
  const auto p1 = marginal_pmf(alt_model);
  KahanSum s;
  for (std::size_t j = 0; j < p0.size(); ++j) {
    const double d = p1[j] - p0[j];
    if (d == 0.0) continue;
    if (p0[j] <= 0.0) {
      std::ostringstream msg;
      msg << "chi2_marginal: null pmf vanishes at cell j=" << j
          << " where alternative has mass";
      throw std::domain_error(msg.str());
    }
    s.add(d * d / p0[j]);
  }
  return s.value();
}

// J(pi) = integral of sqrt(F(1-F)); piecewise constant between atoms.
inline double j_functional(const MixingDistribution& pi) {
  const auto& sup = pi.support();
  const auto& w = pi.weights();
  KahanSum total;
  double F = 0.0;
  for (std::size_t k = 0; k < sup.size(); ++k) {
    F += w[k];
    const double hi = (k + 1 < sup.size()) ? sup[k + 1] : 1.0;
    const double f = std::min(std::max(F, 0.0), 1.0);
    total.add(std::sqrt(f * (1.0 - f)) * (hi - sup[k]));
  }
  return total.value();
}

// n i.i.d. draws from the model; deterministic given the seed.
inline Dataset sample(const BinomialMixtureModel& model, std::size_t n,
                      std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const auto& w = model.mixing().weights();
  std::vector<double> cum(w.size());
  KahanSum acc;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc.add(w[k]);
    cum[k] = acc.value();
  }
  cum.back() = 1.0;
  Rng rng(seed);
  std::vector<Record> rec(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = model.mixing().support()[rng.next_index(cum)];
    rec[i] = {rng.next_binomial(model.trials(), p), model.trials()};
  }
  return Dataset(std::move(rec));
}

// Same, with a per-record trials profile (used by calibration under
// heterogeneous designs).
inline Dataset sample_profile(const MixingDistribution& pi,
                              const std::vector<int>& trials_profile,
                              std::uint64_t seed) {
  if (trials_profile.empty())
    throw std::invalid_argument("sample_profile: empty trials profile");
  const auto& w = pi.weights();
  std::vector<double> cum(w.size());
  KahanSum acc;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc.add(w[k]);
    cum[k] = acc.value();
  }
  cum.back() = 1.0;
  Rng rng(seed);
  std::vector<Record> rec(trials_profile.size());
  for (std::size_t i = 0; i < trials_profile.size(); ++i) {
    const double p = pi.support()[rng.next_index(cum)];
    rec[i] = {rng.next_binomial(trials_profile[i], p), trials_profile[i]};
  }
  return Dataset(std::move(rec));
}

}  // namespace binomix
