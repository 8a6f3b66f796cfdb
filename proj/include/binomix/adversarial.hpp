#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "binomix/common.hpp"
#include "binomix/lp.hpp"
#include "binomix/mixture.hpp"

namespace binomix {

// --- Closed-form alternative families ---------------------------------------

struct DistributionPair {
  MixingDistribution pi0;
  MixingDistribution pi1;
};

// pi0 = (d_0 + d_1)/2, pi1 = (1/2 - eps) d_0 + (1/2 + eps) d_1; W1 = eps.
inline DistributionPair prob_perturb(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5))
    throw std::invalid_argument("prob_perturb: eps must lie in [0, 1/2]");
  MixingDistribution pi0({0.0, 1.0}, {0.5, 0.5});
  MixingDistribution pi1 =
      MixingDistribution::from_unnormalized({0.0, 1.0}, {0.5 - eps, 0.5 + eps});
  return {std::move(pi0), std::move(pi1)};
}

// d_{p0 + eps}; W1 to d_{p0} equals eps.
inline MixingDistribution mean_shift(double p0, double eps) {
  if (!(p0 >= 0.0 && p0 <= 1.0))
    throw std::invalid_argument("mean_shift: p0 outside [0,1]");
  if (!(eps >= 0.0 && eps <= 1.0 - p0))
    throw std::invalid_argument("mean_shift: eps outside [0, 1-p0]");
  return MixingDistribution::point_mass(p0 + eps);
}

// (d_{p0+eps} + d_{p0-eps})/2; matches the null mean, V = eps^2, W1 = eps.
inline MixingDistribution mean_matched(double p0, double eps) {
  if (!(p0 >= 0.0 && p0 <= 1.0))
    throw std::invalid_argument("mean_matched: p0 outside [0,1]");
  if (!(eps >= 0.0 && eps <= std::min(p0, 1.0 - p0)))
    throw std::invalid_argument("mean_matched: eps outside [0, min(p0,1-p0)]");
  return MixingDistribution::from_unnormalized({p0 - eps, p0 + eps},
                                               {0.5, 0.5});
}

// (1-eps) d_{p0} + eps d_1; W1 to d_{p0} equals eps (1 - p0).
inline MixingDistribution mass_leak(double p0, double eps) {
  if (!(p0 >= 0.0 && p0 <= 1.0))
    throw std::invalid_argument("mass_leak: p0 outside [0,1]");
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("mass_leak: eps outside [0,1]");
  return MixingDistribution::from_unnormalized({p0, 1.0}, {1.0 - eps, eps});
}

// --- Moment-matching pair ----------------------------------------------------

struct MomentMatchPair {
  MixingDistribution pi0;
  MixingDistribution pi1;
  double w1_distance = 0.0;
  double construction_constant = 0.0;  // achieved c = W1 * k
  double lp_optimum = 0.0;             // witness-LP value on the 2001-point grid
  double max_moment_gap = 0.0;         // max |m_l(pi0) - m_l(pi1)|, l <= k
};

namespace detail {

// Value of the witness LP: maximize E_{mu1}|x-c| - E_{mu0}|x-c| over pairs
// on a uniform grid sharing their first k moments. Solved in the shifted
// Chebyshev basis for conditioning.
inline double moment_match_witness_lp(int k, double center, double halfwidth,
                                      std::size_t grid_size = 2001) {
  const std::size_t G = grid_size;
  std::vector<double> y(G);
  for (std::size_t i = 0; i < G; ++i)
    y[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(G - 1);
  // Chebyshev values T_l(y_i), l = 1..k.
  std::vector<std::vector<double>> T(k + 1, std::vector<double>(G));
  for (std::size_t i = 0; i < G; ++i) {
    T[0][i] = 1.0;
    if (k >= 1) T[1][i] = y[i];
    for (int l = 2; l <= k; ++l)
      T[l][i] = 2.0 * y[i] * T[l - 1][i] - T[l - 2][i];
  }
  const std::size_t ncols = 2 * G;  // mu1 then mu0
  std::vector<std::vector<double>> A(k + 2, std::vector<double>(ncols, 0.0));
  std::vector<double> b(k + 2, 0.0);
  std::vector<double> c(ncols, 0.0);
  for (int l = 1; l <= k; ++l)
    for (std::size_t i = 0; i < G; ++i) {
      A[l - 1][i] = T[l][i];
      A[l - 1][G + i] = -T[l][i];
    }
  for (std::size_t i = 0; i < G; ++i) A[k][i] = 1.0;
  for (std::size_t i = 0; i < G; ++i) A[k + 1][G + i] = 1.0;
  b[k] = 1.0;
  b[k + 1] = 1.0;
  for (std::size_t i = 0; i < G; ++i) {
    c[i] = -std::abs(y[i]);  // maximize -> minimize negative
    c[G + i] = std::abs(y[i]);
  }
  auto res = solve_lp(std::move(A), std::move(b), std::move(c));
  if (!res.feasible || !res.bounded)
    throw std::runtime_error("moment_match_pair: witness LP failed");
  return -res.objective * halfwidth;
}

}  // namespace detail

// Two distributions on [center-halfwidth, center+halfwidth] sharing their
// first k moments with W1 >= c/k. Construction: the divided-difference
// null-space weights on the k+2 Chebyshev extrema of T_{k+1} (computed in
// log space), split into positive and negative parts. The witness LP is
// the normative check: the achieved W1 must reach half its optimum.
inline MomentMatchPair moment_match_pair(int k, double center = 0.5,
                                         double halfwidth = 0.5,
                                         bool verify = true) {
  if (k < 1) throw std::invalid_argument("moment_match_pair: k must be >= 1");
  if (k > 40)
    throw std::invalid_argument(
        "moment_match_pair: construction is ill-conditioned beyond k = 40");
  if (center - halfwidth < -1e-15 || center + halfwidth > 1.0 + 1e-15 ||
      halfwidth <= 0.0)
    throw std::invalid_argument(
        "moment_match_pair: interval must sit inside [0,1]");

  constexpr double kPi = 3.14159265358979323846;
  const int m = k + 2;  // Chebyshev extrema of T_{k+1}
  std::vector<double> nodes(m);
  for (int j = 0; j < m; ++j)
    nodes[j] = center - halfwidth * std::cos(kPi * j / (k + 1));
  // Divided-difference weights 1/prod_{i != j}(x_j - x_i) in log space;
  // scale-free after the split-and-normalize below.
  std::vector<double> logw(m, 0.0);
  std::vector<double> sign(m, 1.0);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      const double d = nodes[j] - nodes[i];
      logw[j] -= std::log(std::abs(d));
      if (d < 0.0) sign[j] = -sign[j];
    }
  }
  const double shift = *std::max_element(logw.begin(), logw.end());
  std::vector<double> sup0, w0, sup1, w1v;
  for (int j = 0; j < m; ++j) {
    const double v = std::exp(logw[j] - shift);
    const double x = std::min(1.0, std::max(0.0, nodes[j]));
    if (sign[j] > 0.0) {
      sup1.push_back(x);
      w1v.push_back(v);
    } else {
      sup0.push_back(x);
      w0.push_back(v);
    }
  }
  MomentMatchPair out{
      MixingDistribution::from_unnormalized(std::move(sup0), std::move(w0)),
      MixingDistribution::from_unnormalized(std::move(sup1), std::move(w1v)),
      0.0, 0.0, 0.0, 0.0};
  out.w1_distance = w1(out.pi0, out.pi1);
  out.construction_constant = out.w1_distance * k;
  const auto m0 = moments(out.pi0, k);
  const auto m1 = moments(out.pi1, k);
  for (int l = 0; l < k; ++l)
    out.max_moment_gap = std::max(out.max_moment_gap, std::abs(m0[l] - m1[l]));
  if (out.max_moment_gap > 1e-9)
    throw std::runtime_error(
        "moment_match_pair: numerical failure, moment gap exceeds 1e-9");
  if (verify) {
    out.lp_optimum = detail::moment_match_witness_lp(k, center, halfwidth);
    if (out.w1_distance < 0.5 * out.lp_optimum)
      throw std::runtime_error(
          "moment_match_pair: achieved W1 fell below half the witness-LP "
          "optimum");
  }
  return out;
}

// --- Family abstraction for sweeps ------------------------------------------

enum class FamilyKind { ProbPerturb, MeanShift, MeanMatched, MassLeak,
                        MomentMatchPairFamily };

inline FamilyKind family_from_name(const std::string& name) {
  if (name == "prob-perturb") return FamilyKind::ProbPerturb;
  if (name == "mean-shift") return FamilyKind::MeanShift;
  if (name == "mean-matched") return FamilyKind::MeanMatched;
  if (name == "mass-leak") return FamilyKind::MassLeak;
  if (name == "moment-match") return FamilyKind::MomentMatchPairFamily;
  throw std::invalid_argument(
      "unknown family '" + name +
      "'; known: prob-perturb mean-shift mean-matched mass-leak moment-match");
}

inline std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::ProbPerturb: return "prob-perturb";
    case FamilyKind::MeanShift: return "mean-shift";
    case FamilyKind::MeanMatched: return "mean-matched";
    case FamilyKind::MassLeak: return "mass-leak";
    case FamilyKind::MomentMatchPairFamily: return "moment-match";
  }
  return "?";
}

// A simulation family: a null distribution plus alternatives indexed by
// their W1 separation from it.
class Family {
 public:
  Family(FamilyKind kind, double p0 = 0.5, int k = 4)
      : kind_(kind), p0_(p0), k_(k) {
    if (kind_ == FamilyKind::MomentMatchPairFamily) {
      auto pair = moment_match_pair(k_);
      base_pair_ = std::make_shared<MomentMatchPair>(std::move(pair));
    }
  }

  FamilyKind kind() const { return kind_; }
  double p0() const { return p0_; }
  int order() const { return k_; }

  MixingDistribution null_distribution() const {
    switch (kind_) {
      case FamilyKind::ProbPerturb:
        return MixingDistribution({0.0, 1.0}, {0.5, 0.5});
      case FamilyKind::MomentMatchPairFamily:
        return base_pair_->pi0;
      default:
        return MixingDistribution::point_mass(p0_);
    }
  }

  // Largest representable W1 separation.
  double eps_max() const {
    switch (kind_) {
      case FamilyKind::ProbPerturb: return 0.5;
      case FamilyKind::MeanShift: return 1.0 - p0_;
      case FamilyKind::MeanMatched: return std::min(p0_, 1.0 - p0_);
      case FamilyKind::MassLeak: return 1.0 - p0_;
      case FamilyKind::MomentMatchPairFamily: return base_pair_->w1_distance;
    }
    return 0.0;
  }

  // Alternative at W1 separation eps from the null.
  MixingDistribution alternative(double eps) const {
    if (eps < 0.0 || eps > eps_max() + 1e-12)
      throw std::invalid_argument("Family: separation outside legal range");
    if (eps == 0.0) return null_distribution();
    switch (kind_) {
      case FamilyKind::ProbPerturb:
        return prob_perturb(eps).pi1;
      case FamilyKind::MeanShift:
        return mean_shift(p0_, eps);
      case FamilyKind::MeanMatched:
        return mean_matched(p0_, eps);
      case FamilyKind::MassLeak:
        return mass_leak(p0_, eps / (1.0 - p0_));
      case FamilyKind::MomentMatchPairFamily: {
        // CDF interpolation toward pi1 scales W1 linearly and preserves
        // the k matched moments at every step.
        const double lam = eps / base_pair_->w1_distance;
        std::vector<double> sup = base_pair_->pi0.support();
        std::vector<double> w = base_pair_->pi0.weights();
        for (auto& v : w) v *= (1.0 - lam);
        for (std::size_t i = 0; i < base_pair_->pi1.num_atoms(); ++i) {
          sup.push_back(base_pair_->pi1.support()[i]);
          w.push_back(lam * base_pair_->pi1.weights()[i]);
        }
        return MixingDistribution::from_unnormalized(std::move(sup),
                                                     std::move(w));
      }
    }
    throw std::logic_error("Family: unreachable");
  }

 private:
  FamilyKind kind_;
  double p0_;
  int k_;
  std::shared_ptr<MomentMatchPair> base_pair_;
};

}  // namespace binomix
