#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "binomix/numeric.hpp"
#include "binomix/parallel.hpp"
#include "binomix/registry.hpp"

namespace binomix {

// Calibrated 1-alpha threshold(s) for a named statistic under a null spec.
//
// upper_env[k] is the max over calibration grid points of the (B-k)-th
// ascending order statistic of the simulated values (for simple nulls the
// grid is a single point, so upper_env is just the sims sorted
// descending). It both yields the conservative threshold (the
// ceil(B(1-alpha)) order statistic, maximized over the grid) and the
// add-one Monte-Carlo p-value sup over the null grid.
struct QuantileTable {
  std::string statistic;
  NullSpec null;
  double alpha = 0.05;
  std::size_t replicates = 0;  // B
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<int> trials_profile;
  double threshold = 0.0;
  std::vector<std::pair<double, double>> grid;  // composite: (p0, threshold)
  std::vector<double> upper_env;                // length B, nonincreasing
  double gamma = kDefaultGamma;
  int grid_size = 0;

  // (1 + #{sim >= obs}) / (B + 1), maximized over the null grid.
  double p_value(double observed) const {
    const auto it = std::partition_point(
        upper_env.begin(), upper_env.end(),
        [observed](double v) { return v >= observed; });
    const auto exceed = static_cast<std::size_t>(it - upper_env.begin());
    return static_cast<double>(1 + exceed) /
           static_cast<double>(replicates + 1);
  }
};

// Test outcome plus calibration provenance. Rejection is decided by the
// add-one Monte-Carlo p-value (exactly valid for atomic statistics; see
// README), with the conservative order-statistic threshold reported
// alongside.
struct TestReport {
  std::string statistic;
  double value = 0.0;
  double threshold = 0.0;
  bool reject = false;
  double p_value = 1.0;
  double alpha = 0.05;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  int grid_size = 0;
  std::vector<TestReport> components;
};

namespace detail {

inline std::size_t threshold_order_index(std::size_t B, double alpha) {
  // 1-indexed ceil(B(1-alpha)) ascending order statistic.
  const double raw = std::ceil(static_cast<double>(B) * (1.0 - alpha));
  const auto idx = static_cast<std::size_t>(raw);
  return std::min(std::max<std::size_t>(idx, 1), B);
}

inline const MixingDistribution null_mixing(const NullSpec& null) {
  if (const auto* m = std::get_if<MixingNull>(&null)) return m->pi0;
  if (const auto* p = std::get_if<PointNull>(&null))
    return MixingDistribution::point_mass(p->p0);
  throw std::invalid_argument(
      "calibrate_simple: composite nulls use calibrate_composite_pointmass");
}

inline void check_calibration_args(double alpha, std::size_t B) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("calibration: alpha must be in (0,1)");
  if (B < 100)
    throw std::invalid_argument("calibration: need at least 100 replicates");
}

}  // namespace detail

// Calibrates several statistics on one stream of simulated null datasets.
// Replicate r always uses the stream derive_seed(seed, r), so results are
// independent of the thread count and shared across statistics.
inline std::vector<QuantileTable> calibrate_simple_many(
    const std::vector<std::string>& statistic_ids, const NullSpec& null,
    std::size_t n, const std::vector<int>& trials_profile, double alpha,
    std::size_t B, std::uint64_t seed, double gamma = kDefaultGamma,
    int threads = 1) {
  detail::check_calibration_args(alpha, B);
  if (trials_profile.size() != n)
    throw std::invalid_argument("calibration: trials profile length != n");
  const MixingDistribution pi0 = detail::null_mixing(null);
  const std::size_t S = statistic_ids.size();
  std::vector<const StatisticInfo*> stats;
  stats.reserve(S);
  for (const auto& id : statistic_ids) stats.push_back(&find_statistic(id));
  std::vector<std::vector<double>> values(S, std::vector<double>(B));
  parallel_for(B, threads, [&](std::size_t r) {
    const Dataset data =
        sample_profile(pi0, trials_profile, derive_seed(seed, r));
    for (std::size_t s = 0; s < S; ++s)
      values[s][r] = stats[s]->eval(data, null, gamma);
  });
  std::vector<QuantileTable> tables(S);
  const std::size_t idx = detail::threshold_order_index(B, alpha);
  for (std::size_t s = 0; s < S; ++s) {
    auto& tab = tables[s];
    std::sort(values[s].begin(), values[s].end(), std::greater<double>());
    tab.statistic = statistic_ids[s];
    tab.null = null;
    tab.alpha = alpha;
    tab.replicates = B;
    tab.seed = seed;
    tab.n = n;
    tab.trials_profile = trials_profile;
    tab.upper_env = std::move(values[s]);
    tab.threshold = tab.upper_env[B - idx];
    tab.gamma = gamma;
  }
  return tables;
}

inline QuantileTable calibrate_simple(const std::string& statistic_id,
                                      const NullSpec& null, std::size_t n,
                                      const std::vector<int>& trials_profile,
                                      double alpha, std::size_t B,
                                      std::uint64_t seed,
                                      double gamma = kDefaultGamma,
                                      int threads = 1) {
  return std::move(calibrate_simple_many({statistic_id}, null, n,
                                         trials_profile, alpha, B, seed, gamma,
                                         threads)[0]);
}

// Sup-over-S calibration on a point-mass grid p0 in {0, 1/(G-1), ..., 1}.
// Thresholds are computed for the left half and mirrored (every composite
// statistic here is invariant under x -> t - x, p0 -> 1 - p0); replicate
// streams are shared across grid points so refinement is comparable.
inline std::vector<QuantileTable> calibrate_composite_pointmass_many(
    const std::vector<std::string>& statistic_ids, int grid_size,
    std::size_t n, const std::vector<int>& trials_profile, double alpha,
    std::size_t B, std::uint64_t seed, double gamma = kDefaultGamma,
    int threads = 1) {
  detail::check_calibration_args(alpha, B);
  if (grid_size < 3)
    throw std::invalid_argument("calibrate_composite_pointmass: G must be >= 3");
  if (trials_profile.size() != n)
    throw std::invalid_argument("calibration: trials profile length != n");
  const std::size_t S = statistic_ids.size();
  std::vector<const StatisticInfo*> stats;
  for (const auto& id : statistic_ids) stats.push_back(&find_statistic(id));
  const int half = grid_size / 2;  // indices 0..half cover p0 <= 1/2
  // env[s][k] and per-point thresholds for the computed half.
  std::vector<std::vector<double>> env(S, std::vector<double>(B, -1e300));
  std::vector<std::vector<double>> point_thr(S,
                                             std::vector<double>(half + 1));
  const std::size_t idx = detail::threshold_order_index(B, alpha);
  std::vector<std::vector<double>> values(S, std::vector<double>(B));
  for (int g = 0; g <= half; ++g) {
    const double p0 = static_cast<double>(g) / (grid_size - 1);
    const MixingDistribution pi0 = MixingDistribution::point_mass(p0);
    const NullSpec point_null = PointNull(p0);
    parallel_for(B, threads, [&](std::size_t r) {
      const Dataset data =
          sample_profile(pi0, trials_profile, derive_seed(seed, r));
      for (std::size_t s = 0; s < S; ++s)
        values[s][r] = stats[s]->eval(data, point_null, gamma);
    });
    for (std::size_t s = 0; s < S; ++s) {
      std::sort(values[s].begin(), values[s].end(), std::greater<double>());
      for (std::size_t k = 0; k < B; ++k)
        env[s][k] = std::max(env[s][k], values[s][k]);
      point_thr[s][g] = values[s][B - idx];
    }
  }
  std::vector<QuantileTable> tables(S);
  for (std::size_t s = 0; s < S; ++s) {
    auto& tab = tables[s];
    tab.statistic = statistic_ids[s];
    tab.null = CompositePointMassNull{};
    tab.alpha = alpha;
    tab.replicates = B;
    tab.seed = seed;
    tab.n = n;
    tab.trials_profile = trials_profile;
    tab.gamma = gamma;
    tab.grid_size = grid_size;
    tab.upper_env = env[s];
    tab.grid.resize(grid_size);
    double max_thr = -1e300;
    for (int g = 0; g < grid_size; ++g) {
      const double p0 = static_cast<double>(g) / (grid_size - 1);
      const int src = std::min(g, grid_size - 1 - g);
      tab.grid[g] = {p0, point_thr[s][src]};
      max_thr = std::max(max_thr, point_thr[s][src]);
    }
    tab.threshold = max_thr;
  }
  return tables;
}

inline QuantileTable calibrate_composite_pointmass(
    const std::string& statistic_id, int grid_size, std::size_t n,
    const std::vector<int>& trials_profile, double alpha, std::size_t B,
    std::uint64_t seed, double gamma = kDefaultGamma, int threads = 1) {
  return std::move(calibrate_composite_pointmass_many(
      {statistic_id}, grid_size, n, trials_profile, alpha, B, seed, gamma,
      threads)[0]);
}

// Evaluates the statistic on the data and decides via the table.
inline TestReport run_test(const std::string& statistic_id, const Dataset& data,
                           const QuantileTable& table) {
  if (statistic_id != table.statistic)
    throw std::invalid_argument("run_test: table was calibrated for '" +
                                table.statistic + "'");
  if (data.size() != table.n || data.trials_profile() != table.trials_profile)
    throw std::invalid_argument(
        "run_test: dataset (n, trials profile) does not match the table");
  const auto& stat = find_statistic(statistic_id);
  TestReport rep;
  rep.statistic = statistic_id;
  rep.value = stat.eval(data, table.null, table.gamma);
  rep.threshold = table.threshold;
  rep.p_value = table.p_value(rep.value);
  rep.alpha = table.alpha;
  rep.reject = rep.p_value <= table.alpha;
  rep.replicates = table.replicates;
  rep.seed = table.seed;
  rep.grid_size = table.grid_size;
  return rep;
}

namespace detail {
inline TestReport combine_bonferroni(std::string name, TestReport a,
                                     TestReport b, double alpha) {
  TestReport rep;
  rep.statistic = std::move(name);
  rep.alpha = alpha;
  rep.reject = a.reject || b.reject;
  rep.p_value = std::min(1.0, 2.0 * std::min(a.p_value, b.p_value));
  rep.value = std::max(a.value - a.threshold, b.value - b.threshold);
  rep.threshold = 0.0;
  rep.replicates = a.replicates;
  rep.seed = a.seed;
  rep.components.push_back(std::move(a));
  rep.components.push_back(std::move(b));
  return rep;
}
}  // namespace detail

// Local minimax test: Bonferroni combination of the mean test and the
// debiased l2 test, each at level alpha/2.
inline TestReport run_local_minimax(const Dataset& data, double p0,
                                    double alpha, std::size_t B,
                                    std::uint64_t seed,
                                    double gamma = kDefaultGamma,
                                    int threads = 1) {
  const NullSpec null = PointNull(p0);
  const auto profile = data.trials_profile();
  auto tables =
      calibrate_simple_many({"mean_t1", "debiased_l2_t2"}, null, data.size(),
                            profile, alpha / 2.0, B, seed, gamma, threads);
  TestReport t1 = run_test("mean_t1", data, tables[0]);
  TestReport t2 = run_test("debiased_l2_t2", data, tables[1]);
  return detail::combine_bonferroni("local_minimax", std::move(t1),
                                    std::move(t2), alpha);
}

// Global minimax test: Bonferroni combination of the debiased Pearson and
// W1 plug-in tests, each at level alpha/2.
inline TestReport run_global_minimax(const Dataset& data,
                                     const MixingDistribution& pi0,
                                     double alpha, std::size_t B,
                                     std::uint64_t seed,
                                     double gamma = kDefaultGamma,
                                     int threads = 1) {
  const NullSpec null = MixingNull{pi0};
  const auto profile = data.trials_profile();
  auto tables = calibrate_simple_many({"debiased_pearson", "w1_plugin"}, null,
                                      data.size(), profile, alpha / 2.0, B,
                                      seed, gamma, threads);
  TestReport ta = run_test("debiased_pearson", data, tables[0]);
  TestReport tb = run_test("w1_plugin", data, tables[1]);
  return detail::combine_bonferroni("global_minimax", std::move(ta),
                                    std::move(tb), alpha);
}

// Asymptotic Cochran test: modified Cochran statistic against
// chi^2_{n-1,alpha}/(n-1); no Monte Carlo.
inline TestReport cochran_asymptotic_test(const Dataset& data, double alpha,
                                          double gamma = kDefaultGamma) {
  if (data.size() < 2)
    throw std::invalid_argument("cochran_asymptotic_test: requires n >= 2");
  const int dof = static_cast<int>(data.size()) - 1;
  TestReport rep;
  rep.statistic = "cochran_asymptotic";
  rep.alpha = alpha;
  rep.value = stat_cochran_modified(data, gamma);
  rep.threshold = chi2_quantile(dof, 1.0 - alpha) / dof;
  rep.reject = rep.value >= rep.threshold;
  rep.p_value = chi2_sf(dof, dof * rep.value);
  return rep;
}

// --- Confidence-interval inversion ------------------------------------------

struct ConfidenceInterval {
  bool rejected_all = false;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t accepted_points = 0;
  bool non_interval_accept_set = false;  // hulled with a warning when true
  int grid_size = 0;
};

// Precomputes the per-grid-point calibrations for the local-minimax family
// once, then inverts any number of datasets sharing (n, trials profile).
class CiInverter {
 public:
  CiInverter(std::size_t n, std::vector<int> trials_profile, double alpha,
             std::size_t B, std::uint64_t seed, int grid_size = 201,
             double gamma = kDefaultGamma, int threads = 1)
      : alpha_(alpha), grid_size_(grid_size) {
    if (grid_size < 2)
      throw std::invalid_argument("CiInverter: grid must have >= 2 points");
    grid_.resize(grid_size);
    tables_t1_.resize(grid_size);
    tables_t2_.resize(grid_size);
    std::vector<std::size_t> order(grid_size);
    for (int g = 0; g < grid_size; ++g) {
      grid_[g] = static_cast<double>(g) / (grid_size - 1);
      order[g] = g;
    }
    // Grid points are independent; parallelize across them while each
    // point's replicate streams stay keyed by (seed, g, r)... they are
    // keyed by (seed, r) so the same draws recur at every p0.
    parallel_for(grid_size, threads, [&](std::size_t g) {
      const NullSpec null = PointNull(grid_[g]);
      auto tabs = calibrate_simple_many(
          {"mean_t1", "debiased_l2_t2"}, null, n, trials_profile, alpha / 2.0,
          B, seed, gamma, 1);
      tables_t1_[g] = std::move(tabs[0]);
      tables_t2_[g] = std::move(tabs[1]);
    });
  }

  ConfidenceInterval invert(const Dataset& data) const {
    ConfidenceInterval ci;
    ci.grid_size = grid_size_;
    std::vector<char> accepted(grid_size_, 0);
    for (int g = 0; g < grid_size_; ++g) {
      const TestReport t1 = run_test("mean_t1", data, tables_t1_[g]);
      const TestReport t2 = run_test("debiased_l2_t2", data, tables_t2_[g]);
      accepted[g] = !(t1.reject || t2.reject);
    }
    int first = -1, last = -1;
    std::size_t count = 0;
    for (int g = 0; g < grid_size_; ++g) {
      if (!accepted[g]) continue;
      if (first < 0) first = g;
      last = g;
      ++count;
    }
    if (count == 0) {
      ci.rejected_all = true;
      return ci;
    }
    ci.accepted_points = count;
    ci.lower = grid_[first];
    ci.upper = grid_[last];
    ci.non_interval_accept_set =
        count != static_cast<std::size_t>(last - first + 1);
    return ci;
  }

  const std::vector<double>& grid() const { return grid_; }

 private:
  double alpha_;
  int grid_size_;
  std::vector<double> grid_;
  std::vector<QuantileTable> tables_t1_;
  std::vector<QuantileTable> tables_t2_;
};

// One-shot inversion of the local-minimax homogeneity test.
inline ConfidenceInterval invert_ci(const Dataset& data, double alpha,
                                    std::size_t B, std::uint64_t seed,
                                    int grid_size = 201,
                                    double gamma = kDefaultGamma,
                                    int threads = 1) {
  CiInverter inv(data.size(), data.trials_profile(), alpha, B, seed, grid_size,
                 gamma, threads);
  return inv.invert(data);
}

}  // namespace binomix
