#pragma once

#include "binomix/estimators.hpp"
#include "binomix/statistics.hpp"

namespace binomix {

// Stable statistic identifiers for CLI/JSON use. The dist_mle/dist_mom
// entries wrap the estimator-distance tests; they are far slower to
// calibrate than the rest (one grid fit per replicate).
inline const std::vector<StatisticInfo>& statistic_registry() {
  static const std::vector<StatisticInfo> registry = [] {
    std::vector<StatisticInfo> r;
    auto add = [&](std::string id, NullKind kind,
                   std::function<double(const Dataset&, const NullSpec&, double)>
                       fn) { r.push_back({std::move(id), kind, std::move(fn)}); };
    add("w1_plugin", NullKind::Mixing,
        [](const Dataset& d, const NullSpec& s, double) {
          return stat_w1_plugin(d, require_mixing_null(s));
        });
    add("debiased_pearson", NullKind::Mixing,
        [](const Dataset& d, const NullSpec& s, double) {
          return stat_debiased_pearson(d, require_mixing_null(s));
        });
    add("modified_pearson_gof", NullKind::Mixing,
        [](const Dataset& d, const NullSpec& s, double g) {
          return stat_modified_pearson_gof(d, require_mixing_null(s), g);
        });
    add("modified_lrt_gof", NullKind::Mixing,
        [](const Dataset& d, const NullSpec& s, double g) {
          return stat_modified_lrt_gof(d, require_mixing_null(s), g);
        });
    add("mean_t1", NullKind::Point,
        [](const Dataset& d, const NullSpec& s, double) {
          return stat_mean_t1(d, require_point_null(s));
        });
    add("debiased_l2_t2", NullKind::Point,
        [](const Dataset& d, const NullSpec& s, double) {
          return stat_debiased_l2_t2(d, require_point_null(s));
        });
    add("l2", NullKind::Point, [](const Dataset& d, const NullSpec& s, double) {
      return stat_l2(d, require_point_null(s));
    });
    add("modified_pearson_homog", NullKind::Point,
        [](const Dataset& d, const NullSpec& s, double) {
          return stat_modified_pearson_homog(d, require_point_null(s));
        });
    add("modified_lrt_homog", NullKind::Point,
        [](const Dataset& d, const NullSpec& s, double g) {
          return stat_modified_lrt_homog(d, require_point_null(s), g);
        });
    add("vhat", NullKind::Composite,
        [](const Dataset& d, const NullSpec&, double) { return stat_vhat(d); });
    add("cochran_modified", NullKind::Composite,
        [](const Dataset& d, const NullSpec&, double g) {
          return stat_cochran_modified(d, g);
        });
    add("debiased_cochran_v1", NullKind::Composite,
        [](const Dataset& d, const NullSpec&, double g) {
          return stat_debiased_cochran_v1(d, g);
        });
    add("debiased_cochran_v2", NullKind::Composite,
        [](const Dataset& d, const NullSpec&, double g) {
          return stat_debiased_cochran_v2(d, g);
        });
    add("dist_mle", NullKind::Mixing,
        [](const Dataset& d, const NullSpec& s, double g) {
          return stat_dist_to_estimator(d, require_mixing_null(s),
                                        EstimatorKind::Npmle,
                                        GridSpec::uniform(), g);
        });
    add("dist_mom", NullKind::Mixing,
        [](const Dataset& d, const NullSpec& s, double) {
          return stat_dist_to_estimator(d, require_mixing_null(s),
                                        EstimatorKind::Mom);
        });
    return r;
  }();
  return registry;
}

// The thirteen identifiers named in the library's stable interface.
inline std::vector<std::string> core_statistic_ids() {
  return {"w1_plugin",  "debiased_pearson", "modified_pearson_gof",
          "modified_lrt_gof", "mean_t1",    "debiased_l2_t2",
          "l2",         "modified_pearson_homog", "modified_lrt_homog",
          "vhat",       "cochran_modified", "debiased_cochran_v1",
          "debiased_cochran_v2"};
}

}  // namespace binomix
