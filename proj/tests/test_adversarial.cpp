#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "binomix/adversarial.hpp"

using namespace binomix;

TEST_CASE("prob_perturb") {
  auto same = prob_perturb(0.0);
  CHECK(w1(same.pi0, same.pi1) == Catch::Approx(0.0).margin(1e-15));

  auto extreme = prob_perturb(0.5);
  CHECK(extreme.pi1.num_atoms() == 1);
  CHECK(extreme.pi1.support()[0] == Catch::Approx(1.0));
  CHECK(w1(extreme.pi0, extreme.pi1) == Catch::Approx(0.5));

  // Marginal support stays on {0, t} for any t.
  auto pair = prob_perturb(0.2);
  for (int t : {1, 3, 32}) {
    auto pmf = marginal_pmf({t, pair.pi1});
    for (int j = 1; j < t; ++j) CHECK(pmf[j] == Catch::Approx(0.0).margin(1e-18));
  }
  CHECK(w1(pair.pi0, pair.pi1) == Catch::Approx(0.2).margin(1e-15));
  CHECK_THROWS_AS(prob_perturb(0.6), std::invalid_argument);
}

TEST_CASE("mean_shift") {
  CHECK(w1(mean_shift(0.3, 0.0), MixingDistribution::point_mass(0.3)) ==
        Catch::Approx(0.0).margin(1e-15));
  CHECK(w1(mean_shift(0.3, 0.25), MixingDistribution::point_mass(0.3)) ==
        Catch::Approx(0.25));
  CHECK_THROWS_AS(mean_shift(0.3, 0.8), std::invalid_argument);
}

TEST_CASE("mean_matched") {
  auto null_case = mean_matched(0.4, 0.0);
  CHECK(null_case.num_atoms() == 1);
  auto pi = mean_matched(0.4, 0.3);
  CHECK(pi.mean() == Catch::Approx(0.4).margin(1e-15));
  CHECK(pi.variance() == Catch::Approx(0.09).margin(1e-15));
  CHECK(w1(pi, MixingDistribution::point_mass(0.4)) == Catch::Approx(0.3));
  CHECK_THROWS_AS(mean_matched(0.4, 0.5), std::invalid_argument);

  // T1 expectation vanishes while T2 expectation equals eps^2 (exact
  // pmf-sum oracle over the mixture marginal).
  const int t = 6;
  const double p0 = 0.4, eps = 0.2;
  auto alt = mean_matched(p0, eps);
  const auto pmf = marginal_pmf({t, alt});
  long double t1 = 0.0L, t2 = 0.0L;
  for (int x = 0; x <= t; ++x) {
    t1 += pmf[x] * (static_cast<double>(x) / t - p0);
    const double b = static_cast<double>(x) / t;
    t2 += pmf[x] * (sq(b - p0) - b * (1 - b) / (t - 1));
  }
  CHECK(std::abs(static_cast<double>(t1)) < 1e-12);
  CHECK(static_cast<double>(t2) == Catch::Approx(eps * eps).margin(1e-12));
}

TEST_CASE("mass_leak") {
  auto null_case = mass_leak(0.25, 0.0);
  CHECK(null_case.num_atoms() == 1);
  auto full = mass_leak(0.25, 1.0);
  CHECK(full.num_atoms() == 1);
  CHECK(full.support()[0] == Catch::Approx(1.0));
  CHECK(w1(full, MixingDistribution::point_mass(0.25)) == Catch::Approx(0.75));
  for (double eps : {0.1, 0.4, 0.9}) {
    auto pi = mass_leak(0.25, eps);
    CHECK(w1(pi, MixingDistribution::point_mass(0.25)) ==
          Catch::Approx(eps * 0.75).margin(1e-15));
  }
}

TEST_CASE("moment_match_pair: matching, distance decay, LP verification") {
  double base = 0.0;
  for (int k = 1; k <= 12; ++k) {
    auto mm = moment_match_pair(k);
    CHECK(mm.max_moment_gap <= 1e-9);
    CHECK(mm.w1_distance == Catch::Approx(w1(mm.pi0, mm.pi1)).margin(1e-12));
    CHECK(mm.pi0.num_atoms() <= static_cast<std::size_t>(k) + 1);
    CHECK(mm.pi1.num_atoms() <= static_cast<std::size_t>(k) + 1);
    CHECK(mm.w1_distance >= 0.5 * mm.lp_optimum);
    if (k == 2) base = mm.construction_constant;
    if (k >= 2 && k <= 10) {
      CHECK(mm.construction_constant >= 0.5 * base);
      CHECK(mm.construction_constant <= 2.0 * base);
    }
  }
}

TEST_CASE("moment_match_pair: k=1 matches the first moment") {
  auto mm = moment_match_pair(1);
  CHECK(mm.pi0.mean() == Catch::Approx(mm.pi1.mean()).margin(1e-12));
  CHECK(mm.w1_distance > 0.0);
}

TEST_CASE("moment_match_pair: marginals coincide when t <= k") {
  for (int k : {3, 6, 10}) {
    auto mm = moment_match_pair(k);
    for (int t = 1; t <= k; ++t)
      CHECK(tv({t, mm.pi0}, {t, mm.pi1}) == Catch::Approx(0.0).margin(1e-9));
    CHECK(tv({k + 1, mm.pi0}, {k + 1, mm.pi1}) > 1e-9);
  }
}

TEST_CASE("moment_match_pair: narrow interval and guard rails") {
  auto mm = moment_match_pair(4, 0.3, 0.2);
  for (double x : mm.pi0.support()) {
    CHECK(x >= 0.1 - 1e-12);
    CHECK(x <= 0.5 + 1e-12);
  }
  CHECK(mm.max_moment_gap <= 1e-9);
  CHECK_THROWS_AS(moment_match_pair(41), std::invalid_argument);
  CHECK_THROWS_AS(moment_match_pair(4, 0.9, 0.2), std::invalid_argument);
  // Stability at the guard boundary.
  auto deep = moment_match_pair(40);
  CHECK(deep.max_moment_gap <= 1e-9);
}

TEST_CASE("Family: nulls, ranges, interpolation") {
  Family pp(FamilyKind::ProbPerturb);
  CHECK(pp.eps_max() == Catch::Approx(0.5));
  CHECK(w1(pp.null_distribution(), pp.alternative(0.3)) ==
        Catch::Approx(0.3).margin(1e-15));

  Family ms(FamilyKind::MeanShift, 0.2);
  CHECK(ms.eps_max() == Catch::Approx(0.8));
  CHECK(w1(ms.null_distribution(), ms.alternative(0.5)) ==
        Catch::Approx(0.5).margin(1e-15));

  Family mm(FamilyKind::MeanMatched, 0.3);
  CHECK(mm.eps_max() == Catch::Approx(0.3));

  Family ml(FamilyKind::MassLeak, 0.25);
  CHECK(ml.eps_max() == Catch::Approx(0.75));
  CHECK(w1(ml.null_distribution(), ml.alternative(0.6)) ==
        Catch::Approx(0.6).margin(1e-14));

  Family mmp(FamilyKind::MomentMatchPairFamily, 0.5, 6);
  const double emax = mmp.eps_max();
  CHECK(emax > 0.0);
  for (double frac : {0.25, 0.5, 1.0}) {
    auto alt = mmp.alternative(frac * emax);
    CHECK(w1(mmp.null_distribution(), alt) ==
          Catch::Approx(frac * emax).margin(1e-12));
    // Interpolation preserves the k matched moments.
    auto m0 = moments(mmp.null_distribution(), 6);
    auto m1 = moments(alt, 6);
    for (int l = 0; l < 6; ++l) CHECK(m0[l] == Catch::Approx(m1[l]).margin(1e-9));
  }
  CHECK_THROWS_AS(mmp.alternative(emax * 1.5), std::invalid_argument);
}

TEST_CASE("family names round-trip") {
  for (auto kind : {FamilyKind::ProbPerturb, FamilyKind::MeanShift,
                    FamilyKind::MeanMatched, FamilyKind::MassLeak,
                    FamilyKind::MomentMatchPairFamily})
    CHECK(family_from_name(family_name(kind)) == kind);
  CHECK_THROWS_AS(family_from_name("bogus"), std::invalid_argument);
}
