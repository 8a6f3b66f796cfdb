#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <random>

#include "binomix/mixture.hpp"

using namespace binomix;

namespace {

// Exact rational arithmetic over int64 numerators with a shared power-of-ten
// denominator; enough for the hand-set fixtures below.
struct Rational {
  long long num;
  long long den;
  double value() const { return static_cast<double>(num) / den; }
};

Rational rat_pow(long long num, long long den, int e) {
  Rational r{1, 1};
  for (int i = 0; i < e; ++i) {
    r.num *= num;
    r.den *= den;
  }
  return r;
}

MixingDistribution random_mixing(std::mt19937_64& gen, int max_atoms = 6) {
  std::uniform_int_distribution<int> natoms(1, max_atoms);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int k = natoms(gen);
  std::vector<double> sup(k), w(k);
  for (int i = 0; i < k; ++i) {
    sup[i] = unif(gen);
    w[i] = unif(gen) + 1e-3;
  }
  return MixingDistribution::from_unnormalized(sup, w);
}

}  // namespace

TEST_CASE("MixingDistribution construction enforces invariants") {
  CHECK_THROWS_AS(MixingDistribution({0.5}, {0.9}), std::invalid_argument);
  CHECK_THROWS_AS(MixingDistribution({1.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(MixingDistribution({0.2, 0.8}, {1.2, -0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MixingDistribution({}, {}), std::invalid_argument);

  // Atoms closer than 1e-12 merge; zero weights drop.
  MixingDistribution merged({0.3, 0.3 + 1e-14, 0.7}, {0.25, 0.25, 0.5});
  CHECK(merged.num_atoms() == 2);
  CHECK(merged.weights()[0] == Catch::Approx(0.5));

  MixingDistribution dropped({0.1, 0.9}, {1.0, 0.0});
  CHECK(dropped.num_atoms() == 1);

  // Unsorted input is sorted.
  MixingDistribution sorted({0.8, 0.2}, {0.4, 0.6});
  CHECK(sorted.support()[0] == Catch::Approx(0.2));
  CHECK(sorted.weights()[0] == Catch::Approx(0.6));
}

TEST_CASE("Dataset validates records") {
  CHECK_THROWS_AS(Dataset({}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{3, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{-1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{0, 0}}), std::invalid_argument);
  Dataset d({{0, 2}, {2, 3}});
  CHECK(!d.homogeneous_trials());
  CHECK(Dataset({{1, 3}, {2, 3}}).homogeneous_trials() == 3);
}

TEST_CASE("marginal_pmf matches hand values") {
  auto pmf = marginal_pmf({2, MixingDistribution::point_mass(0.5)});
  REQUIRE(pmf.size() == 3);
  CHECK(pmf[0] == Catch::Approx(0.25));
  CHECK(pmf[1] == Catch::Approx(0.5));
  CHECK(pmf[2] == Catch::Approx(0.25));

  auto pmf2 = marginal_pmf({1, MixingDistribution({0.0, 1.0}, {0.5, 0.5})});
  CHECK(pmf2[0] == Catch::Approx(0.5));
  CHECK(pmf2[1] == Catch::Approx(0.5));
}

TEST_CASE("marginal_pmf matches exact rational Bernstein sums") {
  // t=3, pi = 0.3 d_{0.2} + 0.7 d_{0.8}; everything exact over den 10.
  // b_j = (3/10) C(3,j) (1/5)^j (4/5)^{3-j} + (7/10) C(3,j) (4/5)^j (1/5)^{3-j}
  const long long C3[4] = {1, 3, 3, 1};
  MixingDistribution pi({0.2, 0.8}, {0.3, 0.7});
  auto pmf = marginal_pmf({3, pi});
  for (int j = 0; j <= 3; ++j) {
    const Rational a = rat_pow(1, 5, j), b = rat_pow(4, 5, 3 - j);
    const Rational c = rat_pow(4, 5, j), d = rat_pow(1, 5, 3 - j);
    // exact numerators over 10 * 5^3
    const double expect =
        (3.0 * C3[j] * a.num * b.num + 7.0 * C3[j] * c.num * d.num) /
        (10.0 * 125.0);
    CHECK(pmf[j] == Catch::Approx(expect).margin(1e-15));
  }
}

TEST_CASE("marginal_pmf sums to one across random mixtures") {
  std::mt19937_64 gen(1234);
  for (int rep = 0; rep < 200; ++rep) {
    std::uniform_int_distribution<int> trials(1, 12);
    const int t = trials(gen);
    auto pmf = marginal_pmf({t, random_mixing(gen)});
    KahanSum s;
    for (double v : pmf) s.add(v);
    CHECK(std::abs(s.value() - 1.0) < 1e-12);
  }
}

TEST_CASE("moments: point masses, endpoints, brute force") {
  auto m = moments(MixingDistribution::point_mass(0.3), 3);
  CHECK(m[0] == Catch::Approx(0.3));
  CHECK(m[1] == Catch::Approx(0.09));
  CHECK(m[2] == Catch::Approx(0.027));

  auto e = moments(MixingDistribution({0.0, 1.0}, {0.5, 0.5}), 4);
  for (double v : e) CHECK(v == Catch::Approx(0.5));

  std::mt19937_64 gen(99);
  for (int rep = 0; rep < 50; ++rep) {
    auto pi = random_mixing(gen);
    auto mm = moments(pi, 6);
    for (int l = 1; l <= 6; ++l) {
      long double direct = 0.0L;
      for (std::size_t k = 0; k < pi.num_atoms(); ++k)
        direct += static_cast<long double>(pi.weights()[k]) *
                  std::pow(static_cast<long double>(pi.support()[k]), l);
      CHECK(std::abs(mm[l - 1] - static_cast<double>(direct)) < 1e-14);
      if (l > 1) CHECK(mm[l - 1] <= mm[l - 2] + 1e-15);
    }
  }
}

TEST_CASE("w1 closed forms") {
  CHECK(w1(MixingDistribution::point_mass(0.2),
           MixingDistribution::point_mass(0.9)) == Catch::Approx(0.7));
  // Eq.-(24)-style pair: perturbing the endpoint masses by eps moves W1 by
  // exactly eps.
  const double eps = 0.17;
  MixingDistribution pi0({0.0, 1.0}, {0.5, 0.5});
  MixingDistribution pi1({0.0, 1.0}, {0.5 - eps, 0.5 + eps});
  CHECK(w1(pi0, pi1) == Catch::Approx(eps).margin(1e-15));
  // Medium-p0 pair: d_{p0} vs (d_{2p0} + d_0)/2 sits at distance p0.
  const double p0 = 0.13;
  MixingDistribution a = MixingDistribution::point_mass(p0);
  MixingDistribution b({0.0, 2 * p0}, {0.5, 0.5});
  CHECK(w1(a, b) == Catch::Approx(p0).margin(1e-15));
}

TEST_CASE("w1 agrees with a dense CDF quadrature oracle") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 100; ++rep) {
    auto pa = random_mixing(gen);
    auto pb = random_mixing(gen);
    const double exact = w1(pa, pb);
    // Riemann sum over a uniform 2^20-point grid of |F_a - F_b|.
    const int G = 1 << 20;
    long double acc = 0.0L;
    std::size_t ia = 0, ib = 0;
    double Fa = 0.0, Fb = 0.0;
    for (int g = 0; g < G; ++g) {
      const double x = (g + 0.5) / G;
      while (ia < pa.num_atoms() && pa.support()[ia] <= x)
        Fa += pa.weights()[ia++];
      while (ib < pb.num_atoms() && pb.support()[ib] <= x)
        Fb += pb.weights()[ib++];
      acc += std::abs(Fa - Fb);
    }
    CHECK(std::abs(exact - static_cast<double>(acc / G)) < 1e-5);
    CHECK(w1(pa, pb) == Catch::Approx(w1(pb, pa)).margin(1e-15));
  }
}

TEST_CASE("w1 is a metric on random triples") {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 100; ++rep) {
    auto a = random_mixing(gen);
    auto b = random_mixing(gen);
    auto c = random_mixing(gen);
    CHECK(w1(a, a) == Catch::Approx(0.0).margin(1e-15));
    CHECK(w1(a, b) + w1(b, c) >= w1(a, c) - 1e-12);
  }
}

TEST_CASE("w1_to_pointmass_set: point mass, two atoms, grid oracle") {
  auto [d0, arg0] = w1_to_pointmass_set(MixingDistribution::point_mass(0.42));
  CHECK(d0 == Catch::Approx(0.0).margin(1e-15));
  CHECK(arg0 == Catch::Approx(0.42));

  auto [d1, arg1] = w1_to_pointmass_set(MixingDistribution({0.0, 1.0}, {0.5, 0.5}));
  CHECK(d1 == Catch::Approx(0.5));
  CHECK(arg1 == Catch::Approx(0.0));  // left tie-break

  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto pi = random_mixing(gen, 5);
    auto [dist, arg] = w1_to_pointmass_set(pi);
    double best = 1e300;
    for (int g = 0; g <= 2000; ++g) {
      const double p = g / 2000.0;
      best = std::min(best, w1(pi, MixingDistribution::point_mass(p)));
    }
    // W1(pi, d_p) is 1-Lipschitz in p, so the 1/2000 grid can overshoot
    // the exact minimum by at most half a spacing.
    CHECK(dist <= best + 1e-12);
    CHECK(best <= dist + 0.5 / 2000.0 + 1e-12);
    CHECK(dist == Catch::Approx(w1(pi, MixingDistribution::point_mass(arg)))
                      .margin(1e-14));
    CHECK(dist <= std::sqrt(pi.variance()) + 1e-12);
  }
}

TEST_CASE("tv basics") {
  MixingDistribution pi({0.2, 0.8}, {0.3, 0.7});
  BinomialMixtureModel m(4, pi);
  CHECK(tv(m, m) == Catch::Approx(0.0).margin(1e-15));
  CHECK(tv({1, MixingDistribution::point_mass(0.0)},
           {1, MixingDistribution::point_mass(1.0)}) == Catch::Approx(1.0));
  CHECK_THROWS_AS(tv({2, pi}, {3, pi}), std::invalid_argument);
}

TEST_CASE("chi2_marginal: identical, two-cell hand value, zero-cell error") {
  MixingDistribution pi({0.2, 0.8}, {0.3, 0.7});
  CHECK(chi2_marginal({5, pi}, {5, pi}) == Catch::Approx(0.0).margin(1e-15));
  CHECK(chi2_marginal({1, MixingDistribution::point_mass(0.5)},
                      {1, MixingDistribution::point_mass(0.6)}) ==
        Catch::Approx(0.04).margin(1e-15));
  CHECK_THROWS_AS(chi2_marginal({2, MixingDistribution::point_mass(0.0)},
                                {2, MixingDistribution::point_mass(0.5)}),
                  std::domain_error);
}

TEST_CASE("j_functional: point mass, symmetric two atoms, trapezoid oracle") {
  CHECK(j_functional(MixingDistribution::point_mass(0.4)) ==
        Catch::Approx(0.0).margin(1e-15));
  CHECK(j_functional(MixingDistribution({0.0, 1.0}, {0.5, 0.5})) ==
        Catch::Approx(0.5));
  MixingDistribution pi({0.25, 0.75}, {0.5, 0.5});
  const double exact = j_functional(pi);
  const int G = 1000000;
  long double acc = 0.0L;
  for (int g = 0; g < G; ++g) {
    const double x = (g + 0.5) / G;
    const double F = pi.cdf(x);
    acc += std::sqrt(F * (1.0 - F));
  }
  CHECK(std::abs(exact - static_cast<double>(acc / G)) < 1e-8);
  CHECK(exact <= 0.5 + 1e-15);
}

TEST_CASE("sample: degenerate mixtures and determinism") {
  auto zeros = sample({4, MixingDistribution::point_mass(0.0)}, 50, 9);
  for (const auto& r : zeros.records()) CHECK(r.count == 0);
  auto tops = sample({4, MixingDistribution::point_mass(1.0)}, 50, 9);
  for (const auto& r : tops.records()) CHECK(r.count == 4);

  MixingDistribution pi({0.1, 0.6}, {0.4, 0.6});
  auto a = sample({6, pi}, 1000, 20250810);
  auto b = sample({6, pi}, 1000, 20250810);
  CHECK(a == b);
  auto c = sample({6, pi}, 1000, 20250811);
  CHECK(!(a == c));
}

TEST_CASE("sample: empirical pmf within multinomial bands") {
  MixingDistribution pi({0.15, 0.5, 0.9}, {0.3, 0.4, 0.3});
  const int t = 5;
  const std::size_t n = 1000000;
  auto data = sample({t, pi}, n, 77);
  std::vector<double> freq(t + 1, 0.0);
  for (const auto& r : data.records()) freq[r.count] += 1.0;
  auto pmf = marginal_pmf({t, pi});
  for (int j = 0; j <= t; ++j) {
    const double se = std::sqrt(pmf[j] * (1 - pmf[j]) / n);
    CHECK(std::abs(freq[j] / n - pmf[j]) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("sample handles large trial counts") {
  // Mode-centered inversion must not underflow for big t.
  auto data = sample({2900, MixingDistribution::point_mass(0.5)}, 2000, 4);
  double mean = 0.0;
  for (const auto& r : data.records()) mean += r.count;
  mean /= data.size();
  CHECK(std::abs(mean / 2900.0 - 0.5) < 0.002);
}
