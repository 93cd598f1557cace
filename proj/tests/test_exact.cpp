#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "fockbell/exact.hpp"
#include "fockbell/random.hpp"

using namespace fockbell;

namespace {

// Exact integer helpers, independent of the library's log-gamma path.
std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

double binomial(int n, int k) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
  row[0] = 1.0;
  for (int i = 1; i <= n; ++i)
    for (int j = i; j >= 1; --j) row[j] += row[j - 1];
  return row[k];
}

std::vector<double> random_angles(SplitMix64& rng, int m) {
  std::vector<double> a(static_cast<std::size_t>(m));
  for (double& x : a) x = rng.uniform(-kPi, kPi);
  return a;
}

}  // namespace

TEST_CASE("C_N equals binom(N, N-) / 2^N") {
  for (int np = 0; np <= 12; ++np)
    for (int nm = 0; nm <= 12; ++nm) {
      const double expected = binomial(np + nm, nm) / std::ldexp(1.0, np + nm);
      CHECK(normalization_cn(np, nm) == doctest::Approx(expected).epsilon(1e-13));
    }
  CHECK(normalization_cn(1, 1) == doctest::Approx(0.5));
  CHECK(normalization_cn(2, 1) == doctest::Approx(0.375));
}

TEST_CASE("triplet probabilities follow 1/4 [1 + eta1 eta2 cos(phi1 - phi2)]") {
  SplitMix64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto angles = random_angles(rng, 2);
    const ExperimentConfig config(1, 1, angles);
    for (int e1 : {1, -1})
      for (int e2 : {1, -1}) {
        const double p = sequence_probability(config, OutcomeSequence({e1, e2}));
        CHECK(p == doctest::Approx(0.25 * (1.0 + e1 * e2 * std::cos(angles[0] - angles[1]))).epsilon(1e-14));
      }
  }
  const ExperimentConfig same(1, 1, {0.4, 0.4});
  CHECK(sequence_probability(same, OutcomeSequence({1, -1})) == doctest::Approx(0.0));
}

TEST_CASE("probabilities sum to one and enumeration matches single evaluations") {
  SplitMix64 rng(17);
  for (int n = 1; n <= 12; ++n)
    for (int trial = 0; trial < 3; ++trial) {
      const int plus = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n + 1));
      const int m = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
      const ExperimentConfig config(plus, n - plus, random_angles(rng, m));
      const auto probs = sequence_probabilities(config);
      double total = 0.0;
      for (double p : probs) {
        CHECK(p >= 0.0);
        total += p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      const std::uint64_t pick = rng.next() % probs.size();
      CHECK(probs[pick] ==
            doctest::Approx(sequence_probability(config, OutcomeSequence::from_index(pick, m))).epsilon(1e-12));
    }
}

TEST_CASE("enumeration limit is enforced") {
  const ExperimentConfig config(3, 3, std::vector<double>(6, 0.0));
  CHECK_THROWS_AS(sequence_probabilities(config, 5), ConfigError);
}

TEST_CASE("probabilities are invariant under permutation of measurements") {
  SplitMix64 rng(23);
  const auto angles = random_angles(rng, 5);
  const OutcomeSequence etas({1, -1, -1, 1, 1});
  const double base = sequence_probability(ExperimentConfig(3, 4, angles), etas);
  std::vector<int> order{0, 1, 2, 3, 4};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<double> a;
    std::vector<int> e;
    for (int i : order) {
      a.push_back(angles[i]);
      e.push_back(etas[i]);
    }
    CHECK(sequence_probability(ExperimentConfig(3, 4, a), OutcomeSequence(e)) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("extra quadrature nodes change nothing") {
  SplitMix64 rng(29);
  const ExperimentConfig config(4, 2, random_angles(rng, 5));
  const OutcomeSequence etas({1, 1, -1, 1, -1});
  const double p = sequence_probability(config, etas);
  CHECK(sequence_probability(config, etas, ExactOptions{64}) == doctest::Approx(p).epsilon(1e-13));
}

TEST_CASE("single measurement is unbiased") {
  for (auto [np, nm] : {std::pair{3, 1}, std::pair{2, 2}, std::pair{5, 0}}) {
    const ExperimentConfig config(np, nm, {1.234});
    CHECK(sequence_probability(config, OutcomeSequence({1})) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("one-vs-rest correlation is cos(phi_a - phi_b)") {
  for (int n : {2, 4, 10, 100}) {
    const double a = 0.7, b = -0.2;
    std::vector<double> angles(static_cast<std::size_t>(n), b);
    angles[0] = a;
    const double e = correlation_e(ExperimentConfig(Populations::balanced(n), angles));
    CHECK(std::abs(e - std::cos(a - b)) < 1e-9);
    CHECK(std::abs(correlation_closed_form(n, 1, a - b) - std::cos(a - b)) < 1e-12);
  }
}

TEST_CASE("direct and enumerated correlations agree") {
  SplitMix64 rng(31);
  for (int n = 2; n <= 10; ++n) {
    const int plus = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n + 1));
    const int m = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    const ExperimentConfig config(plus, n - plus, random_angles(rng, m));
    CHECK(std::abs(correlation_e(config) - correlation_e_by_enumeration(config)) < 1e-11);
  }
  // Odd numbers of measured spins carry no correlation.
  CHECK(std::abs(correlation_e(ExperimentConfig(2, 2, {0.0, 0.3, 1.0}))) < 1e-14);
}

TEST_CASE("closed form matches quadrature for every split") {
  for (int n : {2, 4, 6, 8, 12, 20})
    for (int p = 1; p < n; ++p)
      for (double chi : {0.0, 0.13, 0.5, 1.1, 2.0, 3.0}) {
        std::vector<double> angles(static_cast<std::size_t>(n), 0.0);
        std::fill(angles.begin(), angles.begin() + p, chi);
        const double quad = correlation_e(ExperimentConfig(Populations::balanced(n), angles));
        CHECK(std::abs(correlation_closed_form(n, p, chi) - quad) < 1e-12);
      }
  CHECK_THROWS_AS(correlation_closed_form(5, 2, 0.1), ConfigError);
  CHECK_THROWS_AS(correlation_closed_form(4, 4, 0.1), ConfigError);
}

TEST_CASE("closed form stays finite for very large N") {
  const double e = correlation_closed_form(10000, 2, 0.3);
  CHECK(std::isfinite(e));
  CHECK(std::abs(e) <= 1.0 + 1e-12);
  CHECK(correlation_closed_form(10000, 5000, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gaussian approximation approaches the closed form") {
  const int n = 2000;
  // Small p only holds near chi = 0; large p holds across the Gaussian.
  for (auto [p, x] : {std::pair{2, 0.2}, std::pair{100, 0.2}, std::pair{100, 1.0}, std::pair{100, 2.0},
                      std::pair{1000, 0.2}, std::pair{1000, 1.0}, std::pair{1000, 2.0}}) {
    const double chi = x / std::sqrt(static_cast<double>(p) * (n - p) / n);
    CHECK(std::abs(correlation_gaussian(n, p, chi) - correlation_closed_form(n, p, chi)) < 2e-2);
  }
  const std::vector<AngleGroup> two{{30, 0.1}, {70, -0.05}};
  CHECK(correlation_gaussian(100, two) == doctest::Approx(correlation_gaussian(100, 30, 0.15)).epsilon(1e-14));
  const std::vector<AngleGroup> wrapped{{50, kPi - 0.01}, {50, -kPi + 0.01}};
  CHECK(correlation_gaussian(100, wrapped) == doctest::Approx(correlation_gaussian(100, 50, 0.02)).epsilon(1e-12));
  const std::vector<AngleGroup> short_cover{{10, 0.0}};
  CHECK_THROWS_AS(correlation_gaussian(20, short_cover), ConfigError);
}

TEST_CASE("correction factor G") {
  // Exact factorials for N <= 20.
  for (int n = 2; n <= 20; n += 2)
    for (int np = 0; np <= n; ++np)
      for (int m = 0; m <= n; m += 2) {
        const int nm = n - np;
        const int h = m / 2;
        double expected = 0.0;
        if (h <= np && h <= nm) {
          const double num = static_cast<double>(factorial(n - m)) * static_cast<double>(factorial(m)) *
                             static_cast<double>(factorial(np)) * static_cast<double>(factorial(nm));
          const double den = static_cast<double>(factorial(np - h)) * static_cast<double>(factorial(nm - h)) *
                             static_cast<double>(factorial(h)) * static_cast<double>(factorial(h)) *
                             static_cast<double>(factorial(n));
          expected = num / den;
        }
        CHECK(correction_factor_g(m, np, nm) == doctest::Approx(expected).epsilon(1e-11));
        // The quadrature divides by C_N, which is small for lopsided splits.
        CHECK(std::abs(correction_factor_g_quadrature(m, np, nm) - expected) < 1e-9);
      }
  CHECK(correction_factor_g(3, 3, 3) == 0.0);
  CHECK(correction_factor_g(6, 3, 3) == doctest::Approx(1.0));

  // G is the attenuation of the measured-spin correlation.
  SplitMix64 rng(41);
  for (int m : {2, 4}) {
    const auto angles = random_angles(rng, m);
    const ExperimentConfig config(3, 3, angles);
    const ExperimentConfig full(m / 2, m / 2, angles);
    CHECK(correlation_e(config) == doctest::Approx(correction_factor_g(m, 3, 3) * correlation_e(full)).epsilon(1e-12));
  }
}

TEST_CASE("measuring fewer spins than N caps G at 2/3") {
  for (int n = 2; n <= 40; n += 2)
    for (int m = 2; m < n; m += 2) CHECK(correction_factor_g(m, n / 2, n / 2) <= 2.0 / 3.0 + 1e-12);
}

TEST_CASE("classical law") {
  SplitMix64 rng(43);
  const auto angles = random_angles(rng, 6);
  double total = 0.0;
  for (std::uint64_t i = 0; i < 64; ++i) {
    const double p = classical_sequence_probability(angles, OutcomeSequence::from_index(i, 6));
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  // Two measurements: pair correlation is cos/2.
  const std::vector<double> two{0.0, 0.8};
  double e = 0.0;
  for (std::uint64_t i = 0; i < 4; ++i) {
    const auto s = OutcomeSequence::from_index(i, 2);
    e += s.product() * classical_sequence_probability(two, s);
  }
  CHECK(e == doctest::Approx(0.5 * std::cos(0.8)).epsilon(1e-13));
}

TEST_CASE("configurations with unresolvable normalization are infeasible") {
  CHECK_THROWS_AS(sequence_probability(ExperimentConfig(60, 0, {0.0}), OutcomeSequence({1})), InfeasibleError);
  CHECK_NOTHROW(sequence_probability(ExperimentConfig(30, 0, {0.0}), OutcomeSequence({1})));
}
