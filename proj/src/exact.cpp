#include "fockbell/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "fockbell/parallel.hpp"
#include "fockbell/quadrature.hpp"

namespace fockbell {
namespace {

// Below this the Lambda quadrature cannot separate C_N from cancellation
// noise of order 1e-16.
constexpr double kMinNormalization = 1e-13;

int resolve_nodes(Populations populations, ExactOptions options) {
  if (options.node_count > 0) return options.node_count;
  return detail::default_node_count(populations);
}

double raw_cn(Populations pops, int node_count) {
  QuadratureRule rule(node_count);
  const int d = pops.imbalance();
  const int n = pops.total();
  return rule.integrate([&](double x) { return std::cos(d * x) * std::pow(std::cos(x), n); });
}

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

namespace detail {

int default_node_count(Populations populations) { return 2 * (populations.total() + 2); }

LambdaWeights lambda_weights(Populations populations, int measured, int node_count) {
  const double cn = raw_cn(populations, node_count);
  if (!(cn > kMinNormalization)) throw InfeasibleError("unnormalizable configuration");
  QuadratureRule rule(node_count);
  LambdaWeights out;
  out.cos_lambda.resize(node_count);
  out.weight.resize(node_count);
  const int d = populations.imbalance();
  const int free_spins = populations.total() - measured;
  for (int i = 0; i < node_count; ++i) {
    const double x = rule.node(i);
    const double c = std::cos(x);
    out.cos_lambda[i] = c;
    out.weight[i] = std::cos(d * x) * std::pow(c, free_spins) * rule.weight() / cn;
  }
  return out;
}

}  // namespace detail

double normalization_cn(int n_plus, int n_minus, ExactOptions options) {
  Populations pops(n_plus, n_minus);
  return raw_cn(pops, resolve_nodes(pops, options));
}

double sequence_probability(const ExperimentConfig& config, const OutcomeSequence& outcomes,
                            ExactOptions options) {
  const int m = config.measurement_count();
  if (outcomes.size() != m) throw ConfigError("outcome count does not match measurement count");
  const int k = resolve_nodes(config.populations(), options);
  const auto lw = detail::lambda_weights(config.populations(), m, k);
  QuadratureRule rule(k);

  // Brackets are halved so the product stays O(1) and the 2^-M is absorbed.
  std::vector<double> half_cos(static_cast<std::size_t>(m) * k);
  for (int j = 0; j < m; ++j)
    for (int q = 0; q < k; ++q)
      half_cos[static_cast<std::size_t>(j) * k + q] = 0.5 * outcomes[j] * std::cos(rule.node(q) - config.angles()[j]);

  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double half_a = 0.5 * lw.cos_lambda[i];
    double inner = 0.0;
    for (int q = 0; q < k; ++q) {
      double prod = 1.0;
      for (int j = 0; j < m; ++j) prod *= half_a + half_cos[static_cast<std::size_t>(j) * k + q];
      inner += prod;
    }
    total += lw.weight[i] * inner * rule.weight();
  }
  return std::clamp(total, 0.0, 1.0);
}

std::vector<double> sequence_probabilities(const ExperimentConfig& config, int enumeration_limit,
                                           ExactOptions options) {
  const int m = config.measurement_count();
  if (m > enumeration_limit)
    throw ConfigError("enumeration of 2^" + std::to_string(m) + " outcomes exceeds the limit of 2^" +
                      std::to_string(enumeration_limit));
  const int k = resolve_nodes(config.populations(), options);
  const auto lw = detail::lambda_weights(config.populations(), m, k);
  QuadratureRule rule(k);
  const std::size_t grid = static_cast<std::size_t>(k) * k;

  // Per grid point (Lambda_i, lambda_q): half bracket pieces a/2 and c_j/2.
  std::vector<double> half_a(grid);
  std::vector<double> root(grid);
  for (int i = 0; i < k; ++i)
    for (int q = 0; q < k; ++q) {
      half_a[static_cast<std::size_t>(i) * k + q] = 0.5 * lw.cos_lambda[i];
      root[static_cast<std::size_t>(i) * k + q] = lw.weight[i] * rule.weight();
    }
  std::vector<std::vector<double>> half_c(static_cast<std::size_t>(m), std::vector<double>(grid));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i)
      for (int q = 0; q < k; ++q)
        half_c[j][static_cast<std::size_t>(i) * k + q] = 0.5 * std::cos(rule.node(q) - config.angles()[j]);

  const std::uint64_t count = std::uint64_t{1} << m;
  std::vector<double> probs(count, 0.0);
  const int split = std::min(m, 6);
  const std::uint64_t tasks = std::uint64_t{1} << split;

  // Outcome tree walked depth first; each level multiplies one bracket into
  // the parent's grid array, so sibling sequences share their prefix work.
  parallel_for(tasks, [&](std::size_t task) {
    std::vector<std::vector<double>> level(static_cast<std::size_t>(m - split + 1), std::vector<double>(grid));
    std::vector<double>& start = level[0];
    start = root;
    for (int j = 0; j < split; ++j) {
      const double eta = ((task >> j) & 1U) ? -1.0 : 1.0;
      for (std::size_t g = 0; g < grid; ++g) start[g] *= half_a[g] + eta * half_c[j][g];
    }
    auto descend = [&](auto&& self, int depth, std::uint64_t index) -> void {
      const int j = split + depth;
      if (j == m) {
        double sum = 0.0;
        for (double v : level[depth]) sum += v;
        probs[index] = std::clamp(sum, 0.0, 1.0);
        return;
      }
      for (int bit = 0; bit < 2; ++bit) {
        const double eta = bit ? -1.0 : 1.0;
        const auto& parent = level[depth];
        auto& child = level[depth + 1];
        for (std::size_t g = 0; g < grid; ++g) child[g] = parent[g] * (half_a[g] + eta * half_c[j][g]);
        self(self, depth + 1, index | (static_cast<std::uint64_t>(bit) << j));
      }
    };
    descend(descend, 0, task);
  });
  return probs;
}

double correlation_e(const ExperimentConfig& config, ExactOptions options) {
  const int m = config.measurement_count();
  const int k = resolve_nodes(config.populations(), options);
  // Lambda -> Lambda + pi flips the sign of the integrand when M is odd.
  if (m % 2 != 0) {
    detail::lambda_weights(config.populations(), m, k);
    return 0.0;
  }
  const auto lw = detail::lambda_weights(config.populations(), m, k);
  double lambda_part = 0.0;
  for (double w : lw.weight) lambda_part += w;
  QuadratureRule rule(k);
  const double phase_part = rule.integrate([&](double x) {
    double prod = 1.0;
    for (double phi : config.angles()) prod *= std::cos(x - phi);
    return prod;
  });
  return lambda_part * phase_part;
}

double correlation_e_by_enumeration(const ExperimentConfig& config, int enumeration_limit,
                                    ExactOptions options) {
  const auto probs = sequence_probabilities(config, enumeration_limit, options);
  CompensatedSum sum;
  for (std::uint64_t index = 0; index < probs.size(); ++index) {
    const bool odd = __builtin_popcountll(index) % 2 != 0;
    sum.add(odd ? -probs[index] : probs[index]);
  }
  return sum.value();
}

double correlation_closed_form(int n, int p, double chi) {
  if (n < 2 || n % 2 != 0) throw ConfigError("closed form needs an even N >= 2");
  PartySplit split(p, n);
  const double s = std::sin(chi);
  const double c = std::cos(chi);
  const double log_s = std::log(std::abs(s));
  const double log_c = std::log(std::abs(c));
  const double prefactor = log_factorial(n / 2) - log_factorial(n) + log_factorial(p);
  CompensatedSum sum;
  for (int k = 0; 2 * k <= p; ++k) {
    const int sin_power = 2 * k;
    const int cos_power = p - 2 * k;
    if ((sin_power > 0 && s == 0.0) || (cos_power > 0 && c == 0.0)) continue;
    double log_term = prefactor + log_factorial(n - 2 * k) - log_factorial(k) - log_factorial(p - 2 * k) -
                      log_factorial(n / 2 - k);
    if (sin_power > 0) log_term += sin_power * log_s;
    if (cos_power > 0) log_term += cos_power * log_c;
    const double sign = (c < 0.0 && cos_power % 2 != 0) ? -1.0 : 1.0;
    sum.add(sign * std::exp(log_term));
  }
  return sum.value();
}

double correlation_gaussian(int n, int p, double chi) {
  if (n < 2 || p < 1 || n - p < 1) throw ConfigError("gaussian correlation needs p >= 1 and n - p >= 1");
  return std::exp(-static_cast<double>(p) * (n - p) * chi * chi / (2.0 * n));
}

double correlation_gaussian(int n, std::span<const AngleGroup> groups) {
  if (n < 1) throw ConfigError("gaussian correlation needs N >= 1");
  int covered = 0;
  for (const auto& g : groups) covered += g.count;
  if (covered != n) throw ConfigError("gaussian correlation groups must cover all N spins");
  double exponent = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t h = g + 1; h < groups.size(); ++h) {
      const double delta = angle_difference(groups[g].angle, groups[h].angle);
      exponent += static_cast<double>(groups[g].count) * groups[h].count * delta * delta;
    }
  return std::exp(-exponent / (2.0 * n));
}

double correction_factor_g(int m, int n_plus, int n_minus) {
  Populations pops(n_plus, n_minus);
  const int n = pops.total();
  if (m < 0 || m > n) throw ConfigError("measurement count outside [0, N]");
  if (m % 2 != 0) return 0.0;
  const int half = m / 2;
  if (half > n_plus || half > n_minus) return 0.0;
  const double log_g = log_factorial(n - m) + log_factorial(m) + log_factorial(n_plus) + log_factorial(n_minus) -
                       log_factorial(n_plus - half) - log_factorial(n_minus - half) - 2.0 * log_factorial(half) -
                       log_factorial(n);
  return std::exp(log_g);
}

double correction_factor_g_quadrature(int m, int n_plus, int n_minus) {
  Populations pops(n_plus, n_minus);
  const int n = pops.total();
  if (m < 0 || m > n) throw ConfigError("measurement count outside [0, N]");
  QuadratureRule rule = QuadratureRule::for_particles(n);
  const int d = pops.imbalance();
  const double rest =
      rule.integrate([&](double x) { return std::cos(d * x) * std::pow(std::cos(x), n - m); });
  const double measured = rule.integrate([&](double x) { return std::pow(std::cos(x), m); });
  return rest * measured / raw_cn(pops, rule.size());
}

double classical_sequence_probability(std::span<const double> angles, const OutcomeSequence& outcomes) {
  const int m = static_cast<int>(angles.size());
  if (outcomes.size() != m) throw ConfigError("outcome count does not match measurement count");
  QuadratureRule rule(2 * (m + 2));
  return rule.integrate([&](double x) {
    double prod = 1.0;
    for (int j = 0; j < m; ++j) prod *= 0.5 * (1.0 + outcomes[j] * std::cos(x - angles[j]));
    return prod;
  });
}

}  // namespace fockbell
