#include "fockbell/phase.hpp"

#include <algorithm>
#include <cmath>

#include "fockbell/exact.hpp"
#include "fockbell/parallel.hpp"
#include "fockbell/quadrature.hpp"
#include "fockbell/random.hpp"

namespace fockbell {
namespace {

constexpr double kPeakFraction = 0.05;
constexpr double kFlatTolerance = 1e-9;

void check_history(std::span<const double> angles, const OutcomeSequence& outcomes) {
  if (angles.size() < static_cast<std::size_t>(outcomes.size()))
    throw ConfigError("history has more outcomes than angles");
}

// Multiplies g by [1 + eta cos(lambda - phi)] and rescales to unit integral.
void update_density(std::vector<double>& g, const QuadratureRule& rule, double phi, int eta) {
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    g[i] *= 1.0 + eta * std::cos(rule.node(i) - phi);
    sum += g[i];
  }
  if (!(sum > 0.0)) throw InfeasibleError("phase posterior vanished");
  const double scale = static_cast<double>(rule.size()) / (kTwoPi * sum);
  for (double& v : g) v *= scale;
}

double classical_plus(const std::vector<double>& g, const QuadratureRule& rule, double phi) {
  double s = 0.0;
  for (int i = 0; i < rule.size(); ++i) s += g[i] * std::cos(rule.node(i) - phi);
  const double mean_cos = s * kTwoPi / static_cast<double>(rule.size());
  return std::clamp(0.5 * (1.0 + mean_cos), 0.0, 1.0);
}

// Chain-rule sampler for the exact law. With R the running product of halved
// brackets, P(history, +1) / P(history) = 1/2 + S_c / (2 S_a) where
// S_a = sum w a^(N-m) R and S_c = sum w a^(N-m-1) R c.
class ExactSampler {
 public:
  explicit ExactSampler(const ExperimentConfig& config)
      : config_(config), k_(detail::default_node_count(config.populations())) {
    // Validates the normalization.
    detail::lambda_weights(config.populations(), config.measurement_count(), k_);
    QuadratureRule rule(k_);
    cos_big_.resize(k_);
    base_.resize(k_);
    for (int i = 0; i < k_; ++i) {
      cos_big_[i] = std::cos(rule.node(i));
      base_[i] = std::cos(config.populations().imbalance() * rule.node(i));
    }
    const int m = config.measurement_count();
    cos_small_.resize(static_cast<std::size_t>(m) * k_);
    for (int j = 0; j < m; ++j)
      for (int q = 0; q < k_; ++q) cos_small_[static_cast<std::size_t>(j) * k_ + q] = std::cos(rule.node(q) - config.angles()[j]);
  }

  OutcomeSequence draw(SplitMix64& rng) const {
    const int n = config_.total();
    const int m_total = config_.measurement_count();
    std::vector<double> r(static_cast<std::size_t>(k_) * k_, 1.0);
    std::vector<int> etas;
    etas.reserve(static_cast<std::size_t>(m_total));
    for (int m = 0; m < m_total; ++m) {
      const double* c = &cos_small_[static_cast<std::size_t>(m) * k_];
      double s_a = 0.0, s_c = 0.0;
      for (int i = 0; i < k_; ++i) {
        const double w = base_[i] * std::pow(cos_big_[i], n - m - 1);
        const double* row = &r[static_cast<std::size_t>(i) * k_];
        double sum_r = 0.0, sum_rc = 0.0;
        for (int q = 0; q < k_; ++q) {
          sum_r += row[q];
          sum_rc += row[q] * c[q];
        }
        s_a += w * cos_big_[i] * sum_r;
        s_c += w * sum_rc;
      }
      if (!(s_a > 0.0)) throw InfeasibleError("sampled history has vanishing probability");
      const double p_plus = std::clamp(0.5 + s_c / (2.0 * s_a), 0.0, 1.0);
      const int eta = rng.uniform() < p_plus ? 1 : -1;
      etas.push_back(eta);
      double biggest = 0.0;
      for (int i = 0; i < k_; ++i) {
        double* row = &r[static_cast<std::size_t>(i) * k_];
        for (int q = 0; q < k_; ++q) {
          row[q] *= 0.5 * (cos_big_[i] + eta * c[q]);
          biggest = std::max(biggest, std::abs(row[q]));
        }
      }
      if (biggest > 0.0)
        for (double& v : r) v /= biggest;
    }
    return OutcomeSequence(std::move(etas));
  }

 private:
  ExperimentConfig config_;
  int k_;
  std::vector<double> cos_big_;
  std::vector<double> base_;
  std::vector<double> cos_small_;
};

OutcomeSequence draw_classical(const ExperimentConfig& config, SplitMix64& rng) {
  QuadratureRule rule(kDefaultPhaseResolution);
  std::vector<double> g(static_cast<std::size_t>(rule.size()), 1.0 / kTwoPi);
  std::vector<int> etas;
  for (double phi : config.angles()) {
    const int eta = rng.uniform() < classical_plus(g, rule, phi) ? 1 : -1;
    etas.push_back(eta);
    update_density(g, rule, phi, eta);
  }
  return OutcomeSequence(std::move(etas));
}

}  // namespace

SamplingMode parse_sampling_mode(const std::string& name) {
  if (name == "exact") return SamplingMode::exact;
  if (name == "classical") return SamplingMode::classical;
  throw ConfigError("unknown sampling mode '" + name + "' (expected exact or classical)");
}

PhaseDistribution phase_posterior(std::span<const double> angles, const OutcomeSequence& outcomes, int resolution) {
  check_history(angles, outcomes);
  QuadratureRule rule(resolution);
  std::vector<double> g(static_cast<std::size_t>(resolution), 1.0 / kTwoPi);
  for (int j = 0; j < outcomes.size(); ++j) update_density(g, rule, normalize_angle(angles[j]), outcomes[j]);
  return PhaseDistribution(std::move(g));
}

double next_outcome_probability(const ExperimentConfig& config, const OutcomeSequence& history, SamplingMode mode) {
  const int h = history.size();
  if (h >= config.measurement_count()) throw ConfigError("history already covers every measurement");
  const double phi = config.angles()[h];
  if (mode == SamplingMode::classical) {
    QuadratureRule rule(kDefaultPhaseResolution);
    std::vector<double> g(static_cast<std::size_t>(rule.size()), 1.0 / kTwoPi);
    for (int j = 0; j < h; ++j) update_density(g, rule, config.angles()[j], history[j]);
    return classical_plus(g, rule, phi);
  }
  const double joint_history = sequence_probability(config.prefix(h), history);
  if (!(joint_history > 1e-12 * std::ldexp(1.0, -h)))
    throw InfeasibleError("conditioning history has probability zero");
  const double joint_plus = sequence_probability(config.prefix(h + 1), history.appended(1));
  return std::clamp(joint_plus / joint_history, 0.0, 1.0);
}

OutcomeSequence sample_sequence(const ExperimentConfig& config, std::uint64_t seed, SamplingMode mode,
                                std::uint64_t chain) {
  auto rng = SplitMix64::stream(seed, chain);
  if (mode == SamplingMode::classical) return draw_classical(config, rng);
  return ExactSampler(config).draw(rng);
}

std::vector<OutcomeSequence> sample_many(const ExperimentConfig& config, std::uint64_t seed, std::size_t count,
                                         SamplingMode mode) {
  std::vector<OutcomeSequence> out(count);
  if (mode == SamplingMode::classical) {
    parallel_for(count, [&](std::size_t i) {
      auto rng = SplitMix64::stream(seed, i);
      out[i] = draw_classical(config, rng);
    });
    return out;
  }
  const ExactSampler sampler(config);
  parallel_for(count, [&](std::size_t i) {
    auto rng = SplitMix64::stream(seed, i);
    out[i] = sampler.draw(rng);
  });
  return out;
}

std::vector<Peak> peak_statistics(const PhaseDistribution& dist) {
  const auto& g = dist.values();
  const int k = dist.resolution();
  const auto [lo_it, hi_it] = std::minmax_element(g.begin(), g.end());
  const double top = *hi_it;
  std::vector<Peak> peaks;
  if (k < 3 || top - *lo_it <= kFlatTolerance * top) return peaks;

  auto at = [&](int i) { return g[static_cast<std::size_t>(((i % k) + k) % k)]; };
  for (int i = 0; i < k; ++i) {
    const double v = g[i];
    if (!(v > at(i - 1) && v >= at(i + 1)) || v < kPeakFraction * top) continue;
    const double half = 0.5 * v;
    // Walk out to the half-height crossings on each side.
    double left = 0.0, right = 0.0;
    for (int s = 1; s <= k; ++s) {
      if (at(i - s) < half) {
        left = s - (half - at(i - s)) / (at(i - s + 1) - at(i - s));
        break;
      }
      left = k;
    }
    for (int s = 1; s <= k; ++s) {
      if (at(i + s) < half) {
        right = s - (half - at(i + s)) / (at(i + s - 1) - at(i + s));
        break;
      }
      right = k;
    }
    peaks.push_back(Peak{dist.lambda(i), v, std::min(static_cast<double>(k), left + right) * dist.spacing()});
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return peaks;
}

}  // namespace fockbell
