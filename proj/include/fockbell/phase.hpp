#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fockbell/model.hpp"

namespace fockbell {

/// exact: conditionals of the full quadrature law for the config's N+, N-.
/// classical: the large-N law where the outcomes are independent given a
/// uniformly distributed phase.
enum class SamplingMode { exact, classical };

SamplingMode parse_sampling_mode(const std::string& name);

inline constexpr int kDefaultPhaseResolution = 1024;

/// g(lambda) proportional to prod_j [1 + eta_j cos(lambda - phi_j)], with
/// renormalization after every factor.
PhaseDistribution phase_posterior(std::span<const double> angles, const OutcomeSequence& outcomes,
                                  int resolution = kDefaultPhaseResolution);

/// Probability that the next measurement, at config.angles()[history.size()],
/// gives +1. Throws InfeasibleError when the history itself has probability
/// zero.
double next_outcome_probability(const ExperimentConfig& config, const OutcomeSequence& history,
                                SamplingMode mode = SamplingMode::exact);

/// Draws all config.measurement_count() outcomes in order from the chain-rule
/// conditionals, using the PRNG stream (seed, chain).
OutcomeSequence sample_sequence(const ExperimentConfig& config, std::uint64_t seed,
                                SamplingMode mode = SamplingMode::exact, std::uint64_t chain = 0);

/// `count` independent sequences; sequence i is sample_sequence(config, seed,
/// mode, i).
std::vector<OutcomeSequence> sample_many(const ExperimentConfig& config, std::uint64_t seed, std::size_t count,
                                         SamplingMode mode = SamplingMode::exact);

struct Peak {
  double location = 0.0;
  double height = 0.0;
  /// Full width at half maximum, linearly interpolated between nodes.
  double width = 0.0;
};

/// Local maxima of the periodic density above 5% of the global maximum,
/// highest first. A flat density has no peaks.
std::vector<Peak> peak_statistics(const PhaseDistribution& dist);

}  // namespace fockbell
