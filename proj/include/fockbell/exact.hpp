#pragma once

#include <span>
#include <vector>

#include "fockbell/model.hpp"

namespace fockbell {

/// Quadrature node count; 0 selects 2 (N + 2).
struct ExactOptions {
  int node_count = 0;
};

/// C_N = int dL/2pi cos[(N+ - N-) L] cos^N L.
double normalization_cn(int n_plus, int n_minus, ExactOptions options = {});

/// Probability of one outcome sequence for the config's M <= N measurements;
/// the N - M unmeasured spins are summed out. Clamped to [0, 1].
double sequence_probability(const ExperimentConfig& config, const OutcomeSequence& outcomes,
                            ExactOptions options = {});

/// Probabilities of all 2^M outcome sequences, indexed as in
/// OutcomeSequence::from_index. Throws ConfigError above `enumeration_limit`.
std::vector<double> sequence_probabilities(const ExperimentConfig& config, int enumeration_limit = 24,
                                           ExactOptions options = {});

/// Quantum average of the product of all M results, by direct quadrature of
/// the product of cosines.
double correlation_e(const ExperimentConfig& config, ExactOptions options = {});

/// Same average obtained as sum over outcomes of (product of etas) x probability.
double correlation_e_by_enumeration(const ExperimentConfig& config, int enumeration_limit = 24,
                                    ExactOptions options = {});

/// Product correlation for N+ = N- = n/2, Alice measuring p spins at one
/// angle and Bob n - p at another, as a finite factorial sum in chi. Works for
/// large n; terms are accumulated in log space.
double correlation_closed_form(int n, int p, double chi);

/// Large-N Gaussian approximation exp(-p (n - p) chi^2 / (2 n)).
double correlation_gaussian(int n, int p, double chi);

/// Measurements at one common angle.
struct AngleGroup {
  int count = 1;
  double angle = 0.0;
};

/// Gaussian approximation for any number of equal-angle groups covering all
/// n spins: exp(-sum_{g<h} n_g n_h (theta_g - theta_h)^2 / (2 n)), with the
/// differences wrapped to [-pi, pi).
double correlation_gaussian(int n, std::span<const AngleGroup> groups);

/// Attenuation G(M, N+, N-) of the product correlation when only M of N spins
/// are measured, from the factorial formula. Zero for odd M or M/2 > N+-.
double correction_factor_g(int m, int n_plus, int n_minus);

/// G from its definition as a ratio of quadratures.
double correction_factor_g_quadrature(int m, int n_plus, int n_minus);

/// Classical-phase law: 2^-M int dl/2pi prod [1 + eta_j cos(l - phi_j)].
double classical_sequence_probability(std::span<const double> angles, const OutcomeSequence& outcomes);

namespace detail {

/// Lambda-side weights cos[(N+ - N-) L] cos^(N-M) L at each node, divided by
/// C_N and by the node count, so that sum_i w_i f(L_i) is the normalized
/// Lambda integral.
struct LambdaWeights {
  std::vector<double> cos_lambda;  // cos L_i
  std::vector<double> weight;      // normalized weight per node
};
LambdaWeights lambda_weights(Populations populations, int measured, int node_count);

int default_node_count(Populations populations);

}  // namespace detail

}  // namespace fockbell
