#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fockbell/model.hpp"

namespace fockbell {

/// Pure state of n distinguishable spins. Bit j of a basis index set means
/// spin j is up.
class SpinStateVector {
 public:
  SpinStateVector(int n, std::vector<std::complex<double>> amplitudes);

  int spin_count() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amplitudes_; }
  double norm_squared() const;

 private:
  int n_;
  std::vector<std::complex<double>> amplitudes_;
};

inline constexpr int kOracleMaxSpins = 14;

/// Equal superposition of every configuration with n_plus spins up.
SpinStateVector w_state(int n_plus, int n_minus);

/// <Psi| prod_j P_j |Psi> with P_j = (1 + eta_j sigma_phi_j) / 2, one
/// measurement per spin.
double oracle_sequence_probability(const SpinStateVector& state, std::span<const double> angles,
                                   const OutcomeSequence& outcomes);

/// Probability of outcomes on the first m < n spins, summed over every
/// completion of the remaining spins.
double oracle_marginal_probability(const SpinStateVector& state, std::span<const double> angles,
                                   const OutcomeSequence& outcomes);

/// Probabilities of all 2^n full sequences, indexed as in
/// OutcomeSequence::from_index.
std::vector<double> oracle_all_probabilities(const SpinStateVector& state, std::span<const double> angles);

struct OracleCheckOptions {
  int n_max = 10;
  int angle_sets = 50;
  std::uint64_t seed = 1;
};

struct OracleCheckReport {
  double max_discrepancy = 0.0;
  int worst_n_plus = 0;
  int worst_n_minus = 0;
  std::vector<double> worst_angles;
  std::uint64_t worst_index = 0;
  double worst_oracle = 0.0;
  double worst_exact = 0.0;
  std::uint64_t sequences_checked = 0;
};

/// Compares the oracle with the quadrature law for every N in [1, n_max],
/// every population split and every outcome sequence, over random angle sets.
OracleCheckReport oracle_check(OracleCheckOptions options = {});

}  // namespace fockbell
