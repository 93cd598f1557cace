#include "fockbell/oracle.hpp"

#include <cmath>
#include <string>

#include "fockbell/exact.hpp"
#include "fockbell/parallel.hpp"
#include "fockbell/random.hpp"

namespace fockbell {
namespace {

using Amplitudes = std::vector<std::complex<double>>;

constexpr double kImaginaryTolerance = 1e-12;

// out = P_j in, P_j = (1 + eta sigma_phi) / 2 acting on spin j.
void apply_projector(const Amplitudes& in, Amplitudes& out, int spin, double angle, int eta) {
  const std::size_t bit = std::size_t{1} << spin;
  const std::complex<double> lower = 0.5 * eta * std::polar(1.0, -angle);  // <up| sigma |down>
  const std::complex<double> raise = std::conj(lower);
  out.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (i & bit) continue;
    const std::size_t up = i | bit;
    out[up] = 0.5 * in[up] + lower * in[i];
    out[i] = 0.5 * in[i] + raise * in[up];
  }
}

double expectation_real(const Amplitudes& psi, const Amplitudes& projected) {
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) sum += std::conj(psi[i]) * projected[i];
  if (std::abs(sum.imag()) >= kImaginaryTolerance)
    throw std::logic_error("oracle probability has imaginary part " + std::to_string(sum.imag()));
  return sum.real();
}

void check_dimensions(const SpinStateVector& state, std::size_t angles, int outcomes) {
  if (static_cast<int>(angles) != outcomes) throw ConfigError("angle and outcome counts differ");
  if (outcomes > state.spin_count()) throw ConfigError("more outcomes than spins");
}

// Depth-first over outcomes of spins [first, n); calls leaf(index, value) with
// the unnormalized <Psi| prod P |Psi> for every completion.
template <typename Leaf>
void enumerate(const SpinStateVector& state, const Amplitudes& start, std::span<const double> angles, int first,
               Leaf&& leaf) {
  const int n = state.spin_count();
  std::vector<Amplitudes> level(static_cast<std::size_t>(n - first + 1));
  level[0] = start;
  auto descend = [&](auto&& self, int depth, std::uint64_t index) -> void {
    const int spin = first + depth;
    if (spin == n) {
      leaf(index, expectation_real(state.amplitudes(), level[depth]));
      return;
    }
    for (int bit = 0; bit < 2; ++bit) {
      apply_projector(level[depth], level[depth + 1], spin, angles[spin], bit ? -1 : 1);
      self(self, depth + 1, index | (static_cast<std::uint64_t>(bit) << spin));
    }
  };
  descend(descend, 0, 0);
}

}  // namespace

SpinStateVector::SpinStateVector(int n, std::vector<std::complex<double>> amplitudes)
    : n_(n), amplitudes_(std::move(amplitudes)) {
  if (n < 0 || n > kOracleMaxSpins)
    throw ConfigError("state vectors are limited to " + std::to_string(kOracleMaxSpins) + " spins");
  if (amplitudes_.size() != (std::size_t{1} << n)) throw ConfigError("amplitude count must be 2^n");
  if (std::abs(norm_squared() - 1.0) > 1e-12) throw ConfigError("state is not normalized");
}

double SpinStateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

SpinStateVector w_state(int n_plus, int n_minus) {
  Populations pops(n_plus, n_minus);
  const int n = pops.total();
  if (n > kOracleMaxSpins)
    throw ConfigError("w_state supports at most " + std::to_string(kOracleMaxSpins) + " spins");
  Amplitudes amps(std::size_t{1} << n, 0.0);
  std::size_t support = 0;
  for (std::size_t i = 0; i < amps.size(); ++i)
    if (__builtin_popcountll(i) == n_plus) ++support;
  const double value = 1.0 / std::sqrt(static_cast<double>(support));
  for (std::size_t i = 0; i < amps.size(); ++i)
    if (__builtin_popcountll(i) == n_plus) amps[i] = value;
  return SpinStateVector(n, std::move(amps));
}

double oracle_sequence_probability(const SpinStateVector& state, std::span<const double> angles,
                                   const OutcomeSequence& outcomes) {
  check_dimensions(state, angles.size(), outcomes.size());
  if (outcomes.size() != state.spin_count()) throw ConfigError("need one outcome per spin");
  Amplitudes current = state.amplitudes();
  Amplitudes next;
  for (int j = 0; j < outcomes.size(); ++j) {
    apply_projector(current, next, j, angles[j], outcomes[j]);
    current.swap(next);
  }
  return expectation_real(state.amplitudes(), current) / state.norm_squared();
}

double oracle_marginal_probability(const SpinStateVector& state, std::span<const double> angles,
                                   const OutcomeSequence& outcomes) {
  check_dimensions(state, angles.size(), outcomes.size());
  const int m = outcomes.size();
  const int n = state.spin_count();
  if (m >= n) throw ConfigError("marginal needs fewer outcomes than spins");
  Amplitudes current = state.amplitudes();
  Amplitudes next;
  for (int j = 0; j < m; ++j) {
    apply_projector(current, next, j, angles[j], outcomes[j]);
    current.swap(next);
  }
  // Completion angles are arbitrary; the completion sum removes them.
  std::vector<double> full(angles.begin(), angles.end());
  full.resize(static_cast<std::size_t>(n), 0.0);
  double total = 0.0;
  enumerate(state, current, full, m, [&](std::uint64_t, double p) { total += p; });
  return total / state.norm_squared();
}

std::vector<double> oracle_all_probabilities(const SpinStateVector& state, std::span<const double> angles) {
  if (static_cast<int>(angles.size()) != state.spin_count()) throw ConfigError("need one angle per spin");
  std::vector<double> probs(std::size_t{1} << state.spin_count(), 0.0);
  const double norm = state.norm_squared();
  enumerate(state, state.amplitudes(), angles, 0, [&](std::uint64_t index, double p) { probs[index] = p / norm; });
  return probs;
}

OracleCheckReport oracle_check(OracleCheckOptions options) {
  if (options.n_max < 1 || options.n_max > 10) throw ConfigError("oracle check supports n_max in [1, 10]");
  if (options.angle_sets < 1) throw ConfigError("oracle check needs at least one angle set");

  struct Case {
    int n_plus, n_minus, set;
  };
  std::vector<Case> cases;
  for (int n = 1; n <= options.n_max; ++n)
    for (int plus = 0; plus <= n; ++plus)
      for (int s = 0; s < options.angle_sets; ++s) cases.push_back({plus, n - plus, s});

  std::vector<OracleCheckReport> partial(cases.size());
  parallel_for(cases.size(), [&](std::size_t c) {
    const Case& k = cases[c];
    const int n = k.n_plus + k.n_minus;
    auto rng = SplitMix64::stream(options.seed, c);
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (double& a : angles) a = rng.uniform(-kPi, kPi);
    const auto oracle = oracle_all_probabilities(w_state(k.n_plus, k.n_minus), angles);
    const auto exact = sequence_probabilities(ExperimentConfig(k.n_plus, k.n_minus, angles));
    OracleCheckReport& r = partial[c];
    r.worst_n_plus = k.n_plus;
    r.worst_n_minus = k.n_minus;
    r.worst_angles = angles;
    r.sequences_checked = oracle.size();
    for (std::uint64_t i = 0; i < oracle.size(); ++i) {
      const double d = std::abs(oracle[i] - exact[i]);
      if (d > r.max_discrepancy || i == 0) {
        r.max_discrepancy = d;
        r.worst_index = i;
        r.worst_oracle = oracle[i];
        r.worst_exact = exact[i];
      }
    }
  });

  OracleCheckReport report = partial.front();
  std::uint64_t total = 0;
  for (const auto& r : partial) {
    total += r.sequences_checked;
    if (r.max_discrepancy > report.max_discrepancy) report = r;
  }
  report.sequences_checked = total;
  return report;
}

}  // namespace fockbell
