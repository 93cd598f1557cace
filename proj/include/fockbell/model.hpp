#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fockbell {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Malformed input or an invalid combination of parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed input for which the requested quantity does not exist
/// numerically (zero normalization, conditioning on a null event).
class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Maps a finite angle onto its representative in [-pi, pi).
double normalize_angle(double phi);

/// Signed difference x - y reduced to [-pi, pi).
inline double angle_difference(double x, double y) { return normalize_angle(x - y); }

/// Particle numbers of the two condensates.
struct Populations {
  int n_plus = 0;
  int n_minus = 0;

  Populations() = default;
  Populations(int plus, int minus);

  /// N+ = N- = n / 2; n must be even.
  static Populations balanced(int n);

  int total() const { return n_plus + n_minus; }
  int imbalance() const { return n_plus - n_minus; }
  bool operator==(const Populations&) const = default;
};

/// Particle numbers plus one transverse measurement angle per measured spin.
/// Angles are normalized to [-pi, pi) on construction; at most N angles.
class ExperimentConfig {
 public:
  ExperimentConfig(Populations populations, std::vector<double> angles);
  ExperimentConfig(int n_plus, int n_minus, std::vector<double> angles)
      : ExperimentConfig(Populations{n_plus, n_minus}, std::move(angles)) {}

  const Populations& populations() const { return populations_; }
  int n_plus() const { return populations_.n_plus; }
  int n_minus() const { return populations_.n_minus; }
  int total() const { return populations_.total(); }
  int measurement_count() const { return static_cast<int>(angles_.size()); }
  const std::vector<double>& angles() const { return angles_; }

  /// Same populations, first `m` angles only.
  ExperimentConfig prefix(int m) const;

 private:
  Populations populations_;
  std::vector<double> angles_;
};

/// Ordered measurement results, each exactly +1 or -1.
class OutcomeSequence {
 public:
  OutcomeSequence() = default;
  explicit OutcomeSequence(std::vector<int> etas);

  /// Bit j of `index` set means eta_j = -1; index 0 is all +1.
  static OutcomeSequence from_index(std::uint64_t index, int length);

  std::span<const int> etas() const { return etas_; }
  int size() const { return static_cast<int>(etas_.size()); }
  bool empty() const { return etas_.empty(); }
  int operator[](std::size_t j) const { return etas_[j]; }
  int product() const;
  int sum() const;

  OutcomeSequence appended(int eta) const;
  OutcomeSequence prefix(int m) const;
  bool operator==(const OutcomeSequence&) const = default;

 private:
  std::vector<int> etas_;
};

/// Alice's share P of N measurements; Bob takes the remaining N - P.
class PartySplit {
 public:
  PartySplit(int p, int n);
  int alice() const { return p_; }
  int bob() const { return n_ - p_; }
  int total() const { return n_; }

 private:
  int p_;
  int n_;
};

enum class FunctionalKind { product, binned_sign, pair_average };

/// Resolution of sign(0) for the binned functional. `random` draws +-1 with
/// equal probability, so its expected value at a tie is 0.
enum class ZeroPolicy { plus_one, zero, random };

class SplitMix64;

/// Rule turning one party's outcomes into a number in [-1, 1]. Every kind is
/// a symmetric function of the outcomes, so it depends only on how many of
/// them are +1.
class PartyFunctional {
 public:
  static PartyFunctional product() { return PartyFunctional(FunctionalKind::product, ZeroPolicy::plus_one); }
  static PartyFunctional binned_sign(ZeroPolicy policy = ZeroPolicy::plus_one) {
    return PartyFunctional(FunctionalKind::binned_sign, policy);
  }
  static PartyFunctional pair_average() {
    return PartyFunctional(FunctionalKind::pair_average, ZeroPolicy::plus_one);
  }

  FunctionalKind kind() const { return kind_; }
  ZeroPolicy zero_policy() const { return policy_; }

  /// Value averaged over any random tie-break, given `plus_count` of `count`
  /// outcomes equal to +1.
  double value_for_plus_count(int plus_count, int count) const;

  /// Value averaged over any random tie-break.
  double mean_value(std::span<const int> etas) const;

  /// One realization; consumes randomness only on a binned tie under
  /// ZeroPolicy::random.
  double draw(std::span<const int> etas, SplitMix64& rng) const;

  /// Rejects measurement counts the functional cannot take.
  void check_count(int count) const;

  std::string name() const;
  bool operator==(const PartyFunctional&) const = default;

 private:
  PartyFunctional(FunctionalKind kind, ZeroPolicy policy) : kind_(kind), policy_(policy) {}
  FunctionalKind kind_;
  ZeroPolicy policy_;
};

enum class BellForm { bchsh, double_bchsh, triple_bchsh };

/// Number of four-term BCHSH blocks multiplied together.
int block_count(BellForm form);
std::string to_string(BellForm form);
BellForm parse_bell_form(const std::string& name);

/// One letter (A, B, C, ...) of a Bell expression: how many measurements it
/// consumes and how they are combined.
struct Letter {
  int count = 1;
  PartyFunctional functional = PartyFunctional::product();
};

/// Inequality form plus its letters. Letters come in block pairs: (A, B) for
/// BCHSH; (A, B), (C, D) for the double form; three pairs for the triple
/// form. Every letter has an unprimed and a primed setting. With
/// `per_measurement_angles` each measurement of a setting gets its own angle,
/// otherwise one angle per setting.
///
/// Angle slots are laid out letter-major: A, A', B, B', C, C', ...
class BellFunctionalSpec {
 public:
  BellFunctionalSpec(BellForm form, std::vector<Letter> letters, bool per_measurement_angles = false);

  /// Products at one angle per setting, Alice measuring p of n spins.
  static BellFunctionalSpec bchsh_products(int n, int p);
  /// Product letters with counts (k, k, k, k) for n = 4k or (k, k+1, k, k+1)
  /// for n = 4k + 2.
  static BellFunctionalSpec double_bchsh_products(int n);
  /// Product letters spread as evenly as possible over six letters.
  static BellFunctionalSpec triple_bchsh_products(int n);

  BellForm form() const { return form_; }
  const std::vector<Letter>& letters() const { return letters_; }
  int letter_count() const { return static_cast<int>(letters_.size()); }
  bool per_measurement_angles() const { return per_measurement_; }
  bool all_products() const;

  /// Measurements used by one full cross term.
  int measurement_count() const;
  int angle_slots() const;
  /// Number of angles held by one setting of `letter`.
  int setting_width(int letter) const;
  /// First slot of the given setting.
  int slot(int letter, bool primed) const;

  /// Expands slot values to the per-measurement angles of one setting.
  std::vector<double> setting_angles(std::span<const double> slots, int letter, bool primed) const;

 private:
  BellForm form_;
  std::vector<Letter> letters_;
  bool per_measurement_;
  std::vector<int> offsets_;
};

/// Fan of four settings: a - b = b - a' = b' - a = chi, b' - a' = 3 chi.
struct FanAngles {
  double chi = 0.0;

  struct Settings {
    double a, a_prime, b, b_prime;
  };
  /// Settings with b at the origin.
  Settings settings() const;
};

/// Density on a uniform periodic grid over [-pi, pi), normalized so the
/// trapezoid integral is one.
class PhaseDistribution {
 public:
  /// Takes unnormalized nonnegative samples at lambda_i = pi (2i - K) / K.
  explicit PhaseDistribution(std::vector<double> values);

  int resolution() const { return static_cast<int>(values_.size()); }
  double spacing() const { return kTwoPi / resolution(); }
  double lambda(int i) const;
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double integral() const;

 private:
  std::vector<double> values_;
};

}  // namespace fockbell
