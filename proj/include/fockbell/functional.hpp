#pragma once

#include <span>
#include <vector>

#include "fockbell/exact.hpp"
#include "fockbell/model.hpp"

namespace fockbell {

/// Probability law behind an expectation: the exact double-integral law, or
/// the classical-phase law with nonnegative single-spin factors.
enum class Law { quantum, classical };

/// How product-letter correlations are computed inside a Bell value.
enum class Evaluation { exact, gaussian };

struct ExpectationOptions {
  int enumeration_limit = 24;
  ExactOptions exact{};
};

/// One party's functional and the angles of its measurements.
struct PartyMeasurements {
  PartyFunctional functional;
  std::vector<double> angles;
};

/// <prod_parties F_party> by summing over all 2^M outcome sequences. The
/// config's angles are assigned to the layout's letters in order.
double expectation(const ExperimentConfig& config, std::span<const Letter> layout, ExpectationOptions options = {});

/// Same quantity with the outcome sum moved inside the integrals: at each
/// quadrature point every party sums its own outcomes (a dynamic program over
/// the number of +1 results), then the parties are multiplied. Linear in the
/// party sizes instead of exponential in M.
double expectation_factorized(Populations populations, std::span<const PartyMeasurements> parties,
                              Law law = Law::quantum);

/// Evaluates <Q> for a fixed spec and populations at many angle assignments,
/// reusing the quadrature grid. Not thread-safe for concurrent calls on one
/// instance; make one per thread.
class BellEvaluator {
 public:
  BellEvaluator(BellFunctionalSpec spec, Populations populations, Evaluation evaluation = Evaluation::exact,
                Law law = Law::quantum);

  double operator()(std::span<const double> slots) const;

  const BellFunctionalSpec& spec() const { return spec_; }
  const Populations& populations() const { return populations_; }
  Evaluation evaluation() const { return evaluation_; }

 private:
  struct Term {
    double sign;
    std::vector<int> primed;  // per letter: 0 unprimed, 1 primed
  };

  // Fills one letter-setting array over the grid.
  void letter_values(int letter, std::span<const double> angles, std::vector<double>& out) const;
  double gaussian_value(std::span<const double> slots) const;

  BellFunctionalSpec spec_;
  Populations populations_;
  Evaluation evaluation_;
  Law law_;
  std::vector<Term> terms_;
  double prefactor_;
  bool one_dimensional_;
  std::vector<double> phase_nodes_;  // lambda nodes
  std::vector<double> half_a_;       // cos(Lambda_i) / 2
  std::vector<double> weights_;      // Lambda weights, including both 1/K
  double lambda_total_ = 0.0;        // sum of Lambda weights
  mutable std::vector<std::vector<double>> scratch_;
};

/// <Q> for the spec at the given angle slots.
double bell_value(const BellFunctionalSpec& spec, std::span<const double> slots, Populations populations,
                  Evaluation evaluation = Evaluation::exact, Law law = Law::quantum);

/// <Q> with every cross term computed by full outcome enumeration.
double bell_value_by_enumeration(const BellFunctionalSpec& spec, std::span<const double> slots,
                                 Populations populations, ExpectationOptions options = {});

/// Slots {a, a', b, b'} of a fan with half-step chi.
std::vector<double> fan_slots(double chi);

/// BCHSH with Alice's n - 1 outcomes binned to their sign and Bob's single
/// outcome.
BellFunctionalSpec semi_mesoscopic_spec(int n, ZeroPolicy policy = ZeroPolicy::plus_one);

/// <Q> for the semi-mesoscopic layout at slots {a, a', b, b'}; N+ = N- = n/2.
double semi_mesoscopic_value(int n, std::span<const double> slots, ZeroPolicy policy = ZeroPolicy::plus_one);

}  // namespace fockbell
