#include "fockbell/functional.hpp"

#include <cmath>
#include <cstdint>

#include "fockbell/quadrature.hpp"

namespace fockbell {
namespace {

void check_layout(std::span<const Letter> layout, int measurements) {
  int total = 0;
  for (const Letter& l : layout) {
    l.functional.check_count(l.count);
    total += l.count;
  }
  if (total != measurements)
    throw ConfigError("layout covers " + std::to_string(total) + " measurements, config has " +
                      std::to_string(measurements));
}

// Sum over one party's outcomes of F(etas) * prod_j (a/2 + eta_j c_j/2), at one
// grid point. `coef` is scratch of size count + 1.
double party_sum(const PartyFunctional& f, double half_a, std::span<const double> half_c, std::vector<double>& coef) {
  const int m = static_cast<int>(half_c.size());
  if (f.kind() == FunctionalKind::product) {
    // sum_eta eta (a/2 + eta c/2) = c per factor.
    double prod = 1.0;
    for (double hc : half_c) prod *= 2.0 * hc;
    return prod;
  }
  coef.assign(static_cast<std::size_t>(m) + 1, 0.0);
  coef[0] = 1.0;
  for (int j = 0; j < m; ++j) {
    const double up = half_a + half_c[j];
    const double down = half_a - half_c[j];
    for (int k = j + 1; k >= 1; --k) coef[k] = coef[k] * down + coef[k - 1] * up;
    coef[0] *= down;
  }
  double total = 0.0;
  for (int k = 0; k <= m; ++k) total += f.value_for_plus_count(k, m) * coef[k];
  return total;
}

struct Grid {
  std::vector<double> phase_nodes;
  std::vector<double> half_a;
  std::vector<double> weights;  // include 1/K of the phase rule
};

Grid make_grid(Populations populations, int measured, Law law) {
  Grid g;
  if (law == Law::classical) {
    QuadratureRule rule(2 * (measured + 2));
    g.phase_nodes = rule.nodes();
    g.half_a = {0.5};
    g.weights = {rule.weight()};
    return g;
  }
  if (measured > populations.total()) throw ConfigError("more measurements than particles");
  const int k = detail::default_node_count(populations);
  const auto lw = detail::lambda_weights(populations, measured, k);
  QuadratureRule rule(k);
  g.phase_nodes = rule.nodes();
  g.half_a.resize(k);
  g.weights.resize(k);
  for (int i = 0; i < k; ++i) {
    g.half_a[i] = 0.5 * lw.cos_lambda[i];
    g.weights[i] = lw.weight[i] * rule.weight();
  }
  return g;
}

}  // namespace

double expectation(const ExperimentConfig& config, std::span<const Letter> layout, ExpectationOptions options) {
  const int m = config.measurement_count();
  check_layout(layout, m);
  const auto probs = sequence_probabilities(config, options.enumeration_limit, options.exact);
  double total = 0.0;
  double carry = 0.0;
  for (std::uint64_t index = 0; index < probs.size(); ++index) {
    if (probs[index] == 0.0) continue;
    double value = 1.0;
    int offset = 0;
    for (const Letter& l : layout) {
      const std::uint64_t mask = ((std::uint64_t{1} << l.count) - 1) << offset;
      const int minus = __builtin_popcountll(index & mask);
      value *= l.functional.value_for_plus_count(l.count - minus, l.count);
      offset += l.count;
    }
    // Neumaier step.
    const double x = value * probs[index];
    const double t = total + x;
    carry += (std::abs(total) >= std::abs(x)) ? (total - t) + x : (x - t) + total;
    total = t;
  }
  return total + carry;
}

double expectation_factorized(Populations populations, std::span<const PartyMeasurements> parties, Law law) {
  int measured = 0;
  for (const auto& p : parties) {
    p.functional.check_count(static_cast<int>(p.angles.size()));
    measured += static_cast<int>(p.angles.size());
  }
  const Grid g = make_grid(populations, measured, law);
  const int kp = static_cast<int>(g.phase_nodes.size());
  std::vector<std::vector<double>> half_c(parties.size());
  std::vector<double> coef;
  double total = 0.0;
  for (std::size_t i = 0; i < g.half_a.size(); ++i) {
    double inner = 0.0;
    for (int q = 0; q < kp; ++q) {
      double prod = 1.0;
      for (std::size_t p = 0; p < parties.size(); ++p) {
        auto& hc = half_c[p];
        hc.resize(parties[p].angles.size());
        for (std::size_t j = 0; j < hc.size(); ++j) hc[j] = 0.5 * std::cos(g.phase_nodes[q] - parties[p].angles[j]);
        prod *= party_sum(parties[p].functional, g.half_a[i], hc, coef);
      }
      inner += prod;
    }
    total += g.weights[i] * inner;
  }
  return total;
}

BellEvaluator::BellEvaluator(BellFunctionalSpec spec, Populations populations, Evaluation evaluation, Law law)
    : spec_(std::move(spec)), populations_(populations), evaluation_(evaluation), law_(law) {
  const int blocks = block_count(spec_.form());
  const int measured = spec_.measurement_count();
  if (law_ == Law::quantum && measured > populations_.total())
    throw ConfigError("inequality uses " + std::to_string(measured) + " measurements but N = " +
                      std::to_string(populations_.total()));
  prefactor_ = std::ldexp(1.0, -(blocks - 1));

  int combos = 1;
  for (int b = 0; b < blocks; ++b) combos *= 4;
  terms_.reserve(static_cast<std::size_t>(combos));
  for (int c = 0; c < combos; ++c) {
    Term t{1.0, std::vector<int>(static_cast<std::size_t>(spec_.letter_count()), 0)};
    int code = c;
    for (int b = 0; b < blocks; ++b) {
      const int digit = code % 4;
      code /= 4;
      // AB + A'B + AB' - A'B'
      t.primed[2 * b] = (digit == 1 || digit == 3) ? 1 : 0;
      t.primed[2 * b + 1] = (digit == 2 || digit == 3) ? 1 : 0;
      if (digit == 3) t.sign = -t.sign;
    }
    terms_.push_back(std::move(t));
  }

  if (evaluation_ == Evaluation::gaussian) {
    if (law_ != Law::quantum || !spec_.all_products() || measured != populations_.total())
      throw ConfigError("gaussian evaluation needs product letters measuring every spin");
    one_dimensional_ = true;
    return;
  }

  const Grid g = make_grid(populations_, measured, law_);
  phase_nodes_ = g.phase_nodes;
  half_a_ = g.half_a;
  weights_ = g.weights;
  for (double w : weights_) lambda_total_ += w;
  // Product letters do not depend on Lambda, so the Lambda integral factors out.
  one_dimensional_ = spec_.all_products();
  scratch_.resize(static_cast<std::size_t>(2 * spec_.letter_count()));
}

void BellEvaluator::letter_values(int letter, std::span<const double> angles, std::vector<double>& out) const {
  const int kp = static_cast<int>(phase_nodes_.size());
  const auto& f = spec_.letters()[letter].functional;
  if (one_dimensional_) {
    out.assign(static_cast<std::size_t>(kp), 1.0);
    for (double phi : angles)
      for (int q = 0; q < kp; ++q) out[q] *= std::cos(phase_nodes_[q] - phi);
    return;
  }
  const int ka = static_cast<int>(half_a_.size());
  out.resize(static_cast<std::size_t>(ka) * kp);
  std::vector<double> half_c(angles.size());
  std::vector<double> coef;
  for (int q = 0; q < kp; ++q) {
    for (std::size_t j = 0; j < angles.size(); ++j) half_c[j] = 0.5 * std::cos(phase_nodes_[q] - angles[j]);
    for (int i = 0; i < ka; ++i)
      out[static_cast<std::size_t>(i) * kp + q] = party_sum(f, half_a_[i], half_c, coef);
  }
}

double BellEvaluator::gaussian_value(std::span<const double> slots) const {
  const int letters = spec_.letter_count();
  std::vector<AngleGroup> groups;
  double total = 0.0;
  for (const Term& t : terms_) {
    groups.clear();
    for (int l = 0; l < letters; ++l) {
      const auto angles = spec_.setting_angles(slots, l, t.primed[l] != 0);
      if (spec_.per_measurement_angles()) {
        for (double a : angles) groups.push_back(AngleGroup{1, a});
      } else {
        groups.push_back(AngleGroup{spec_.letters()[l].count, angles.front()});
      }
    }
    total += t.sign * correlation_gaussian(populations_.total(), groups);
  }
  return prefactor_ * total;
}

double BellEvaluator::operator()(std::span<const double> slots) const {
  if (static_cast<int>(slots.size()) != spec_.angle_slots())
    throw ConfigError("expected " + std::to_string(spec_.angle_slots()) + " angle slots, got " +
                      std::to_string(slots.size()));
  if (evaluation_ == Evaluation::gaussian) return gaussian_value(slots);

  const int letters = spec_.letter_count();
  for (int l = 0; l < letters; ++l)
    for (int primed = 0; primed < 2; ++primed)
      letter_values(l, spec_.setting_angles(slots, l, primed != 0), scratch_[2 * l + primed]);

  const int kp = static_cast<int>(phase_nodes_.size());
  double total = 0.0;
  for (const Term& t : terms_) {
    double term = 0.0;
    if (one_dimensional_) {
      for (int q = 0; q < kp; ++q) {
        double prod = 1.0;
        for (int l = 0; l < letters; ++l) prod *= scratch_[2 * l + t.primed[l]][q];
        term += prod;
      }
      term *= lambda_total_;
    } else {
      for (std::size_t i = 0; i < half_a_.size(); ++i) {
        double inner = 0.0;
        const std::size_t row = i * static_cast<std::size_t>(kp);
        for (int q = 0; q < kp; ++q) {
          double prod = 1.0;
          for (int l = 0; l < letters; ++l) prod *= scratch_[2 * l + t.primed[l]][row + q];
          inner += prod;
        }
        term += weights_[i] * inner;
      }
    }
    total += t.sign * term;
  }
  return prefactor_ * total;
}

double bell_value(const BellFunctionalSpec& spec, std::span<const double> slots, Populations populations,
                  Evaluation evaluation, Law law) {
  return BellEvaluator(spec, populations, evaluation, law)(slots);
}

double bell_value_by_enumeration(const BellFunctionalSpec& spec, std::span<const double> slots,
                                 Populations populations, ExpectationOptions options) {
  const int blocks = block_count(spec.form());
  const int letters = spec.letter_count();
  std::vector<Letter> layout(spec.letters().begin(), spec.letters().end());
  int combos = 1;
  for (int b = 0; b < blocks; ++b) combos *= 4;
  double total = 0.0;
  for (int c = 0; c < combos; ++c) {
    double sign = 1.0;
    std::vector<double> angles;
    int code = c;
    std::vector<int> primed(static_cast<std::size_t>(letters));
    for (int b = 0; b < blocks; ++b) {
      const int digit = code % 4;
      code /= 4;
      primed[2 * b] = (digit == 1 || digit == 3);
      primed[2 * b + 1] = (digit == 2 || digit == 3);
      if (digit == 3) sign = -sign;
    }
    for (int l = 0; l < letters; ++l) {
      const auto a = spec.setting_angles(slots, l, primed[l] != 0);
      angles.insert(angles.end(), a.begin(), a.end());
    }
    total += sign * expectation(ExperimentConfig(populations, std::move(angles)), layout, options);
  }
  return std::ldexp(total, -(blocks - 1));
}

std::vector<double> fan_slots(double chi) {
  const auto s = FanAngles{chi}.settings();
  return {s.a, s.a_prime, s.b, s.b_prime};
}

BellFunctionalSpec semi_mesoscopic_spec(int n, ZeroPolicy policy) {
  if (n < 2 || n % 2 != 0) throw ConfigError("semi-mesoscopic layout needs an even N >= 2");
  return BellFunctionalSpec(BellForm::bchsh,
                            {Letter{n - 1, PartyFunctional::binned_sign(policy)}, Letter{1, PartyFunctional::product()}});
}

double semi_mesoscopic_value(int n, std::span<const double> slots, ZeroPolicy policy) {
  return bell_value(semi_mesoscopic_spec(n, policy), slots, Populations::balanced(n));
}

}  // namespace fockbell
