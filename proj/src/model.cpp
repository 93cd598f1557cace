#include "fockbell/model.hpp"

#include <cmath>
#include <numeric>

#include "fockbell/random.hpp"

namespace fockbell {

double normalize_angle(double phi) {
  if (!std::isfinite(phi)) throw ConfigError("angle must be finite");
  double r = std::fmod(phi + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  double out = r - kPi;
  // fmod can land exactly on the excluded endpoint after rounding.
  if (out >= kPi) out -= kTwoPi;
  return out;
}

Populations::Populations(int plus, int minus) : n_plus(plus), n_minus(minus) {
  if (plus < 0 || minus < 0) throw ConfigError("particle numbers must be nonnegative");
}

Populations Populations::balanced(int n) {
  if (n < 0 || n % 2 != 0) throw ConfigError("balanced populations need an even, nonnegative N");
  return Populations(n / 2, n / 2);
}

ExperimentConfig::ExperimentConfig(Populations populations, std::vector<double> angles)
    : populations_(populations), angles_(std::move(angles)) {
  if (populations_.n_plus < 0 || populations_.n_minus < 0)
    throw ConfigError("particle numbers must be nonnegative");
  if (measurement_count() > total())
    throw ConfigError("more measurements (" + std::to_string(measurement_count()) + ") than particles (" +
                      std::to_string(total()) + ")");
  for (double& phi : angles_) phi = normalize_angle(phi);
}

ExperimentConfig ExperimentConfig::prefix(int m) const {
  if (m < 0 || m > measurement_count()) throw ConfigError("prefix length out of range");
  return ExperimentConfig(populations_, std::vector<double>(angles_.begin(), angles_.begin() + m));
}

OutcomeSequence::OutcomeSequence(std::vector<int> etas) : etas_(std::move(etas)) {
  for (int e : etas_)
    if (e != 1 && e != -1) throw ConfigError("outcomes must be +1 or -1");
}

OutcomeSequence OutcomeSequence::from_index(std::uint64_t index, int length) {
  if (length < 0 || length > 63) throw ConfigError("outcome index length out of range");
  std::vector<int> etas(static_cast<std::size_t>(length));
  for (int j = 0; j < length; ++j) etas[j] = ((index >> j) & 1U) ? -1 : 1;
  return OutcomeSequence(std::move(etas));
}

int OutcomeSequence::product() const {
  int p = 1;
  for (int e : etas_) p *= e;
  return p;
}

int OutcomeSequence::sum() const { return std::accumulate(etas_.begin(), etas_.end(), 0); }

OutcomeSequence OutcomeSequence::appended(int eta) const {
  std::vector<int> etas = etas_;
  etas.push_back(eta);
  return OutcomeSequence(std::move(etas));
}

OutcomeSequence OutcomeSequence::prefix(int m) const {
  if (m < 0 || m > size()) throw ConfigError("prefix length out of range");
  return OutcomeSequence(std::vector<int>(etas_.begin(), etas_.begin() + m));
}

PartySplit::PartySplit(int p, int n) : p_(p), n_(n) {
  if (p < 1 || p > n - 1) throw ConfigError("party split needs 1 <= P <= N - 1");
}

double PartyFunctional::value_for_plus_count(int plus_count, int count) const {
  const int sum = 2 * plus_count - count;
  switch (kind_) {
    case FunctionalKind::product:
      return ((count - plus_count) % 2 == 0) ? 1.0 : -1.0;
    case FunctionalKind::binned_sign:
      if (sum > 0) return 1.0;
      if (sum < 0) return -1.0;
      return policy_ == ZeroPolicy::plus_one ? 1.0 : 0.0;
    case FunctionalKind::pair_average:
      return 0.5 * sum;
  }
  return 0.0;
}

void PartyFunctional::check_count(int count) const {
  if (count < 0) throw ConfigError("negative measurement count");
  if (kind_ == FunctionalKind::pair_average && count != 2)
    throw ConfigError("pair_average needs exactly 2 outcomes");
}

double PartyFunctional::mean_value(std::span<const int> etas) const {
  const int count = static_cast<int>(etas.size());
  check_count(count);
  int plus = 0;
  for (int e : etas) plus += (e > 0);
  return value_for_plus_count(plus, count);
}

double PartyFunctional::draw(std::span<const int> etas, SplitMix64& rng) const {
  const int count = static_cast<int>(etas.size());
  check_count(count);
  int plus = 0;
  for (int e : etas) plus += (e > 0);
  if (kind_ == FunctionalKind::binned_sign && policy_ == ZeroPolicy::random && 2 * plus == count)
    return (rng.next() >> 63) ? 1.0 : -1.0;
  return value_for_plus_count(plus, count);
}

std::string PartyFunctional::name() const {
  switch (kind_) {
    case FunctionalKind::product:
      return "product";
    case FunctionalKind::pair_average:
      return "pair_average";
    case FunctionalKind::binned_sign:
      switch (policy_) {
        case ZeroPolicy::plus_one:
          return "binned_sign(plus_one)";
        case ZeroPolicy::zero:
          return "binned_sign(zero)";
        case ZeroPolicy::random:
          return "binned_sign(random)";
      }
  }
  return "unknown";
}

int block_count(BellForm form) {
  switch (form) {
    case BellForm::bchsh:
      return 1;
    case BellForm::double_bchsh:
      return 2;
    case BellForm::triple_bchsh:
      return 3;
  }
  return 1;
}

std::string to_string(BellForm form) {
  switch (form) {
    case BellForm::bchsh:
      return "bchsh";
    case BellForm::double_bchsh:
      return "double_bchsh";
    case BellForm::triple_bchsh:
      return "triple_bchsh";
  }
  return "bchsh";
}

BellForm parse_bell_form(const std::string& name) {
  if (name == "bchsh") return BellForm::bchsh;
  if (name == "double_bchsh") return BellForm::double_bchsh;
  if (name == "triple_bchsh") return BellForm::triple_bchsh;
  throw ConfigError("unknown inequality form '" + name + "'");
}

BellFunctionalSpec::BellFunctionalSpec(BellForm form, std::vector<Letter> letters, bool per_measurement_angles)
    : form_(form), letters_(std::move(letters)), per_measurement_(per_measurement_angles) {
  const int expected = 2 * block_count(form_);
  if (letter_count() != expected)
    throw ConfigError(to_string(form_) + " needs " + std::to_string(expected) + " letters, got " +
                      std::to_string(letter_count()));
  for (const Letter& l : letters_) {
    if (l.count < 1) throw ConfigError("every letter needs at least one measurement");
    l.functional.check_count(l.count);
  }
  offsets_.reserve(letters_.size());
  int offset = 0;
  for (int i = 0; i < letter_count(); ++i) {
    offsets_.push_back(offset);
    offset += 2 * setting_width(i);
  }
}

BellFunctionalSpec BellFunctionalSpec::bchsh_products(int n, int p) {
  PartySplit split(p, n);
  return BellFunctionalSpec(BellForm::bchsh, {Letter{split.alice(), PartyFunctional::product()},
                                              Letter{split.bob(), PartyFunctional::product()}});
}

BellFunctionalSpec BellFunctionalSpec::double_bchsh_products(int n) {
  if (n < 4 || n % 2 != 0) throw ConfigError("double_bchsh needs an even N >= 4");
  const int k = n / 4;
  const int extra = (n % 4 == 0) ? 0 : 1;
  auto p = PartyFunctional::product();
  return BellFunctionalSpec(BellForm::double_bchsh,
                            {Letter{k, p}, Letter{k + extra, p}, Letter{k, p}, Letter{k + extra, p}});
}

BellFunctionalSpec BellFunctionalSpec::triple_bchsh_products(int n) {
  if (n < 6) throw ConfigError("triple_bchsh needs N >= 6");
  std::vector<Letter> letters(6);
  for (int i = 0; i < 6; ++i) letters[i] = Letter{n / 6 + (i < n % 6 ? 1 : 0), PartyFunctional::product()};
  return BellFunctionalSpec(BellForm::triple_bchsh, std::move(letters));
}

bool BellFunctionalSpec::all_products() const {
  for (const Letter& l : letters_)
    if (l.functional.kind() != FunctionalKind::product) return false;
  return true;
}

int BellFunctionalSpec::measurement_count() const {
  int m = 0;
  for (const Letter& l : letters_) m += l.count;
  return m;
}

int BellFunctionalSpec::angle_slots() const {
  int s = 0;
  for (int i = 0; i < letter_count(); ++i) s += 2 * setting_width(i);
  return s;
}

int BellFunctionalSpec::setting_width(int letter) const {
  return per_measurement_ ? letters_.at(letter).count : 1;
}

int BellFunctionalSpec::slot(int letter, bool primed) const {
  return offsets_.at(letter) + (primed ? setting_width(letter) : 0);
}

std::vector<double> BellFunctionalSpec::setting_angles(std::span<const double> slots, int letter,
                                                       bool primed) const {
  if (static_cast<int>(slots.size()) != angle_slots())
    throw ConfigError("expected " + std::to_string(angle_slots()) + " angle slots, got " +
                      std::to_string(slots.size()));
  const int count = letters_.at(letter).count;
  const int first = slot(letter, primed);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out[j] = slots[first + (per_measurement_ ? j : 0)];
  return out;
}

FanAngles::Settings FanAngles::settings() const { return Settings{chi, -chi, 0.0, 2.0 * chi}; }

PhaseDistribution::PhaseDistribution(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ConfigError("phase distribution needs at least one grid point");
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("phase density must be finite and nonnegative");
    sum += v;
  }
  if (!(sum > 0.0)) throw InfeasibleError("phase density vanishes everywhere");
  const double scale = 1.0 / (sum * spacing());
  for (double& v : values_) v *= scale;
}

double PhaseDistribution::lambda(int i) const {
  const int k = resolution();
  return kPi * static_cast<double>(2 * i - k) / static_cast<double>(k);
}

double PhaseDistribution::integral() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * spacing();
}

}  // namespace fockbell
