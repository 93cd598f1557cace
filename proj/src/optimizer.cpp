#include "fockbell/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fockbell/exact.hpp"
#include "fockbell/parallel.hpp"
#include "fockbell/random.hpp"

namespace fockbell {
namespace {

constexpr int kFanScanPoints = 4000;
constexpr double kFanTolerance = 1e-10;

std::vector<double> gauge_fixed(std::span<const double> slots) {
  std::vector<double> out(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) out[i] = angle_difference(slots[i], slots[0]);
  return out;
}

}  // namespace

double fan_objective(int n, int p, double chi) {
  return 3.0 * correlation_closed_form(n, p, chi) - correlation_closed_form(n, p, 3.0 * chi);
}

OptimizationResult maximize_fan(int n, int p) {
  PartySplit split(p, n);
  auto q = [&](double chi) { return fan_objective(n, p, chi); };
  const double hi = kPi / 2.0;
  const double step = hi / kFanScanPoints;
  int best = 1;
  double best_value = q(step);
  for (int i = 2; i <= kFanScanPoints; ++i) {
    const double v = q(i * step);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  // Golden section on the bracketing cell pair.
  double lo = (best - 1) * step;
  double up = std::min(hi, (best + 1) * step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = up - inv_phi * (up - lo);
  double x2 = lo + inv_phi * (up - lo);
  double f1 = q(x1);
  double f2 = q(x2);
  while (up - lo > kFanTolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (up - lo);
      f2 = q(x2);
    } else {
      up = x2;
      x2 = x1;
      f2 = f1;
      x1 = up - inv_phi * (up - lo);
      f1 = q(x1);
    }
  }
  double chi = 0.5 * (lo + up);
  double value = q(chi);
  if (best_value > value) {
    chi = best * step;
    value = best_value;
  }

  OptimizationResult result;
  result.q_max = value;
  result.chi = chi;
  result.angles = gauge_fixed(fan_slots(chi));
  result.restarts_used = 1;
  result.converged = true;
  return result;
}

SimplexResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                                   SimplexOptions options) {
  const std::size_t dim = start.size();
  SimplexResult result;
  int evals = 0;
  auto cost = [&](const std::vector<double>& x) {
    ++evals;
    return -f(x);
  };
  if (dim == 0) {
    result.value = -cost(start);
    result.x = std::move(start);
    result.converged = true;
    result.evaluations = evals;
    return result;
  }

  std::vector<std::vector<double>> pts(dim + 1, start);
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += options.initial_step;
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = cost(pts[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](double t, const std::vector<double>& toward, std::vector<double>& out) {
    for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + t * (toward[k] - centroid[k]);
  };

  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    {
      std::vector<std::vector<double>> p2(dim + 1);
      std::vector<double> v2(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) {
        p2[i] = std::move(pts[order[i]]);
        v2[i] = vals[order[i]];
      }
      pts = std::move(p2);
      vals = std::move(v2);
    }
    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) diameter = std::max(diameter, std::abs(pts[i][k] - pts[0][k]));
    if (diameter < options.tolerance) {
      converged = true;
      break;
    }
    if (evals >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += pts[i][k];
    for (double& c : centroid) c /= static_cast<double>(dim);

    const auto& worst = pts[dim];
    along(-1.0, worst, trial);  // reflection
    const double fr = cost(trial);
    if (fr < vals[0]) {
      along(-2.0, worst, trial2);  // expansion
      const double fe = cost(trial2);
      if (fe < fr) {
        pts[dim] = trial2;
        vals[dim] = fe;
      } else {
        pts[dim] = trial;
        vals[dim] = fr;
      }
      continue;
    }
    if (fr < vals[dim - 1]) {
      pts[dim] = trial;
      vals[dim] = fr;
      continue;
    }
    if (fr < vals[dim]) {
      along(-0.5, worst, trial2);  // outside contraction
      const double fc = cost(trial2);
      if (fc <= fr) {
        pts[dim] = trial2;
        vals[dim] = fc;
        continue;
      }
    } else {
      along(0.5, worst, trial2);  // inside contraction
      const double fc = cost(trial2);
      if (fc < vals[dim]) {
        pts[dim] = trial2;
        vals[dim] = fc;
        continue;
      }
    }
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
      vals[i] = cost(pts[i]);
    }
  }

  result.x = pts[0];
  result.value = -vals[0];
  result.converged = converged;
  result.evaluations = evals;
  return result;
}

OptimizationResult maximize_free(const BellFunctionalSpec& spec, Populations populations, FreeOptions options) {
  const int slots = spec.angle_slots();
  if (slots > kMaxFreeSlots)
    throw ConfigError("free maximization supports at most " + std::to_string(kMaxFreeSlots) + " angle slots");
  if (options.restarts < 1) throw ConfigError("need at least one restart");
  // Fails early on inconsistent counts.
  BellEvaluator probe(spec, populations, options.evaluation, options.law);

  struct Outcome {
    double value;
    std::vector<double> angles;
    bool converged;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(options.restarts));
  parallel_for(outcomes.size(), [&](std::size_t r) {
    BellEvaluator eval(spec, populations, options.evaluation, options.law);
    std::vector<double> full(static_cast<std::size_t>(slots), 0.0);
    auto objective = [&](std::span<const double> x) {
      std::copy(x.begin(), x.end(), full.begin() + 1);
      return eval(full);
    };
    auto rng = SplitMix64::stream(options.seed, r);
    std::vector<double> start(static_cast<std::size_t>(slots - 1));
    for (double& s : start) s = rng.uniform(-options.start_half_width, options.start_half_width);

    SimplexOptions simplex = options.simplex;
    simplex.initial_step = std::min(simplex.initial_step, options.start_half_width);
    SimplexResult first = nelder_mead_maximize(objective, start, simplex);
    // A fresh simplex from the converged point guards against collapse on a
    // non-stationary face.
    simplex.initial_step *= 0.1;
    SimplexResult second = nelder_mead_maximize(objective, first.x, simplex);
    const SimplexResult& best = second.value >= first.value ? second : first;

    std::vector<double> angles(static_cast<std::size_t>(slots), 0.0);
    std::copy(best.x.begin(), best.x.end(), angles.begin() + 1);
    angles = gauge_fixed(angles);
    outcomes[r] = Outcome{eval(angles), std::move(angles), first.converged && second.converged};
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].value > outcomes[best].value) best = r;
  OptimizationResult result;
  result.q_max = outcomes[best].value;
  result.angles = outcomes[best].angles;
  result.restarts_used = options.restarts;
  result.converged = outcomes[best].converged;
  return result;
}

ScanFamily parse_scan_family(const std::string& name) {
  if (name == "fan") return ScanFamily::fan_products;
  if (name == "double_bchsh") return ScanFamily::double_bchsh;
  if (name == "triple_bchsh") return ScanFamily::triple_bchsh;
  throw ConfigError("unknown scan family '" + name + "' (expected fan, double_bchsh or triple_bchsh)");
}

SplitRule parse_split_rule(const std::string& name) {
  if (name == "one") return SplitRule::one;
  if (name == "two") return SplitRule::two;
  if (name == "half") return SplitRule::half;
  if (name == "fixed") return SplitRule::fixed;
  throw ConfigError("unknown split rule '" + name + "' (expected one, two, half or fixed)");
}

int split_for(SplitRule rule, int n, int fixed_p) {
  switch (rule) {
    case SplitRule::one: return 1;
    case SplitRule::two: return 2;
    case SplitRule::half: return n / 2;
    case SplitRule::fixed: return fixed_p;
  }
  return 1;
}

std::vector<ScanRow> scan_qmax_vs_n(std::span<const int> ns, ScanOptions options) {
  std::vector<ScanRow> rows;
  rows.reserve(ns.size());
  for (int n : ns) {
    if (n < 2 || n % 2 != 0) throw ConfigError("scan values of N must be even and >= 2, got " + std::to_string(n));
    ScanRow row;
    row.n = n;
    switch (options.family) {
      case ScanFamily::fan_products:
        row.p = split_for(options.rule, n, options.fixed_p);
        row.result = maximize_fan(n, row.p);
        break;
      case ScanFamily::double_bchsh:
        row.result = maximize_free(BellFunctionalSpec::double_bchsh_products(n), Populations::balanced(n), options.free);
        break;
      case ScanFamily::triple_bchsh:
        row.result = maximize_free(BellFunctionalSpec::triple_bchsh_products(n), Populations::balanced(n), options.free);
        break;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double fit_power_exponent(std::span<const double> ns, std::span<const double> chis) {
  if (ns.size() != chis.size() || ns.size() < 2) throw ConfigError("power fit needs two or more matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(ns[i]);
    const double y = std::log(chis[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double symmetric_pattern_distance(const BellFunctionalSpec& spec, Populations populations,
                                  std::span<const double> found, std::span<const double> expected) {
  const int slots = spec.angle_slots();
  if (static_cast<int>(found.size()) != slots || static_cast<int>(expected.size()) != slots)
    throw ConfigError("pattern sizes must match the angle slot count");
  const int letters = spec.letter_count();
  const int blocks = block_count(spec.form());

  // Letter relabelings: block permutations, then optional in-block swaps.
  std::vector<std::vector<int>> relabelings;
  std::vector<int> block_order(static_cast<std::size_t>(blocks));
  std::iota(block_order.begin(), block_order.end(), 0);
  do {
    bool counts_match = true;
    for (int b = 0; b < blocks && counts_match; ++b)
      for (int side = 0; side < 2; ++side)
        if (spec.letters()[2 * b + side].count != spec.letters()[2 * block_order[b] + side].count ||
            spec.letters()[2 * b + side].functional != spec.letters()[2 * block_order[b] + side].functional)
          counts_match = false;
    if (!counts_match) continue;
    for (int swaps = 0; swaps < (1 << blocks); ++swaps) {
      std::vector<int> source(static_cast<std::size_t>(letters));
      bool ok = true;
      for (int b = 0; b < blocks; ++b) {
        const int from = 2 * block_order[b];
        const bool swap = (swaps >> b) & 1;
        if (swap && (spec.letters()[from].count != spec.letters()[from + 1].count ||
                     spec.letters()[from].functional != spec.letters()[from + 1].functional))
          ok = false;
        source[2 * b] = swap ? from + 1 : from;
        source[2 * b + 1] = swap ? from : from + 1;
      }
      if (ok) relabelings.push_back(std::move(source));
    }
  } while (std::next_permutation(block_order.begin(), block_order.end()));

  const double total_images = 2.0 * static_cast<double>(relabelings.size()) * std::ldexp(1.0, letters) *
                              std::ldexp(1.0, slots);
  if (total_images > static_cast<double>(1 << 22)) throw ConfigError("too many symmetry images to enumerate");

  BellEvaluator eval(spec, populations);
  const double reference = eval(expected);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> image(static_cast<std::size_t>(slots));
  for (const auto& source : relabelings)
    for (int primes = 0; primes < (1 << letters); ++primes)
      for (int reflect = 0; reflect < 2; ++reflect)
        for (int shifts = 0; shifts < (1 << slots); ++shifts) {
          for (int l = 0; l < letters; ++l)
            for (int primed = 0; primed < 2; ++primed) {
              const int from_primed = primed ^ ((primes >> source[l]) & 1);
              const int to = spec.slot(l, primed != 0);
              const int from = spec.slot(source[l], from_primed != 0);
              for (int w = 0; w < spec.setting_width(l); ++w) image[to + w] = expected[from + w];
            }
          for (int s = 0; s < slots; ++s) {
            double v = image[s] + (((shifts >> s) & 1) ? kPi : 0.0);
            image[s] = reflect ? -v : v;
          }
          if (std::abs(eval(image) - reference) > 1e-9 * std::max(1.0, std::abs(reference))) continue;
          double sin_sum = 0.0, cos_sum = 0.0;
          for (int s = 0; s < slots; ++s) {
            const double d = angle_difference(found[s], image[s]);
            sin_sum += std::sin(d);
            cos_sum += std::cos(d);
          }
          const double rotation = std::atan2(sin_sum, cos_sum);
          double worst = 0.0;
          for (int s = 0; s < slots; ++s)
            worst = std::max(worst, std::abs(angle_difference(found[s], image[s] + rotation)));
          best = std::min(best, worst);
        }
  return best;
}

}  // namespace fockbell
