#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fockbell/functional.hpp"
#include "fockbell/model.hpp"

namespace fockbell {

struct OptimizationResult {
  double q_max = 0.0;
  /// Full slot assignment, first slot at 0.
  std::vector<double> angles;
  /// Fan half-step, fan mode only.
  std::optional<double> chi;
  int restarts_used = 0;
  bool converged = false;
};

/// Q(chi) = 3 E(chi) - E(3 chi) for the fan, from the closed-form correlation.
double fan_objective(int n, int p, double chi);

/// Maximizes the fan objective over chi in (0, pi/2]: a coarse scan followed by
/// golden-section refinement to 1e-10 in chi.
OptimizationResult maximize_fan(int n, int p);

struct SimplexOptions {
  double initial_step = 0.5;
  double tolerance = 1e-9;  // simplex diameter
  int max_evaluations = 200000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

/// Downhill simplex (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
/// maximizing f.
SimplexResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                                   SimplexOptions options = {});

struct FreeOptions {
  int restarts = 64;
  std::uint64_t seed = 1;
  Evaluation evaluation = Evaluation::exact;
  Law law = Law::quantum;
  /// Start points are uniform in [-w, w) per free slot. Large-N Gaussian runs
  /// want w of order a few / sqrt(N).
  double start_half_width = kPi;
  SimplexOptions simplex{};
};

inline constexpr int kMaxFreeSlots = 16;

/// Multi-start simplex over every angle slot but the first, which is pinned to
/// 0. Restarts are independent and seeded by (seed, restart index); ties keep
/// the lowest index.
OptimizationResult maximize_free(const BellFunctionalSpec& spec, Populations populations, FreeOptions options = {});

enum class ScanFamily { fan_products, double_bchsh, triple_bchsh };
/// Alice's share of a fan scan: 1, 2, N/2, or a fixed count.
enum class SplitRule { one, two, half, fixed };

ScanFamily parse_scan_family(const std::string& name);
SplitRule parse_split_rule(const std::string& name);
int split_for(SplitRule rule, int n, int fixed_p = 1);

struct ScanOptions {
  ScanFamily family = ScanFamily::fan_products;
  SplitRule rule = SplitRule::two;
  int fixed_p = 1;
  FreeOptions free{};
};

struct ScanRow {
  int n = 0;
  int p = 0;  // fan scans only
  OptimizationResult result;
};

/// One optimization per n; every n must be even.
std::vector<ScanRow> scan_qmax_vs_n(std::span<const int> ns, ScanOptions options = {});

/// Least-squares slope of log chi against log n.
double fit_power_exponent(std::span<const double> ns, std::span<const double> chis);

/// Smallest, over images of `expected` under symmetries of <Q>, of the largest
/// wrapped angle deviation from `found` after the best global rotation.
/// Candidate images come from global reflection, block permutations, swaps
/// of equal-count letters inside a block, per-letter prime swaps and per-slot
/// shifts by pi; an image is kept only if it leaves <Q> unchanged. Returns
/// +infinity when no image qualifies.
double symmetric_pattern_distance(const BellFunctionalSpec& spec, Populations populations,
                                  std::span<const double> found, std::span<const double> expected);

}  // namespace fockbell
