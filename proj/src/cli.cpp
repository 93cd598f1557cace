#include "fockbell/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "fockbell/exact.hpp"
#include "fockbell/functional.hpp"
#include "fockbell/optimizer.hpp"
#include "fockbell/oracle.hpp"
#include "fockbell/parallel.hpp"
#include "fockbell/phase.hpp"

namespace fockbell::cli {
namespace {

using nlohmann::json;

constexpr double kOracleTolerance = 1e-10;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void require_object(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + what);
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + " is missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + key + "' in " + what + " has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& what) {
  return j.contains(key) ? get<T>(j, key, what) : fallback;
}

Populations read_populations(const json& j, const std::string& what) {
  if (j.contains("n")) {
    if (j.contains("n_plus") || j.contains("n_minus")) throw ConfigError(what + " gives both n and n_plus/n_minus");
    return Populations::balanced(get<int>(j, "n", what));
  }
  return Populations(get<int>(j, "n_plus", what), get<int>(j, "n_minus", what));
}

ZeroPolicy parse_zero_policy(const std::string& name) {
  if (name == "plus_one") return ZeroPolicy::plus_one;
  if (name == "zero") return ZeroPolicy::zero;
  if (name == "random") return ZeroPolicy::random;
  throw ConfigError("unknown zero policy '" + name + "' (expected plus_one, zero or random)");
}

PartyFunctional parse_functional(const std::string& name, ZeroPolicy policy) {
  if (name == "product") return PartyFunctional::product();
  if (name == "binned_sign") return PartyFunctional::binned_sign(policy);
  if (name == "pair_average") return PartyFunctional::pair_average();
  throw ConfigError("unknown functional '" + name + "' (expected product, binned_sign or pair_average)");
}

Evaluation parse_evaluation(const std::string& name) {
  if (name == "exact") return Evaluation::exact;
  if (name == "gaussian") return Evaluation::gaussian;
  throw ConfigError("unknown evaluation '" + name + "' (expected exact or gaussian)");
}

BellFunctionalSpec read_spec(const json& j, Populations pops, const std::string& what) {
  const BellForm form = parse_bell_form(get<std::string>(j, "form", what));
  if (j.contains("letters")) {
    const json& list = j.at("letters");
    if (!list.is_array()) throw ConfigError("'letters' in " + what + " must be an array");
    std::vector<Letter> letters;
    for (const json& l : list) {
      require_object(l, {"count", "functional", "zero_policy"}, "letter");
      const auto policy = parse_zero_policy(get_or<std::string>(l, "zero_policy", "plus_one", "letter"));
      letters.push_back(Letter{get<int>(l, "count", "letter"),
                               parse_functional(get_or<std::string>(l, "functional", "product", "letter"), policy)});
    }
    return BellFunctionalSpec(form, std::move(letters), get_or<bool>(j, "per_measurement_angles", false, what));
  }
  if (get_or<bool>(j, "per_measurement_angles", false, what))
    throw ConfigError("per_measurement_angles needs an explicit 'letters' list");
  const int n = pops.total();
  switch (form) {
    case BellForm::bchsh: return BellFunctionalSpec::bchsh_products(n, get<int>(j, "p", what));
    case BellForm::double_bchsh: return BellFunctionalSpec::double_bchsh_products(n);
    case BellForm::triple_bchsh: return BellFunctionalSpec::triple_bchsh_products(n);
  }
  throw ConfigError("unsupported form");
}

std::vector<double> read_angles(const json& j, const std::string& key, const std::string& what) {
  const auto angles = get<std::vector<double>>(j, key, what);
  for (double a : angles)
    if (!std::isfinite(a)) throw ConfigError("angles must be finite");
  return angles;
}

void write_row(std::ostream& os, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << format_number(values[i]);
  os << '\n';
}

json result_json(const OptimizationResult& r) {
  json j;
  j["q_max"] = r.q_max;
  j["angles"] = r.angles;
  if (r.chi) j["chi"] = *r.chi;
  j["restarts_used"] = r.restarts_used;
  j["converged"] = r.converged;
  return j;
}

struct Options {
  std::string path;
  std::string mode = "fan";
  std::string sampling = "exact";
  std::uint64_t seed = 1;
  int restarts = 64;
  std::size_t count = 1;
  std::vector<int> ns;
  int n_max = 6;
  int angle_sets = 50;
};

int cmd_correlate(const Options& o, std::ostream& os) {
  const std::string what = "correlate config";
  const json j = load_json(o.path);
  require_object(j, {"n_plus", "n_minus", "n", "angles", "angle_sets"}, what);
  const Populations pops = read_populations(j, what);
  std::vector<std::vector<double>> sets;
  if (j.contains("angles") == j.contains("angle_sets")) throw ConfigError(what + " needs exactly one of 'angles' or 'angle_sets'");
  if (j.contains("angles"))
    sets.push_back(read_angles(j, "angles", what));
  else
    sets = get<std::vector<std::vector<double>>>(j, "angle_sets", what);

  std::ostringstream body;
  for (const auto& angles : sets) {
    const ExperimentConfig config(pops, angles);
    std::vector<double> row(angles);
    row.push_back(correlation_e(config));
    write_row(body, row);
  }
  std::size_t width = sets.empty() ? 0 : sets.front().size();
  for (std::size_t i = 0; i < width; ++i) os << "phi_" << (i + 1) << ",";
  os << "E\n" << body.str();
  return kExitOk;
}

int cmd_qmax(const Options& o, std::ostream& os) {
  const std::string what = "qmax spec";
  const json j = load_json(o.path);
  require_object(j, {"form", "n", "n_plus", "n_minus", "p", "letters", "per_measurement_angles", "evaluation",
                     "start_half_width"},
                 what);
  const Populations pops = read_populations(j, what);
  OptimizationResult result;
  if (o.mode == "fan") {
    if (parse_bell_form(get<std::string>(j, "form", what)) != BellForm::bchsh || j.contains("letters") ||
        pops.n_plus != pops.n_minus)
      throw ConfigError("fan mode needs form bchsh with product letters and N+ = N-");
    result = maximize_fan(pops.total(), get<int>(j, "p", what));
  } else if (o.mode == "free") {
    FreeOptions free;
    free.seed = o.seed;
    free.restarts = o.restarts;
    free.evaluation = parse_evaluation(get_or<std::string>(j, "evaluation", "exact", what));
    free.start_half_width = get_or<double>(j, "start_half_width", kPi, what);
    result = maximize_free(read_spec(j, pops, what), pops, free);
  } else {
    throw ConfigError("--mode must be fan or free");
  }
  os << result_json(result).dump(2) << '\n';
  return kExitOk;
}

int cmd_scan(const Options& o, std::ostream& os) {
  const std::string what = "scan spec";
  const json j = load_json(o.path);
  require_object(j, {"family", "n_values", "split", "p", "evaluation", "start_half_width"}, what);
  ScanOptions scan;
  scan.family = parse_scan_family(get<std::string>(j, "family", what));
  scan.rule = parse_split_rule(get_or<std::string>(j, "split", "two", what));
  scan.fixed_p = get_or<int>(j, "p", 1, what);
  scan.free.seed = o.seed;
  scan.free.restarts = o.restarts;
  scan.free.evaluation = parse_evaluation(get_or<std::string>(j, "evaluation", "exact", what));
  scan.free.start_half_width = get_or<double>(j, "start_half_width", kPi, what);
  std::vector<int> ns = o.ns.empty() ? get<std::vector<int>>(j, "n_values", what) : o.ns;
  if (ns.empty()) throw ConfigError("scan needs at least one value of N");

  const auto rows = scan_qmax_vs_n(ns, scan);
  os << "n,q_max,chi\n";
  for (const auto& r : rows)
    os << r.n << ',' << format_number(r.result.q_max) << ',' << (r.result.chi ? format_number(*r.result.chi) : "")
       << '\n';
  return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& os) {
  const std::string what = "sample config";
  const json j = load_json(o.path);
  require_object(j, {"n_plus", "n_minus", "n", "angles"}, what);
  const ExperimentConfig config(read_populations(j, what), read_angles(j, "angles", what));
  const auto mode = parse_sampling_mode(o.sampling);
  const auto samples = sample_many(config, o.seed, o.count, mode);
  for (int i = 0; i < config.measurement_count(); ++i) os << (i ? "," : "") << "eta_" << (i + 1);
  os << '\n';
  for (const auto& s : samples) {
    for (int i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << '\n';
  }
  return kExitOk;
}

int cmd_phase(const Options& o, std::ostream& os) {
  const std::string what = "phase history";
  const json j = load_json(o.path);
  require_object(j, {"angles", "outcomes", "resolution"}, what);
  const auto angles = read_angles(j, "angles", what);
  const OutcomeSequence outcomes(get<std::vector<int>>(j, "outcomes", what));
  if (static_cast<int>(angles.size()) != outcomes.size()) throw ConfigError("history needs one angle per outcome");
  const int resolution = get_or<int>(j, "resolution", kDefaultPhaseResolution, what);
  if (resolution < 3) throw ConfigError("resolution must be at least 3");
  const auto g = phase_posterior(angles, outcomes, resolution);
  os << "lambda,g\n";
  for (int i = 0; i < g.resolution(); ++i) os << format_number(g.lambda(i)) << ',' << format_number(g[i]) << '\n';
  return kExitOk;
}

int cmd_oracle_check(const Options& o, std::ostream& os) {
  OracleCheckOptions check;
  check.n_max = o.n_max;
  check.angle_sets = o.angle_sets;
  check.seed = o.seed;
  const auto report = oracle_check(check);
  const bool ok = report.max_discrepancy < kOracleTolerance;
  os << "max_discrepancy," << format_number(report.max_discrepancy) << '\n'
     << "sequences_checked," << report.sequences_checked << '\n'
     << "worst_n_plus," << report.worst_n_plus << '\n'
     << "worst_n_minus," << report.worst_n_minus << '\n'
     << "worst_outcome_index," << report.worst_index << '\n'
     << "worst_oracle," << format_number(report.worst_oracle) << '\n'
     << "worst_exact," << format_number(report.worst_exact) << '\n'
     << "status," << (ok ? "pass" : "fail") << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact Bell statistics for transverse spin measurements on double Fock states", "fockbell"};
  app.require_subcommand(1);
  int threads = 0;
  std::string out_path;
  Options o;
  app.add_option("--threads", threads, "Worker thread cap (default: FOCKBELL_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "Write results to this file instead of stdout");

  auto* correlate = app.add_subcommand("correlate", "Product correlation E for each angle set");
  correlate->add_option("config", o.path, "JSON config")->required();

  auto* qmax = app.add_subcommand("qmax", "Maximize a Bell value over the angles");
  qmax->add_option("spec", o.path, "JSON spec")->required();
  qmax->add_option("--mode", o.mode, "fan or free")->check(CLI::IsMember({"fan", "free"}));
  qmax->add_option("--seed", o.seed, "Restart seed");
  qmax->add_option("--restarts", o.restarts, "Free-mode restarts")->check(CLI::PositiveNumber);

  auto* scan = app.add_subcommand("scan", "Maximum Bell value as a function of N");
  scan->add_option("spec", o.path, "JSON spec")->required();
  scan->add_option("--n", o.ns, "Values of N (overrides n_values)")->delimiter(',');
  scan->add_option("--seed", o.seed, "Restart seed");
  scan->add_option("--restarts", o.restarts, "Free-mode restarts")->check(CLI::PositiveNumber);

  auto* sample = app.add_subcommand("sample", "Draw outcome sequences");
  sample->add_option("config", o.path, "JSON config")->required();
  sample->add_option("--seed", o.seed, "Sampling seed");
  sample->add_option("--count", o.count, "Number of sequences");
  sample->add_option("--mode", o.sampling, "exact or classical")->check(CLI::IsMember({"exact", "classical"}));

  auto* phase = app.add_subcommand("phase", "Posterior phase density after a history");
  phase->add_option("history", o.path, "JSON history")->required();

  auto* oracle = app.add_subcommand("oracle-check", "Compare the state-vector oracle with the quadrature law");
  oracle->add_option("--n-max", o.n_max, "Largest N (at most 10)")->check(CLI::Range(1, 10));
  oracle->add_option("--seed", o.seed, "Angle seed");
  oracle->add_option("--angle-sets", o.angle_sets, "Random angle sets per population split")
      ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (threads > 0) set_thread_limit(threads);
    std::ostringstream result;
    int code = kExitOk;
    if (correlate->parsed()) code = cmd_correlate(o, result);
    else if (qmax->parsed()) code = cmd_qmax(o, result);
    else if (scan->parsed()) code = cmd_scan(o, result);
    else if (sample->parsed()) code = cmd_sample(o, result);
    else if (phase->parsed()) code = cmd_phase(o, result);
    else if (oracle->parsed()) code = cmd_oracle_check(o, result);

    if (out_path.empty()) {
      out << result.str();
    } else {
      std::ofstream file(out_path);
      if (!file) throw ConfigError("cannot write '" + out_path + "'");
      file << result.str();
    }
    return code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace fockbell::cli
