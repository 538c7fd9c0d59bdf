#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "abft/abft.hpp"

namespace abft::cli {

namespace {

// Bad user input: exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while producing output: exit 3.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("out: cannot open '" + *path + "' for writing");
  file << text;
  if (!file.flush()) throw OutputError("out: write to '" + *path + "' failed");
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("ABFT_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string text(raw);
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.front() == '-') {
    throw UsageError("ABFT_SEED: '" + text + "' is not an unsigned 64-bit integer");
  }
  return value;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool is_headline(const std::string& metric) {
  auto ends_with = [&](std::string_view suffix) {
    return metric.size() >= suffix.size() &&
           metric.compare(metric.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(metric::kSuccesses) || ends_with(metric::kSswFrames) ||
         ends_with("success_probability");
}

// One line per x value, listing the headline metrics of that x in row order.
void print_summary(const SweepResult& result, std::ostream& os) {
  std::map<double, std::string> lines;
  std::vector<double> order;
  for (const SweepRow& row : result.rows) {
    if (!is_headline(row.metric)) continue;
    auto [it, inserted] = lines.try_emplace(row.x, "x=" + format_number(row.x));
    if (inserted) order.push_back(row.x);
    it->second += " " + row.metric + "=" + format_number(row.mean) + " ci95=" + format_number(row.ci95);
  }
  for (double x : order) os << lines[x] << '\n';
}

struct SimulateArgs {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<std::string> out;
  std::string format{"csv"};
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int workers{0};
  bool quiet{false};
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const std::optional<std::uint64_t> fallback = env_seed();
  SweepResult result;
  if (a.preset) {
    const FigureId id = parse_figure(*a.preset);
    FigureOverrides overrides;
    overrides.trials = a.trials;
    overrides.workers = a.workers;
    result = sweep_figure(id, overrides, a.seed.value_or(fallback.value_or(1)));
  } else {
    SimulationDocument doc = simulation_from_json(read_file(*a.config));
    ScenarioConfig& cfg = doc.scenario;
    if (a.seed) {
      cfg.master_seed = *a.seed;
    } else if (fallback) {
      cfg.master_seed = *fallback;
    }
    if (a.trials) cfg.trials = *a.trials;
    if (a.workers > 0) cfg.workers = a.workers;
    result = doc.sweep ? run_population_sweep(cfg, *doc.sweep) : run_experiment(cfg);
  }

  const std::string text = a.format == "json" ? to_json(result) + "\n" : to_csv(result);
  emit(text, a.out, out);
  if (!a.quiet) print_summary(result, a.out ? out : err);
  return kExitOk;
}

struct AnalyzeArgs {
  std::optional<std::string> config;
  std::optional<std::string> out;
  double p_floor{1.0};
  int m{3};
  std::optional<int> n;
  double s{1.0};
  double tol{1e-10};
  int max_iter{10000};
  bool states{false};
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  markov::ChainParams params{a.p_floor, a.m, a.n.value_or(a.m), a.s};
  if (a.config) params = chain_params_from_json(read_file(*a.config));
  markov::validate_chain(params);
  markov::SolverOptions options;
  options.tol = a.tol;
  options.max_iter = a.max_iter;
  try {
    const markov::ChainSolution sol = markov::solve_fixed_point(params, options);
    emit(to_json(sol, a.states) + "\n", a.out, out);
  } catch (const markov::ConvergenceError& e) {
    err << "error: " << e.what() << "\nlast iterate: " << to_json(e.last_iterate(), a.states) << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

struct OptimizeArgs {
  double s{1.0};
  double p_floor{1.0};
  int fss{16};
  std::string format{"table"};
  std::optional<std::string> out;
};

std::string plan_table(const planner::MPlan& plan) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-3s %-8s %-7s %-12s %-12s %s\n", "m", "n_waste", "n_send", "pe",
                "n_slot", "converged");
  os << line;
  for (const planner::MPlanRow& row : plan.rows) {
    std::snprintf(line, sizeof line, "%-3d %-8d %-7d %-12.6f %-12.6f %s\n", row.m, row.n_waste,
                  row.n_send, row.pe, row.n_slot, row.converged ? "yes" : "no");
    os << line;
  }
  os << "m* = " << plan.best_m << '\n';
  return os.str();
}

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  if (!(a.p_floor > 0.0 && a.p_floor <= 1.0)) throw RangeError("p_floor outside (0, 1]");
  if (!(a.s >= 0.0)) throw RangeError("s must be >= 0");
  const planner::MPlan plan = planner::optimize_m(a.s, a.p_floor, a.fss);
  emit(a.format == "json" ? to_json(plan) + "\n" : plan_table(plan), a.out, out);
  return kExitOk;
}

struct CodecArgs {
  int abft_length{8};
  int fss{16};
  bool oi{false};
  int e_abft_length{0};
  std::string hex;
  std::string format{"text"};
};

std::string describe(const codec::BeaconIntervalControl& bic) {
  std::ostringstream os;
  os << "abft_length=" << bic.abft_length << " fss=" << bic.fss << " oi=" << (bic.oi ? 1 : 0)
     << " e_abft_length=" << bic.e_abft_length << " other_bits=0x" << std::hex << bic.other_bits
     << " ext_reserved=0x" << static_cast<int>(bic.ext_reserved) << '\n';
  return os.str();
}

int cmd_encode(const CodecArgs& a, std::ostream& out) {
  codec::BeaconIntervalControl bic;
  bic.abft_length = a.abft_length;
  bic.fss = a.fss;
  bic.oi = a.oi;
  bic.e_abft_length = a.e_abft_length;
  out << codec::to_hex(codec::encode_bic(bic)) << '\n';
  return kExitOk;
}

int cmd_decode(const CodecArgs& a, std::ostream& out) {
  const std::vector<std::uint8_t> bytes = codec::from_hex(a.hex);
  const codec::BeaconIntervalControl bic = codec::decode_bic(bytes);
  out << (a.format == "json" ? to_json(bic) + "\n" : describe(bic));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"A-BFT contention simulator and analytic model", "abft"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "abft 0.1.0");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of a scenario or figure preset");
  auto* config_opt = simulate->add_option("--config", sim.config, "Scenario JSON document")
                         ->check(CLI::ExistingFile);
  auto* preset_opt = simulate->add_option("--preset", sim.preset, "Figure preset")
                         ->check(CLI::IsMember({"fig5", "fig8", "fig15", "fig16", "fig17"}));
  config_opt->excludes(preset_opt);
  simulate->add_option("--out", sim.out, "Output file (default: stdout)");
  simulate->add_option("--format", sim.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--seed", sim.seed, "Master seed (default: $ABFT_SEED, config, 1)");
  simulate->add_option("--trials", sim.trials, "Trials per point")->check(CLI::PositiveNumber);
  simulate->add_option("--workers", sim.workers, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_flag("-q,--quiet", sim.quiet, "Suppress the per-x summary");

  AnalyzeArgs ana;
  auto* analyze = app.add_subcommand("analyze", "Solve the secondary-backoff Markov chain");
  analyze->add_option("--config", ana.config, "Chain parameters JSON document")->check(CLI::ExistingFile);
  analyze->add_option("-P,--p-floor", ana.p_floor, "P-phase floor P");
  analyze->add_option("--m", ana.m, "Maximum failed times m");
  analyze->add_option("--n", ana.n, "Maximum prohibited times n (default: m)");
  analyze->add_option("--s", ana.s, "Average contenders per slot");
  analyze->add_option("--tol", ana.tol, "Fixed-point tolerance");
  analyze->add_option("--max-iter", ana.max_iter, "Iteration limit");
  analyze->add_flag("--states", ana.states, "Include the stationary vector");
  analyze->add_option("--out", ana.out, "Output file (default: stdout)");

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize-m", "Pick the backoff cap maximizing SSW frames per slot");
  optimize->add_option("--s", opt.s, "Average contenders per slot")->required();
  optimize->add_option("-P,--p-floor", opt.p_floor, "P-phase floor P");
  optimize->add_option("--fss", opt.fss, "SSW frames per slot");
  optimize->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"table", "json"}));
  optimize->add_option("--out", opt.out, "Output file (default: stdout)");

  CodecArgs cod;
  auto* codec_cmd = app.add_subcommand("codec", "Beacon Interval Control element encoder/decoder");
  codec_cmd->require_subcommand(1);
  auto* encode = codec_cmd->add_subcommand("encode", "Fields to hex");
  encode->add_option("--abft-length", cod.abft_length, "A-BFT Length (1..8)");
  encode->add_option("--fss", cod.fss, "FSS (1..16)");
  encode->add_flag("--oi", cod.oi, "Set the Overload Indicator");
  encode->add_option("--e-abft-length", cod.e_abft_length, "E-A-BFT Length (0..8)");
  auto* decode = codec_cmd->add_subcommand("decode", "Hex to fields");
  decode->add_option("hex", cod.hex, "Element octets as hex")->required();
  decode->add_option("--format", cod.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("abft");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) {
      if (!sim.config && !sim.preset) throw UsageError("simulate: one of --config or --preset is required");
      return cmd_simulate(sim, out, err);
    }
    if (*analyze) return cmd_analyze(ana, out, err);
    if (*optimize) return cmd_optimize(opt, out);
    if (*encode) return cmd_encode(cod, out);
    if (*decode) return cmd_decode(cod, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace abft::cli
