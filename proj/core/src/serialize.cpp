#include "abft/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <initializer_list>
#include <set>
#include <type_traits>

#include <json.hpp>

#include "abft/errors.hpp"

namespace abft {

using nlohmann::json;

namespace {

std::string format_number(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

json row_to_json(const SweepRow& row) {
  json j{{"x", row.x}, {"metric", row.metric}, {"mean", row.mean}, {"ci95", row.ci95}, {"trials", row.trials}};
  if (!row.samples.empty()) j["samples"] = row.samples;
  return j;
}

// Strict object reader: every key must be consumed or listed as allowed.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : obj_.items()) {
      if (!allowed.contains(key)) throw ConfigError(field(key) + ": unknown key");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& raw(const char* key) const { return obj_.at(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T integer(const char* key, T fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) return v.get<T>();
      throw ConfigError(field(key) + ": expected a non-negative integer");
    } else {
      return v.get<T>();
    }
  }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    return v.get<double>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + ": expected a boolean");
    return v.get<bool>();
  }

  std::string string(const char* key, std::string fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  Reader child(const char* key) const { return Reader(obj_.at(key), field(key)); }

 private:
  std::string where() const { return path_.empty() ? "document" : path_; }

  const json& obj_;
  std::string path_;
};

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

PopulationMode parse_mode(const std::string& value, const std::string& field) {
  if (value == "one-shot") return PopulationMode::OneShot;
  if (value == "drain") return PopulationMode::Drain;
  if (value == "saturated") return PopulationMode::Saturated;
  throw ConfigError(field + ": unknown value '" + value + "' (expected one-shot, drain or saturated)");
}

std::string_view mode_name(PopulationMode mode) {
  switch (mode) {
    case PopulationMode::OneShot:
      return "one-shot";
    case PopulationMode::Drain:
      return "drain";
    case PopulationMode::Saturated:
      return "saturated";
  }
  return "one-shot";
}

WasteAccounting parse_waste(const std::string& value, const std::string& field) {
  if (value == "worst-case") return WasteAccounting::WorstCase;
  if (value == "actual") return WasteAccounting::Actual;
  throw ConfigError(field + ": unknown value '" + value + "' (expected worst-case or actual)");
}

constexpr std::initializer_list<const char*> kScenarioKeys = {
    "scheme", "layout", "sba", "n_dmg", "n_edmg", "population_mode", "n_bi",
    "trials", "master_seed", "waste_accounting", "workers"};

ScenarioConfig read_scenario(const Reader& r) {
  ScenarioConfig cfg;
  cfg.scheme = parse_scheme(r.string("scheme", "legacy"));
  if (r.has("layout")) {
    const Reader l = r.child("layout");
    l.allow_only({"abft_length", "e_abft_length", "fss", "timing"});
    cfg.layout.abft_length = l.integer("abft_length", cfg.layout.abft_length);
    cfg.layout.e_abft_length = l.integer("e_abft_length", cfg.layout.e_abft_length);
    cfg.layout.fss = l.integer("fss", cfg.layout.fss);
    if (l.has("timing")) {
      const Reader t = l.child("timing");
      t.allow_only({"a_slot_time_us", "txtime_ssw_us", "sbifs_us"});
      cfg.layout.timing.a_slot_time = Micros{t.integer<std::int64_t>("a_slot_time_us", 5)};
      cfg.layout.timing.txtime_ssw = Micros{t.integer<std::int64_t>("txtime_ssw_us", 15)};
      cfg.layout.timing.sbifs = Micros{t.integer<std::int64_t>("sbifs_us", 1)};
    }
  }
  if (r.has("sba")) {
    const Reader s = r.child("sba");
    s.allow_only({"p_floor", "n_max", "m_max", "w_min_us"});
    SbaParams sba;
    sba.p_floor = s.number("p_floor", sba.p_floor);
    sba.m_max = s.integer("m_max", sba.m_max);
    sba.n_max = s.integer("n_max", sba.m_max);
    sba.w_min = Micros{s.integer<std::int64_t>("w_min_us", cfg.layout.timing.a_slot_time.count())};
    cfg.sba = sba;
  }
  cfg.n_dmg = r.integer("n_dmg", cfg.n_dmg);
  cfg.n_edmg = r.integer("n_edmg", cfg.n_edmg);
  cfg.population_mode = parse_mode(r.string("population_mode", "one-shot"), r.field("population_mode"));
  cfg.n_bi = r.integer("n_bi", cfg.n_bi);
  cfg.trials = r.integer("trials", cfg.trials);
  cfg.master_seed = r.integer<std::uint64_t>("master_seed", cfg.master_seed);
  cfg.waste = parse_waste(r.string("waste_accounting", "worst-case"), r.field("waste_accounting"));
  cfg.workers = r.integer("workers", cfg.workers);
  return cfg;
}

}  // namespace

std::string to_csv(const SweepResult& result) {
  std::string out = "x,metric,mean,ci95,trials\n";
  for (const SweepRow& row : result.rows) {
    out += format_number("%g", row.x);
    out += ',';
    out += row.metric;
    out += ',';
    out += format_number("%.10g", row.mean);
    out += ',';
    out += format_number("%.10g", row.ci95);
    out += ',';
    out += std::to_string(row.trials);
    out += '\n';
  }
  return out;
}

std::string to_json(const SweepResult& result) {
  json rows = json::array();
  for (const SweepRow& row : result.rows) rows.push_back(row_to_json(row));
  return json{{"name", result.name}, {"rows", rows}}.dump(2) + "\n";
}

SweepResult sweep_result_from_json(std::string_view text) {
  const json doc = parse(text);
  SweepResult result;
  result.name = doc.at("name").get<std::string>();
  for (const json& j : doc.at("rows")) {
    SweepRow row;
    row.x = j.at("x").get<double>();
    row.metric = j.at("metric").get<std::string>();
    row.mean = j.at("mean").get<double>();
    row.ci95 = j.at("ci95").get<double>();
    row.trials = j.at("trials").get<std::int64_t>();
    if (j.contains("samples")) row.samples = j.at("samples").get<std::vector<double>>();
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string to_json(const markov::ChainSolution& solution, bool include_states) {
  json j{{"b000", solution.b000},
         {"p_tr", solution.p_tr},
         {"p_tr_series", solution.p_tr_series},
         {"p_e", solution.p_e},
         {"contenders", solution.contenders},
         {"residual", solution.residual},
         {"fixed_point_residual", solution.fixed_point_residual},
         {"iterations", solution.iterations}};
  if (include_states) {
    json states = json::array();
    for (std::size_t k = 0; k < solution.states.size(); ++k) {
      const markov::ChainState& s = solution.states[k];
      states.push_back({{"j", s.j}, {"i", s.i}, {"k", s.k}, {"p", solution.state_probs[k]}});
    }
    j["state_probs"] = states;
  }
  return j.dump(2) + "\n";
}

std::string to_json(const planner::MPlan& plan) {
  json rows = json::array();
  for (const planner::MPlanRow& r : plan.rows) {
    rows.push_back({{"m", r.m},
                    {"n_waste", r.n_waste},
                    {"n_send", r.n_send},
                    {"pe", r.pe},
                    {"n_slot", r.n_slot},
                    {"converged", r.converged}});
  }
  return json{{"s", plan.s}, {"p_floor", plan.p_floor}, {"best_m", plan.best_m}, {"rows", rows}}.dump(2) + "\n";
}

planner::MPlan mplan_from_json(std::string_view text) {
  const json doc = parse(text);
  planner::MPlan plan;
  plan.s = doc.at("s").get<double>();
  plan.p_floor = doc.at("p_floor").get<double>();
  plan.best_m = doc.at("best_m").get<int>();
  for (const json& j : doc.at("rows")) {
    planner::MPlanRow r;
    r.m = j.at("m").get<int>();
    r.n_waste = j.at("n_waste").get<int>();
    r.n_send = j.at("n_send").get<int>();
    r.pe = j.at("pe").get<double>();
    r.n_slot = j.at("n_slot").get<double>();
    r.converged = j.at("converged").get<bool>();
    plan.rows.push_back(r);
  }
  return plan;
}

std::string to_json(const codec::BeaconIntervalControl& bic) {
  const codec::Element bytes = codec::encode_bic(bic);
  return json{{"abft_length", bic.abft_length},
              {"fss", bic.fss},
              {"oi", bic.oi ? 1 : 0},
              {"e_abft_length", bic.e_abft_length},
              {"other_bits", bic.other_bits},
              {"ext_reserved", bic.ext_reserved},
              {"hex", codec::to_hex(bytes)}}
             .dump(2) +
         "\n";
}

ScenarioConfig scenario_from_json(std::string_view text) {
  const json doc = parse(text);
  const Reader r(doc, "");
  r.allow_only(kScenarioKeys);
  return read_scenario(r);
}

SimulationDocument simulation_from_json(std::string_view text) {
  const json doc = parse(text);
  const Reader r(doc, "");
  std::vector<const char*> keys(kScenarioKeys);
  keys.push_back("sweep");
  for (const auto& [key, value] : doc.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end()) {
      throw ConfigError(key + ": unknown key");
    }
  }
  SimulationDocument out;
  out.scenario = read_scenario(r);
  if (r.has("sweep")) {
    const Reader s = r.child("sweep");
    s.allow_only({"from", "to", "dmg_fraction"});
    PopulationSweep sweep;
    sweep.from = s.integer("from", sweep.from);
    sweep.to = s.integer("to", sweep.to);
    sweep.dmg_fraction = s.number("dmg_fraction", sweep.dmg_fraction);
    out.sweep = sweep;
  }
  return out;
}

std::string to_json(const ScenarioConfig& config) {
  json j{{"scheme", std::string(to_string(config.scheme))},
         {"layout",
          {{"abft_length", config.layout.abft_length},
           {"e_abft_length", config.layout.e_abft_length},
           {"fss", config.layout.fss},
           {"timing",
            {{"a_slot_time_us", config.layout.timing.a_slot_time.count()},
             {"txtime_ssw_us", config.layout.timing.txtime_ssw.count()},
             {"sbifs_us", config.layout.timing.sbifs.count()}}}}},
         {"n_dmg", config.n_dmg},
         {"n_edmg", config.n_edmg},
         {"population_mode", std::string(mode_name(config.population_mode))},
         {"n_bi", config.n_bi},
         {"trials", config.trials},
         {"master_seed", config.master_seed},
         {"waste_accounting", config.waste == WasteAccounting::WorstCase ? "worst-case" : "actual"},
         {"workers", config.workers}};
  if (config.sba) {
    j["sba"] = {{"p_floor", config.sba->p_floor},
                {"n_max", config.sba->n_max},
                {"m_max", config.sba->m_max},
                {"w_min_us", config.sba->w_min.count()}};
  }
  return j.dump(2) + "\n";
}

markov::ChainParams chain_params_from_json(std::string_view text) {
  const json doc = parse(text);
  const Reader r(doc, "");
  r.allow_only({"p_floor", "m", "n", "s"});
  markov::ChainParams params;
  params.p_floor = r.number("p_floor", params.p_floor);
  params.m = r.integer("m", params.m);
  params.n = r.integer("n", params.m);
  params.s = r.number("s", params.s);
  return params;
}

}  // namespace abft
