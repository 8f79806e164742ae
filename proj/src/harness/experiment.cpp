#include "skyris/harness/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "skyris/errors.hpp"

namespace skyris::harness {

using nlohmann::json;

namespace {

// Checks j against the key set of a default-constructed section and parses it.
template <class T>
void parse_section(const json& j, const std::string& prefix, T& out, std::vector<std::string>& bad) {
  if (!j.is_object()) {
    bad.push_back(prefix);
    return;
  }
  json defaults;
  to_json(defaults, out);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!defaults.contains(it.key())) {
      bad.push_back(prefix + "." + it.key());
      continue;
    }
    const json& d = defaults[it.key()];
    const bool ok = (d.is_number() && it->is_number()) || (d.is_boolean() && it->is_boolean()) ||
                    (d.is_array() && it->is_array()) || (d.is_string() && it->is_string());
    if (!ok) bad.push_back(prefix + "." + it.key());
  }
  try {
    from_json(j, out);
  } catch (const json::exception&) {
    bad.push_back(prefix);
  }
}

void throw_if_bad(const std::vector<std::string>& bad) {
  if (bad.empty()) return;
  std::string msg = "invalid or unknown configuration keys:";
  for (const auto& k : bad) msg += " " + k;
  throw SchemaError(bad, msg);
}

std::string sweep_mode_name(SweepMode m) { return m == SweepMode::train ? "train" : "evaluate"; }

}  // namespace

std::string to_string(AgentKind k) {
  switch (k) {
    case AgentKind::td3:
      return "td3";
    case AgentKind::a3c:
      return "a3c";
    case AgentKind::trpo:
      return "trpo";
  }
  return "?";
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "td3") return AgentKind::td3;
  if (s == "a3c") return AgentKind::a3c;
  if (s == "trpo") return AgentKind::trpo;
  throw SchemaError({"agent.type"}, "unknown agent type '" + s + "'");
}

void ExperimentConfig::validate() const {
  scenario.validate();
  mdp.validate();
  std::vector<std::string> bad;
  if (seeds.empty()) bad.push_back("seeds");
  if (episodes < 1) bad.push_back("episodes");
  if (eval_episodes < 1) bad.push_back("eval_episodes");
  if (sweep) {
    const auto& vars = sweep_variables();
    if (std::find(vars.begin(), vars.end(), sweep->variable) == vars.end()) bad.push_back("sweep.variable");
    if (sweep->values.empty()) bad.push_back("sweep.values");
    if (sweep->mode == SweepMode::evaluate && sweep_changes_shape(sweep->variable)) bad.push_back("sweep.mode");
  }
  throw_if_bad(bad);
}

ExperimentConfig parse_experiment(const json& j) {
  if (!j.is_object()) throw SchemaError({"<root>"}, "configuration must be a JSON object");
  ExperimentConfig c;
  std::vector<std::string> bad;
  static const std::set<std::string> top{"scenario", "mdp",        "agent",       "episodes", "seeds",
                                         "eval_episodes", "sweep", "output_dir", "dump_transitions"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!top.count(it.key())) bad.push_back(it.key());

  auto collect = [&](auto&& fn) {
    try {
      fn();
    } catch (const SchemaError& e) {
      bad.insert(bad.end(), e.keys().begin(), e.keys().end());
    }
  };
  if (j.contains("scenario")) collect([&] { c.scenario = j["scenario"].get<ScenarioConfig>(); });
  if (j.contains("mdp")) collect([&] { c.mdp = j["mdp"].get<MdpConfig>(); });

  if (j.contains("agent")) {
    const json& a = j["agent"];
    if (!a.is_object()) {
      bad.push_back("agent");
    } else {
      for (auto it = a.begin(); it != a.end(); ++it) {
        const std::string& k = it.key();
        if (k == "type") {
          if (!it->is_string()) bad.push_back("agent.type");
          else collect([&] { c.agent = agent_kind_from_string(it->get<std::string>()); });
        } else if (k == "td3") {
          parse_section(*it, "agent.td3", c.td3, bad);
        } else if (k == "a3c") {
          parse_section(*it, "agent.a3c", c.a3c, bad);
        } else if (k == "trpo") {
          parse_section(*it, "agent.trpo", c.trpo, bad);
        } else {
          bad.push_back("agent." + k);
        }
      }
    }
  }

  auto get_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) bad.push_back(key);
    else out = j[key].get<int>();
  };
  get_int("episodes", c.episodes);
  get_int("eval_episodes", c.eval_episodes);
  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    if (!s.is_array() || !std::all_of(s.begin(), s.end(), [](const json& v) { return v.is_number_unsigned(); })) {
      bad.push_back("seeds");
    } else {
      c.seeds.clear();
      for (const auto& v : s) c.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) bad.push_back("output_dir");
    else c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("dump_transitions")) {
    if (!j["dump_transitions"].is_boolean()) bad.push_back("dump_transitions");
    else c.dump_transitions = j["dump_transitions"].get<bool>();
  }
  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const json& s = j["sweep"];
    if (!s.is_object()) {
      bad.push_back("sweep");
    } else {
      SweepSpec sp;
      for (auto it = s.begin(); it != s.end(); ++it) {
        const std::string& k = it.key();
        if (k == "variable" && it->is_string()) {
          sp.variable = it->get<std::string>();
        } else if (k == "values" && it->is_array()) {
          sp.values.assign(it->begin(), it->end());
        } else if (k == "mode" && it->is_string() && (*it == "train" || *it == "evaluate")) {
          sp.mode = *it == "train" ? SweepMode::train : SweepMode::evaluate;
        } else {
          bad.push_back("sweep." + k);
        }
      }
      c.sweep = sp;
    }
  }
  throw_if_bad(bad);
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError({"<file>"}, "cannot read configuration file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError({"<file>"}, std::string("configuration is not valid JSON: ") + e.what());
  }
  return parse_experiment(j);
}

json to_json(const ExperimentConfig& c) {
  json agent{{"type", to_string(c.agent)}};
  to_json(agent["td3"], c.td3);
  to_json(agent["a3c"], c.a3c);
  to_json(agent["trpo"], c.trpo);
  json j{{"scenario", c.scenario},
         {"mdp", c.mdp},
         {"agent", agent},
         {"episodes", c.episodes},
         {"seeds", c.seeds},
         {"eval_episodes", c.eval_episodes},
         {"output_dir", c.output_dir},
         {"dump_transitions", c.dump_transitions}};
  if (c.sweep)
    j["sweep"] = {{"variable", c.sweep->variable}, {"values", c.sweep->values}, {"mode", sweep_mode_name(c.sweep->mode)}};
  else
    j["sweep"] = nullptr;
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  // where results go does not change what they are
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> vars{"p_sat_max",        "p_ris_max",        "uav_altitude",
                                             "csi_error_variance", "num_users",        "num_ris_elements",
                                             "num_sat_antennas", "ris_mode"};
  return vars;
}

bool sweep_changes_shape(const std::string& variable) {
  return variable == "num_users" || variable == "num_ris_elements" || variable == "num_sat_antennas";
}

void apply_sweep_value(ExperimentConfig& c, const std::string& variable, const json& value) {
  const std::string key = "sweep.values";
  auto number = [&]() {
    if (!value.is_number()) throw SchemaError({key}, "sweep value for '" + variable + "' must be a number");
    return value.get<double>();
  };
  auto integer = [&]() {
    if (!value.is_number_integer()) throw SchemaError({key}, "sweep value for '" + variable + "' must be an integer");
    return value.get<int>();
  };
  if (variable == "p_sat_max") c.scenario.p_sat_max_dbm = number();
  else if (variable == "p_ris_max") c.scenario.p_ris_max_dbm = number();
  else if (variable == "uav_altitude") c.scenario.uav_altitude = number();
  else if (variable == "csi_error_variance") c.scenario.csi_error_variance = number();
  else if (variable == "num_users") c.scenario.num_users = integer();
  else if (variable == "num_ris_elements") c.scenario.num_ris_elements = integer();
  else if (variable == "num_sat_antennas") c.scenario.num_sat_antennas = integer();
  else if (variable == "ris_mode") {
    if (!value.is_string()) throw SchemaError({key}, "ris_mode sweep values must be strings");
    c.scenario.ris_mode = ris_mode_from_string(value.get<std::string>());
  } else {
    throw SchemaError({"sweep.variable"}, "unknown sweep variable '" + variable + "'");
  }
  if (variable == "num_users" && c.scenario.user_layout == UserLayout::fixed)
    throw SchemaError({key}, "num_users cannot be swept with a fixed user layout");
}

std::string value_label(const json& value) { return value.is_string() ? value.get<std::string>() : value.dump(); }

ExperimentConfig desk_experiment(AgentKind agent) {
  ExperimentConfig c;
  c.scenario = desk_scenario();
  c.agent = agent;
  c.mdp.horizon = 50;
  c.mdp.reward_scale = 1000.0;
  c.episodes = 800;
  c.td3.gamma = 0.5;
  c.td3.batch_size = 64;
  c.td3.start_steps = 500;
  c.td3.buffer_size = 20000;
  c.a3c.gamma = 0.5;
  c.a3c.workers = 1;
  c.a3c.actor_lr = 1e-3;
  c.trpo.gamma = 0.5;
  c.trpo.delta_kl = 0.3;
  c.output_dir = "";
  return c;
}

}  // namespace skyris::harness
