#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyris/agents/a3c.hpp"
#include "skyris/agents/td3.hpp"
#include "skyris/agents/trpo.hpp"
#include "skyris/config.hpp"

namespace skyris::harness {

enum class AgentKind { td3, a3c, trpo };

std::string to_string(AgentKind k);
AgentKind agent_kind_from_string(const std::string& s);

enum class SweepMode { train, evaluate };

struct SweepSpec {
  std::string variable;
  std::vector<nlohmann::json> values;
  SweepMode mode = SweepMode::train;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  MdpConfig mdp;
  AgentKind agent = AgentKind::td3;
  agents::Td3Config td3;
  agents::A3cConfig a3c;
  agents::TrpoConfig trpo;
  int episodes = 300;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int eval_episodes = 5;
  std::optional<SweepSpec> sweep;
  std::string output_dir = "runs/default";
  bool dump_transitions = false;

  void validate() const;
};

// Strict parse: every unknown or mistyped key is collected into one SchemaError.
ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

const std::vector<std::string>& sweep_variables();
bool sweep_changes_shape(const std::string& variable);
// Sets one sweep variable; throws SchemaError for unknown names or bad values.
void apply_sweep_value(ExperimentConfig& c, const std::string& variable, const nlohmann::json& value);
std::string value_label(const nlohmann::json& value);

// Desk-scale experiment used by the acceptance suite.
ExperimentConfig desk_experiment(AgentKind agent);

}  // namespace skyris::harness
