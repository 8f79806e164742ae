#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "skyris/errors.hpp"
#include "skyris/harness/experiment.hpp"
#include "skyris/harness/stats.hpp"
#include "skyris/harness/sweep.hpp"
#include "skyris/harness/training.hpp"

using namespace skyris;
using namespace skyris::harness;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny(AgentKind kind) {
  ExperimentConfig c = desk_experiment(kind);
  c.episodes = 2;
  c.mdp.horizon = 5;
  c.seeds = {1, 2};
  c.eval_episodes = 2;
  c.td3.start_steps = 3;
  c.td3.batch_size = 4;
  c.output_dir = "";
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "skyris_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Drops the trailing wall-clock column of every data line.
std::string without_wall_clock(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << '\n';
  return out.str();
}

bool contains(const std::vector<std::string>& keys, const std::string& needle) {
  return std::any_of(keys.begin(), keys.end(), [&](const std::string& k) { return k.find(needle) != std::string::npos; });
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("stats") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(median(v) == 2.5);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(mean(v) == 2.5);
  const Spread s = spread(v);
  CHECK(s.iqr() == doctest::Approx(1.5));
  const std::vector<double> x{1, 2, 3, 4}, up{10, 20, 30, 40}, down{4, 3, 2, 1}, tie{1, 1, 2, 2};
  CHECK(kendall_tau(x, up) == doctest::Approx(1.0));
  CHECK(kendall_tau(x, down) == doctest::Approx(-1.0));
  CHECK(kendall_tau(x, tie) == doctest::Approx(4.0 / std::sqrt(6.0 * 4.0)));
  const std::vector<double> series{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(head_mean(series, 0.2) == 1.5);
  CHECK(tail_mean(series, 0.2) == 9.5);
  CHECK(tail_mean(std::vector<double>{3.0}, 0.2) == 3.0);
}

TEST_CASE("schema: unknown and mistyped keys are all reported") {
  nlohmann::json j = to_json(desk_experiment(AgentKind::td3));
  j["bogus_top"] = 1;
  j["scenario"]["bogus_scenario"] = 2;
  j["agent"]["td3"]["bogus_td3"] = 3;
  j["episodes"] = "many";
  try {
    parse_experiment(j);
    FAIL("no SchemaError");
  } catch (const SchemaError& e) {
    CHECK(contains(e.keys(), "bogus_top"));
    CHECK(contains(e.keys(), "bogus_scenario"));
    CHECK(contains(e.keys(), "bogus_td3"));
    CHECK(contains(e.keys(), "episodes"));
  }
  CHECK_THROWS_AS(parse_experiment(nlohmann::json::array()), SchemaError);
  nlohmann::json k = to_json(desk_experiment(AgentKind::td3));
  k["agent"]["type"] = "ppo";
  CHECK_THROWS_AS(parse_experiment(k), SchemaError);
}

TEST_CASE("config: round trip and hash") {
  for (AgentKind kind : {AgentKind::td3, AgentKind::a3c, AgentKind::trpo}) {
    const ExperimentConfig c = desk_experiment(kind);
    const ExperimentConfig back = parse_experiment(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
  }
  ExperimentConfig a = desk_experiment(AgentKind::td3), b = a;
  b.scenario.p_sat_max_dbm = 40.0;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(agent_kind_from_string(to_string(AgentKind::trpo)) == AgentKind::trpo);
}

TEST_CASE("config: file loading") {
  const auto dir = scratch("load");
  const auto path = dir / "c.json";
  std::ofstream(path) << to_json(desk_experiment(AgentKind::a3c)).dump(2);
  CHECK(load_experiment(path.string()).agent == AgentKind::a3c);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(load_experiment((dir / "broken.json").string()), SchemaError);
}

TEST_CASE("sweep variables") {
  ExperimentConfig c = desk_experiment(AgentKind::a3c);
  apply_sweep_value(c, "p_sat_max", 45.0);
  CHECK(c.scenario.p_sat_max_dbm == 45.0);
  apply_sweep_value(c, "ris_mode", "diag_passive");
  CHECK(c.scenario.ris_mode == RisMode::diag_passive);
  apply_sweep_value(c, "csi_error_variance", 1e-3);
  CHECK(c.scenario.csi_error_variance == 1e-3);
  CHECK_THROWS_AS(apply_sweep_value(c, "nonexistent", 1), SchemaError);
  CHECK_THROWS_AS(apply_sweep_value(c, "ris_mode", "nonsense"), SchemaError);
  CHECK_FALSE(sweep_changes_shape("csi_error_variance"));
  CHECK(sweep_changes_shape("num_ris_elements"));
  for (const auto& v : sweep_variables()) CHECK_FALSE(v.empty());
}

TEST_CASE("training: rows, files and byte-identical reruns") {
  for (AgentKind kind : {AgentKind::td3, AgentKind::a3c, AgentKind::trpo}) {
    CAPTURE(to_string(kind));
    ExperimentConfig c = tiny(kind);
    c.dump_transitions = true;
    c.output_dir = scratch("train_a").string();
    const auto r1 = run_training(c);
    CHECK(r1.rows.size() == 4);
    CHECK(r1.checkpoints.size() == 2);
    const fs::path d1(c.output_dir);
    CHECK(fs::exists(d1 / "config.json"));
    CHECK(fs::exists(d1 / "checkpoints" / "seed_1.ckpt"));
    CHECK(fs::exists(d1 / "checkpoints" / "seed_1.ckpt.json"));

    std::ifstream tr(d1 / "transitions" / "seed_1.jsonl");
    int lines = 0;
    std::string line;
    while (std::getline(tr, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("reward"));
      ++lines;
    }
    CHECK(lines == 10);

    const std::string m1 = slurp(d1 / "metrics.csv");
    CHECK(m1.substr(0, m1.find('\n')) == metrics_header(2));
    c.output_dir = scratch("train_b").string();
    run_training(c);
    CHECK(without_wall_clock(slurp(fs::path(c.output_dir) / "metrics.csv")) == without_wall_clock(m1));
    CHECK(slurp(fs::path(c.output_dir) / "checkpoints" / "seed_2.ckpt") == slurp(d1 / "checkpoints" / "seed_2.ckpt"));
  }
}

TEST_CASE("evaluation: frozen policies are repeatable") {
  const ExperimentConfig c = tiny(AgentKind::trpo);
  const SeedRun run = train_seed(c, 3);
  const nn::Checkpoint ck = run.agent->checkpoint();
  const auto a = evaluate_checkpoint(ck, c, 3, 2);
  const auto b = evaluate_checkpoint(ck, c, 3, 2);
  CHECK(a.ee == b.ee);
  CHECK(a.mean_reward == b.mean_reward);
  CHECK(a.reliability == b.reliability);
  CHECK(a.reliability >= 0.0);
  CHECK(a.reliability <= 1.0);
}

TEST_CASE("evaluation: with no penalty mean reward is scaled mean EE") {
  ExperimentConfig c = tiny(AgentKind::td3);
  c.mdp.penalty_lambda = 0.0;
  auto env = make_env(c, 1);
  RandomPolicy pol(env->action_size(), 5);
  const auto m = evaluate_policy(pol, c, 1, 3);
  CHECK(m.mean_reward == doctest::Approx(c.mdp.reward_scale * m.ee).epsilon(1e-12));
}

TEST_CASE("sweep: aggregation ignores cell order") {
  std::vector<SweepCell> cells;
  for (const char* v : {"a", "b"})
    for (std::uint64_t s = 1; s <= 4; ++s) {
      SweepCell c;
      c.value = v;
      c.seed = s;
      c.eval.ee = (v[0] == 'a' ? 1.0 : 10.0) * double(s);
      c.eval.reliability = 0.25 * double(s);
      cells.push_back(c);
    }
  const std::vector<std::string> order{"b", "a"};
  const auto r1 = aggregate(cells, order);
  std::reverse(cells.begin(), cells.end());
  std::rotate(cells.begin(), cells.begin() + 3, cells.end());
  const auto r2 = aggregate(cells, order);
  REQUIRE(r1.size() == 2);
  CHECK(r1[0].value == "b");
  CHECK(r1[0].seeds == 4);
  CHECK(r1[0].ee.median == 25.0);
  CHECK(r1[1].ee.median == 2.5);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(r1[k].ee.median == r2[k].ee.median);
    CHECK(r1[k].ee.q1 == r2[k].ee.q1);
    CHECK(r1[k].reliability.q3 == r2[k].reliability.q3);
  }
}

TEST_CASE("sweep: evaluate mode reuses frozen checkpoints") {
  ExperimentConfig c = tiny(AgentKind::a3c);
  std::map<std::uint64_t, nn::Checkpoint> frozen;
  for (auto s : c.seeds) frozen[s] = train_seed(c, s).agent->checkpoint();
  const std::vector<nlohmann::json> values{1e-4, 1e-1};
  const auto res = run_sweep(c, "csi_error_variance", values, SweepMode::evaluate,
                             [&](std::uint64_t s) { return frozen.at(s); });
  CHECK(res.cells.size() == 4);
  CHECK(res.rows.size() == 2);
  CHECK_THROWS_AS(run_sweep(c, "csi_error_variance", values, SweepMode::evaluate), PreconditionError);
  CHECK_THROWS(run_sweep(c, "num_ris_elements", std::vector<nlohmann::json>{4}, SweepMode::evaluate,
                         [&](std::uint64_t s) { return frozen.at(s); }));
}

}
