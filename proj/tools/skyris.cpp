#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skyris/errors.hpp"
#include "skyris/harness/criteria.hpp"
#include "skyris/harness/experiment.hpp"
#include "skyris/harness/sweep.hpp"
#include "skyris/harness/training.hpp"
#include "skyris/nn/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace skyris;
using namespace skyris::harness;

namespace {

enum Exit { ok = 0, failure = 1, schema = 2, lifecycle = 3, checkpoint = 4 };

// "1e-4,0.01" -> numbers; anything that is not JSON becomes a string.
std::vector<nlohmann::json> parse_values(const std::string& list) {
  std::vector<nlohmann::json> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    nlohmann::json v = nlohmann::json::parse(tok, nullptr, false);
    out.push_back(v.is_discarded() ? nlohmann::json(tok) : v);
  }
  return out;
}

void print_metrics(const EpisodeMetrics& m) {
  nlohmann::json j = {{"seed", m.seed},
                      {"episodes", m.episode},
                      {"mean_reward", m.mean_reward},
                      {"ee", m.ee},
                      {"ee_bits_per_joule", m.ee_bits_per_joule},
                      {"sum_rate", m.sum_rate},
                      {"reliability", m.reliability},
                      {"psi_mean", m.psi_mean}};
  std::cout << j.dump(2) << '\n';
}

int cmd_train(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  ExperimentConfig cfg = load_experiment(config);
  if (seed) cfg.seeds = {*seed};
  if (!out.empty()) cfg.output_dir = out;
  if (cfg.output_dir.empty()) cfg.output_dir = "runs/default";
  const TrainingResult res = run_training(cfg);
  std::printf("config_hash %s\n", config_hash(cfg).c_str());
  std::printf("wrote %zu metric rows to %s\n", res.rows.size(), (fs::path(cfg.output_dir) / "metrics.csv").c_str());
  for (const auto& ck : res.checkpoints) std::printf("checkpoint %s\n", ck.c_str());
  return ok;
}

int cmd_sweep(const std::string& config, std::string var, const std::string& values, std::string mode,
              const std::string& ck_dir, const std::string& out) {
  ExperimentConfig cfg = load_experiment(config);
  std::vector<nlohmann::json> vals = values.empty() ? std::vector<nlohmann::json>{} : parse_values(values);
  SweepMode sm = SweepMode::train;
  if (cfg.sweep) {
    if (var.empty()) var = cfg.sweep->variable;
    if (vals.empty()) vals = cfg.sweep->values;
    sm = cfg.sweep->mode;
  }
  if (mode == "evaluate") sm = SweepMode::evaluate;
  else if (mode == "train") sm = SweepMode::train;
  else if (!mode.empty()) throw SchemaError({"sweep.mode"}, "sweep mode must be 'train' or 'evaluate'");
  if (var.empty()) throw SchemaError({"sweep.variable"}, "no sweep variable given (--var or sweep.variable)");

  CheckpointSource source;
  if (sm == SweepMode::evaluate) {
    if (ck_dir.empty()) throw PreconditionError("evaluate-mode sweeps need --checkpoints DIR");
    source = [ck_dir](std::uint64_t s) {
      return nn::load_checkpoint((fs::path(ck_dir) / ("seed_" + std::to_string(s) + ".ckpt")).string());
    };
  }
  if (!out.empty()) cfg.output_dir = out;
  const SweepResult res = run_sweep(cfg, var, vals, sm, source);
  const fs::path dir = cfg.output_dir.empty() ? fs::path("runs/sweep") : fs::path(cfg.output_dir);
  fs::create_directories(dir);
  const std::string hash = config_hash(cfg);
  write_sweep_csv((dir / "sweep.csv").string(), hash, var, res.rows);
  write_cells_csv((dir / "sweep_cells.csv").string(), hash, var, res.cells);
  std::printf("config_hash %s\n", hash.c_str());
  std::printf("%-14s %6s %14s %14s %12s\n", "value", "seeds", "ee_median", "sum_rate_med", "reliability");
  for (const auto& r : res.rows)
    std::printf("%-14s %6d %14.6e %14.6f %12.4f\n", r.value.c_str(), r.seeds, r.ee.median, r.sum_rate.median,
                r.reliability.median);
  std::printf("wrote %s\n", (dir / "sweep.csv").c_str());
  return ok;
}

int cmd_eval(const std::string& ckpath, const std::string& config, std::uint64_t seed, int episodes) {
  const ExperimentConfig cfg = load_experiment(config);
  const nn::Checkpoint ck = nn::load_checkpoint(ckpath);
  print_metrics(evaluate_checkpoint(ck, cfg, seed, episodes > 0 ? episodes : cfg.eval_episodes));
  return ok;
}

int cmd_selftest() {
  bool all = true;
  for (const auto& r : run_fast_criteria()) {
    std::printf("%s\n", format_result(r).c_str());
    all = all && r.pass;
  }
  return all ? ok : failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSMA LEO downlink with a UAV-mounted BD-active RIS: simulator and DRL lab"};
  app.require_subcommand(1);

  std::string config, out, ck_path, var, values, mode, ck_dir;
  std::uint64_t seed = 0;
  int episodes = 0;

  auto* train = app.add_subcommand("train", "train the configured agent over its seeds");
  train->add_option("--config", config, "experiment JSON")->required();
  auto* seed_opt = train->add_option("--seed", seed, "train only this seed");
  train->add_option("--out", out, "output directory (overrides output_dir)");

  auto* sweep = app.add_subcommand("sweep", "sweep one variable over values and seeds");
  sweep->add_option("--config", config, "experiment JSON")->required();
  sweep->add_option("--var", var, "sweep variable");
  sweep->add_option("--values", values, "comma-separated values");
  sweep->add_option("--mode", mode, "train (default) or evaluate");
  sweep->add_option("--checkpoints", ck_dir, "directory with seed_<s>.ckpt files for evaluate mode");
  sweep->add_option("--out", out, "output directory");

  auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  eval->add_option("--checkpoint", ck_path, "checkpoint file")->required();
  eval->add_option("--config", config, "experiment JSON")->required();
  eval->add_option("--seed", seed, "evaluation seed")->default_val(1);
  eval->add_option("--episodes", episodes, "evaluation episodes (default eval_episodes)");

  auto* self = app.add_subcommand("selftest", "oracle and mechanics checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt, out);
    if (sweep->parsed()) return cmd_sweep(config, var, values, mode, ck_dir, out);
    if (eval->parsed()) return cmd_eval(ck_path, config, seed, episodes);
    if (self->parsed()) return cmd_selftest();
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    for (const auto& k : e.keys()) std::fprintf(stderr, "  offending key: %s\n", k.c_str());
    return schema;
  } catch (const LifecycleError& e) {
    std::fprintf(stderr, "lifecycle error: %s\n", e.what());
    return lifecycle;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "precondition error: %s\n", e.what());
    return lifecycle;
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error: %s\n", e.what());
    return checkpoint;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return failure;
  }
  return failure;
}
