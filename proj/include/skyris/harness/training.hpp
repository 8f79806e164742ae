#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "skyris/agents/agent.hpp"
#include "skyris/env.hpp"
#include "skyris/harness/experiment.hpp"
#include "skyris/harness/policy.hpp"

namespace skyris::harness {

// One row of metrics.csv.
struct EpisodeMetrics {
  std::uint64_t seed = 0;
  int episode = 0;
  double mean_reward = 0.0;
  double ee = 0.0;
  double ee_bits_per_joule = 0.0;
  double sum_rate = 0.0;
  std::vector<double> psi_mean;
  double reliability = 0.0;
  double wall_clock_s = 0.0;
};

// Running per-episode averages fed by step results.
class EpisodeAccumulator {
 public:
  void add(const env::StepStats& s, double reward);
  EpisodeMetrics finish(std::uint64_t seed, int episode, double wall_clock_s) const;
  int steps() const { return steps_; }

 private:
  int steps_ = 0;
  double reward_ = 0.0, ee_ = 0.0, ee_bpj_ = 0.0, rate_ = 0.0, feasible_ = 0.0;
  std::vector<double> psi_;
};

std::uint64_t episode_seed(std::uint64_t master, int episode);
std::uint64_t evaluation_seed(std::uint64_t master, int episode);

std::unique_ptr<env::RsmaEnv> make_env(const ExperimentConfig& cfg, std::uint64_t seed);
std::unique_ptr<agents::Agent> make_agent(const ExperimentConfig& cfg, int obs_dim, int act_dim, std::uint64_t seed);

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<EpisodeMetrics> episodes;
  std::unique_ptr<agents::Agent> agent;
};

// Trains one seed. Writes the transition dump to dump_path when non-empty.
SeedRun train_seed(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& dump_path = "");

struct TrainingResult {
  std::vector<EpisodeMetrics> rows;
  std::vector<std::string> checkpoints;
};

// Trains every configured seed; with a non-empty output_dir writes
// config.json, metrics.csv, updates.csv, checkpoints/seed_<s>.ckpt and
// optional transitions/seed_<s>.jsonl.
TrainingResult run_training(const ExperimentConfig& cfg);

// Greedy rollouts without learning over eval_episodes evaluation seeds.
EpisodeMetrics evaluate_policy(Policy& policy, const ExperimentConfig& cfg, std::uint64_t seed, int episodes);
EpisodeMetrics evaluate_checkpoint(const nn::Checkpoint& ck, const ExperimentConfig& cfg, std::uint64_t seed,
                                   int episodes);

std::string metrics_header(int num_users);
std::string metrics_line(const std::string& hash, const EpisodeMetrics& m);
void write_metrics_csv(const std::string& path, const std::string& hash, const std::vector<EpisodeMetrics>& rows,
                       int num_users);

}  // namespace skyris::harness
