#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyris/harness/experiment.hpp"
#include "skyris/harness/stats.hpp"
#include "skyris/harness/training.hpp"
#include "skyris/nn/checkpoint.hpp"

namespace skyris::harness {

struct SweepCell {
  std::string value;  // label
  std::uint64_t seed = 0;
  EpisodeMetrics eval;
  double train_tail_reward = 0.0;  // mean reward over the last 20% of training episodes
};

struct SweepRow {
  std::string value;
  int seeds = 0;
  Spread ee, ee_bits_per_joule, sum_rate, reliability, mean_reward;
};

// Source of frozen policies for evaluate-mode sweeps, keyed by seed.
using CheckpointSource = std::function<nn::Checkpoint(std::uint64_t seed)>;

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepRow> rows;  // in the order of the value list
};

// Train mode: trains per value and seed, then evaluates greedily.
// Evaluate mode: evaluates the frozen checkpoint of each seed at every value.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& variable, const std::vector<nlohmann::json>& values,
                      SweepMode mode, const CheckpointSource& checkpoints = {});

std::vector<SweepRow> aggregate(const std::vector<SweepCell>& cells, const std::vector<std::string>& order);

void write_sweep_csv(const std::string& path, const std::string& hash, const std::string& variable,
                     const std::vector<SweepRow>& rows);
void write_cells_csv(const std::string& path, const std::string& hash, const std::string& variable,
                     const std::vector<SweepCell>& cells);

}  // namespace skyris::harness
