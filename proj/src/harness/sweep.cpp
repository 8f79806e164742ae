#include "skyris/harness/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "skyris/errors.hpp"

namespace skyris::harness {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string spread_cols(const Spread& s) { return fmt(s.median) + "," + fmt(s.q1) + "," + fmt(s.q3); }

}  // namespace

SweepResult run_sweep(const ExperimentConfig& base, const std::string& variable, const std::vector<nlohmann::json>& values,
                      SweepMode mode, const CheckpointSource& checkpoints) {
  const auto& vars = sweep_variables();
  if (std::find(vars.begin(), vars.end(), variable) == vars.end())
    throw SchemaError({"sweep.variable"}, "unknown sweep variable '" + variable + "'");
  if (values.empty()) throw SchemaError({"sweep.values"}, "sweep needs at least one value");
  if (mode == SweepMode::evaluate && sweep_changes_shape(variable))
    throw SchemaError({"sweep.mode"}, "'" + variable + "' changes network shapes; use train mode");
  if (mode == SweepMode::evaluate && !checkpoints)
    throw PreconditionError("run_sweep: evaluate mode needs a checkpoint source");

  SweepResult res;
  std::vector<std::string> order;
  for (const auto& v : values) {
    ExperimentConfig cfg = base;
    cfg.sweep.reset();
    apply_sweep_value(cfg, variable, v);
    cfg.validate();
    const std::string label = value_label(v);
    order.push_back(label);
    for (std::uint64_t seed : cfg.seeds) {
      SweepCell cell;
      cell.value = label;
      cell.seed = seed;
      if (mode == SweepMode::train) {
        SeedRun run = train_seed(cfg, seed);
        std::vector<double> rewards;
        for (const auto& e : run.episodes) rewards.push_back(e.mean_reward);
        cell.train_tail_reward = tail_mean(rewards, 0.2);
        AgentPolicy policy(*run.agent);
        cell.eval = evaluate_policy(policy, cfg, seed, cfg.eval_episodes);
      } else {
        cell.eval = evaluate_checkpoint(checkpoints(seed), cfg, seed, cfg.eval_episodes);
      }
      res.cells.push_back(std::move(cell));
    }
  }
  res.rows = aggregate(res.cells, order);
  return res;
}

std::vector<SweepRow> aggregate(const std::vector<SweepCell>& cells, const std::vector<std::string>& order) {
  std::vector<SweepRow> rows;
  for (const auto& label : order) {
    std::vector<double> ee, bpj, rate, rel, rew;
    for (const auto& c : cells) {
      if (c.value != label) continue;
      ee.push_back(c.eval.ee);
      bpj.push_back(c.eval.ee_bits_per_joule);
      rate.push_back(c.eval.sum_rate);
      rel.push_back(c.eval.reliability);
      rew.push_back(c.eval.mean_reward);
    }
    if (ee.empty()) continue;
    SweepRow r;
    r.value = label;
    r.seeds = static_cast<int>(ee.size());
    r.ee = spread(ee);
    r.ee_bits_per_joule = spread(bpj);
    r.sum_rate = spread(rate);
    r.reliability = spread(rel);
    r.mean_reward = spread(rew);
    rows.push_back(r);
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::string& hash, const std::string& variable,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "config_hash,variable,value,seeds";
  for (const char* m : {"ee", "ee_bits_per_joule", "sum_rate", "reliability", "mean_reward"})
    out << ',' << m << "_median," << m << "_q1," << m << "_q3";
  out << '\n';
  for (const auto& r : rows)
    out << hash << ',' << variable << ',' << r.value << ',' << r.seeds << ',' << spread_cols(r.ee) << ','
        << spread_cols(r.ee_bits_per_joule) << ',' << spread_cols(r.sum_rate) << ',' << spread_cols(r.reliability)
        << ',' << spread_cols(r.mean_reward) << '\n';
}

void write_cells_csv(const std::string& path, const std::string& hash, const std::string& variable,
                     const std::vector<SweepCell>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "config_hash,variable,value,seed,ee,ee_bits_per_joule,sum_rate,reliability,mean_reward,train_tail_reward\n";
  for (const auto& c : cells)
    out << hash << ',' << variable << ',' << c.value << ',' << c.seed << ',' << fmt(c.eval.ee) << ','
        << fmt(c.eval.ee_bits_per_joule) << ',' << fmt(c.eval.sum_rate) << ',' << fmt(c.eval.reliability) << ','
        << fmt(c.eval.mean_reward) << ',' << fmt(c.train_tail_reward) << '\n';
}

}  // namespace skyris::harness
