#include "skyris/harness/training.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "skyris/errors.hpp"

namespace skyris::harness {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void EpisodeAccumulator::add(const env::StepStats& s, double reward) {
  if (psi_.empty()) psi_.assign(s.psi.size(), 0.0);
  ++steps_;
  reward_ += reward;
  ee_ += s.ee;
  ee_bpj_ += s.ee_bits_per_joule;
  rate_ += s.sum_rate;
  feasible_ += s.feasible ? 1.0 : 0.0;
  for (std::size_t k = 0; k < s.psi.size() && k < psi_.size(); ++k) psi_[k] += s.psi[k];
}

EpisodeMetrics EpisodeAccumulator::finish(std::uint64_t seed, int episode, double wall_clock_s) const {
  EpisodeMetrics m;
  m.seed = seed;
  m.episode = episode;
  m.wall_clock_s = wall_clock_s;
  if (steps_ == 0) return m;
  const double n = steps_;
  m.mean_reward = reward_ / n;
  m.ee = ee_ / n;
  m.ee_bits_per_joule = ee_bpj_ / n;
  m.sum_rate = rate_ / n;
  m.reliability = feasible_ / n;
  for (double p : psi_) m.psi_mean.push_back(p / n);
  return m;
}

std::uint64_t episode_seed(std::uint64_t master, int episode) {
  return derive_seed(master, {tag(Stream::episode), static_cast<std::uint64_t>(episode)});
}

std::uint64_t evaluation_seed(std::uint64_t master, int episode) {
  return derive_seed(master, {tag(Stream::evaluation), static_cast<std::uint64_t>(episode)});
}

std::unique_ptr<env::RsmaEnv> make_env(const ExperimentConfig& cfg, std::uint64_t seed) {
  return std::make_unique<env::RsmaEnv>(cfg.scenario, cfg.mdp, seed);
}

std::unique_ptr<agents::Agent> make_agent(const ExperimentConfig& cfg, int obs_dim, int act_dim, std::uint64_t seed) {
  switch (cfg.agent) {
    case AgentKind::td3:
      return std::make_unique<agents::Td3Agent>(obs_dim, act_dim, cfg.td3, seed);
    case AgentKind::a3c:
      return std::make_unique<agents::A3cAgent>(obs_dim, act_dim, cfg.a3c, seed);
    case AgentKind::trpo:
      return std::make_unique<agents::TrpoAgent>(obs_dim, act_dim, cfg.trpo, seed);
  }
  throw SchemaError({"agent.type"}, "unknown agent type");
}

SeedRun train_seed(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& dump_path) {
  auto env = make_env(cfg, seed);
  SeedRun run;
  run.seed = seed;
  run.agent = make_agent(cfg, env->obs_size(), env->action_size(), seed);

  std::ofstream dump;
  if (!dump_path.empty()) {
    dump.open(dump_path);
    if (!dump) throw std::runtime_error("cannot open transition dump '" + dump_path + "'");
  }
  const auto names = env::violation_names(cfg.scenario.num_users);

  EpisodeAccumulator acc;
  agents::StepObserver observer = [&](std::span<const double>, std::span<const double>, const env::StepResult& r) {
    acc.add(r.stats, r.reward);
    if (dump.is_open()) dump << env::to_json(env->last_transition(), names).dump() << '\n';
  };
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    acc = EpisodeAccumulator();
    const auto t0 = std::chrono::steady_clock::now();
    run.agent->train_episode(*env, episode_seed(seed, ep), observer);
    run.episodes.push_back(acc.finish(seed, ep, seconds_since(t0)));
  }
  return run;
}

EpisodeMetrics evaluate_policy(Policy& policy, const ExperimentConfig& cfg, std::uint64_t seed, int episodes) {
  auto env = make_env(cfg, seed);
  EpisodeAccumulator acc;
  const auto t0 = std::chrono::steady_clock::now();
  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = env->reset(evaluation_seed(seed, ep));
    for (;;) {
      std::vector<double> a = policy.act(obs);
      agents::clamp_unit(a);
      env::StepResult r = env->step(a);
      acc.add(r.stats, r.reward);
      if (r.done) break;
      obs = std::move(r.obs);
    }
  }
  return acc.finish(seed, episodes, seconds_since(t0));
}

EpisodeMetrics evaluate_checkpoint(const nn::Checkpoint& ck, const ExperimentConfig& cfg, std::uint64_t seed,
                                   int episodes) {
  NetPolicy policy = policy_from_checkpoint(ck, env::obs_size(cfg.scenario, cfg.mdp),
                                            env::action_size(cfg.scenario, cfg.mdp));
  return evaluate_policy(policy, cfg, seed, episodes);
}

std::string metrics_header(int num_users) {
  std::string h = "config_hash,seed,episode,mean_reward,ee,ee_bits_per_joule,sum_rate";
  for (const auto& n : env::violation_names(num_users)) h += ",psi_" + n;
  h += ",reliability,wall_clock_s";
  return h;
}

std::string metrics_line(const std::string& hash, const EpisodeMetrics& m) {
  std::string s = hash + "," + std::to_string(m.seed) + "," + std::to_string(m.episode) + "," + fmt(m.mean_reward) +
                  "," + fmt(m.ee) + "," + fmt(m.ee_bits_per_joule) + "," + fmt(m.sum_rate);
  for (double p : m.psi_mean) s += "," + fmt(p);
  s += "," + fmt(m.reliability) + "," + fmt(m.wall_clock_s);
  return s;
}

void write_metrics_csv(const std::string& path, const std::string& hash, const std::vector<EpisodeMetrics>& rows,
                       int num_users) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << metrics_header(num_users) << '\n';
  for (const auto& m : rows) out << metrics_line(hash, m) << '\n';
}

TrainingResult run_training(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string hash = config_hash(cfg);
  const bool write = !cfg.output_dir.empty();
  const fs::path dir(cfg.output_dir);
  if (write) {
    fs::create_directories(dir / "checkpoints");
    if (cfg.dump_transitions) fs::create_directories(dir / "transitions");
    nlohmann::json snap = to_json(cfg);
    snap["config_hash"] = hash;
    std::ofstream(dir / "config.json") << snap.dump(2) << '\n';
  }

  TrainingResult result;
  std::ofstream updates;
  if (write) {
    updates.open(dir / "updates.csv");
    updates << "config_hash,seed,update,actor_loss,critic_loss,kl,grad_norm,accepted\n";
  }
  for (std::uint64_t seed : cfg.seeds) {
    const std::string dump =
        write && cfg.dump_transitions ? (dir / "transitions" / ("seed_" + std::to_string(seed) + ".jsonl")).string() : "";
    SeedRun run = train_seed(cfg, seed, dump);
    result.rows.insert(result.rows.end(), run.episodes.begin(), run.episodes.end());
    if (write) {
      const std::string ck_path = (dir / "checkpoints" / ("seed_" + std::to_string(seed) + ".ckpt")).string();
      nn::Checkpoint ck = run.agent->checkpoint();
      ck.meta["config_hash"] = hash;
      ck.meta["seed"] = seed;
      ck.meta["scenario"] = cfg.scenario;
      ck.meta["mdp"] = cfg.mdp;
      nn::save_checkpoint(ck_path, ck);
      result.checkpoints.push_back(ck_path);
      for (const auto& u : run.agent->updates())
        updates << hash << ',' << seed << ',' << u.update << ',' << fmt(u.actor_loss) << ',' << fmt(u.critic_loss)
                << ',' << fmt(u.kl) << ',' << fmt(u.grad_norm) << ',' << (u.accepted ? 1 : 0) << '\n';
    }
  }
  if (write) write_metrics_csv((dir / "metrics.csv").string(), hash, result.rows, cfg.scenario.num_users);
  return result;
}

}  // namespace skyris::harness
