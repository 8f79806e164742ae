#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyris/action.hpp"
#include "skyris/channel.hpp"
#include "skyris/link.hpp"
#include "skyris/power.hpp"

namespace skyris::env {

struct StepStats {
  double ee = 0.0;                 // bit/J/Hz
  double ee_bits_per_joule = 0.0;  // bit/J
  double sum_rate = 0.0;
  std::vector<double> psi;
  bool feasible = true;
};

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
  StepStats stats;
};

// What the agents see. Actions live in [-1, 1]^action_size().
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int obs_size() const = 0;
  virtual int action_size() const = 0;
  virtual int horizon() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// Constraint slots of the violation vector.
enum class Constraint {
  common_sinr,
  private_sinr,  // one slot per user
  sat_power,
  ris_power,
  simplex,
  coefficient_range,
  ris_symmetry,
  ris_gain_bound,
  uav_bounds,
};

std::vector<std::string> violation_names(int num_users);
int violation_count(int num_users);

int action_size(const ScenarioConfig& cfg, const MdpConfig& mdp);
int obs_size(const ScenarioConfig& cfg, const MdpConfig& mdp);

RsmaAction decode_action(std::span<const double> raw, const ScenarioConfig& cfg, const MdpConfig& mdp);

// Relative gaps per constraint; zero when satisfied.
std::vector<double> violations(const RsmaAction& act, const link::LinkReport& rep, double p_out,
                               const ScenarioConfig& cfg);
std::vector<double> violations(const RsmaAction& act, const channel::ChannelSet& cs, const ScenarioConfig& cfg);

double reward(double ee, std::span<const double> psi, double lambda, double scale = 1.0);

struct Evaluation {
  link::LinkReport report;
  power::PowerBreakdown power;
  std::vector<double> psi;
  double p_out = 0.0;
  double ee = 0.0;
  double ee_bits_per_joule = 0.0;
  double reward = 0.0;
};

// Everything the step computes for one decoded action on given channels.
Evaluation evaluate(const RsmaAction& act, const channel::ChannelSet& cs, const ScenarioConfig& cfg,
                    const MdpConfig& mdp);

// Normalized estimated channels, interleaved re/im: h_1..h_I, H_u row-major, g_1..g_I.
std::vector<double> encode_observation(const channel::ChannelSet& cs, const ScenarioConfig& cfg);

struct Transition {
  std::vector<double> obs;
  std::vector<double> raw_action;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
  Evaluation info;
};

nlohmann::json to_json(const Transition& t, const std::vector<std::string>& psi_names);

class RsmaEnv final : public Environment {
 public:
  // layout_seed fixes the users when the layout is random_per_run.
  RsmaEnv(ScenarioConfig cfg, MdpConfig mdp, std::uint64_t layout_seed);

  int obs_size() const override;
  int action_size() const override;
  int horizon() const override { return mdp_.horizon; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::unique_ptr<Environment> clone() const override;

  const Transition& last_transition() const { return last_; }
  const ScenarioConfig& scenario() const { return cfg_; }
  const MdpConfig& mdp() const { return mdp_; }
  const std::vector<Point2>& users() const { return users_; }
  Point2 uav() const { return uav_; }
  // Channels the current observation was built from.
  const channel::ChannelSet& channels() const { return observed_; }

 private:
  channel::ChannelSet draw(std::uint64_t fade_seed, Point2 uav) const;

  ScenarioConfig cfg_;
  MdpConfig mdp_;
  std::vector<Point2> run_users_;
  std::vector<Point2> users_;
  Rng fading_;
  std::uint64_t fade_seed_ = 0;
  Point2 uav_;
  channel::ChannelSet observed_;
  std::vector<double> obs_;
  int t_ = 0;
  bool ready_ = false;
  Transition last_;
};

}  // namespace skyris::env
