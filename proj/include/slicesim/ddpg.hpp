#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "slicesim/mdp_env.hpp"
#include "slicesim/mlp.hpp"

namespace slicesim {

struct AgentConfig {
  std::vector<int> hidden{128, 64};
  double discount = 0.95;       // phi
  double tau = 0.01;            // soft-update rate
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  int batch_size = 64;
  std::size_t buffer_capacity = 10000;
  double sigma = 0.3;           // exploration noise scale
  double sigma_decay = 0.995;   // per episode
  int warmup_episodes = 10;

  void validate() const;
};

// Ring buffer with FIFO overwrite and uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::vector<Transition> sample(int batch, Rng& rng) const;  // throws if empty
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t cursor_ = 0;
};

// tanh(actor(state)) + N(0, sigma^2) per coordinate, clipped to [-1,1]
std::vector<double> act(const Mlp& actor, std::span<const double> state, double sigma, Rng& rng);

// Deterministic-policy actor-critic with target networks. The critic takes
// the concatenated (state, raw action) vector.
class DdpgAgent {
 public:
  DdpgAgent(int state_dim, int action_dim, AgentConfig cfg, std::uint64_t init_seed);

  std::vector<double> act(std::span<const double> state, double sigma, Rng& noise_rng) const;

  struct TrainStats {
    double critic_loss = 0.0;
    double actor_objective = 0.0;
  };
  TrainStats train_step(std::span<const Transition> batch);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic_target() const { return critic_target_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const AgentConfig& config() const { return cfg_; }

  nlohmann::json to_json() const;
  static DdpgAgent from_json(const nlohmann::json& j);

 private:
  DdpgAgent() = default;
  int state_dim_ = 0;
  int action_dim_ = 0;
  AgentConfig cfg_;
  Mlp actor_, critic_, actor_target_, critic_target_;
  AdamState actor_opt_, critic_opt_;
};

}  // namespace slicesim
