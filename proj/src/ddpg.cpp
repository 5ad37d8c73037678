#include "slicesim/ddpg.hpp"

#include <algorithm>
#include <stdexcept>

namespace slicesim {

void AgentConfig::validate() const {
  if (hidden.empty()) throw std::invalid_argument("agent: needs at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("agent: hidden sizes must be >= 1");
  if (!(discount > 0 && discount < 1))
    throw std::invalid_argument("agent: discount must be in (0,1)");
  if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("agent: tau must be in (0,1]");
  if (lr_actor <= 0 || lr_critic <= 0)
    throw std::invalid_argument("agent: learning rates must be > 0");
  if (batch_size < 1) throw std::invalid_argument("agent: batch size must be >= 1");
  if (buffer_capacity < 1) throw std::invalid_argument("agent: buffer capacity must be >= 1");
  if (sigma < 0 || sigma_decay <= 0 || sigma_decay > 1)
    throw std::invalid_argument("agent: bad exploration noise settings");
  if (warmup_episodes < 0) throw std::invalid_argument("agent: warmup must be >= 0");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw std::invalid_argument("replay buffer: capacity must be >= 1");
  storage_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(int batch, Rng& rng) const {
  if (storage_.empty()) throw std::logic_error("replay buffer: sample from empty buffer");
  if (batch < 1) throw std::invalid_argument("replay buffer: batch must be >= 1");
  std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
  std::vector<Transition> out;
  out.reserve(batch);
  for (int i = 0; i < batch; ++i) out.push_back(storage_[pick(rng)]);
  return out;
}

std::vector<double> act(const Mlp& actor, std::span<const double> state, double sigma, Rng& rng) {
  auto out = forward(actor, state).output();
  if (sigma > 0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& a : out) a += noise(rng);
  }
  for (auto& a : out) a = std::clamp(a, -1.0, 1.0);
  return out;
}

DdpgAgent::DdpgAgent(int state_dim, int action_dim, AgentConfig cfg, std::uint64_t init_seed)
    : state_dim_(state_dim), action_dim_(action_dim), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (state_dim_ < 1 || action_dim_ < 1)
    throw std::invalid_argument("agent: state/action dims must be >= 1");
  Rng rng(derive_seed(init_seed, streams::kAgentInit));
  std::vector<int> actor_sizes{state_dim_};
  actor_sizes.insert(actor_sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  actor_sizes.push_back(action_dim_);
  std::vector<int> critic_sizes{state_dim_ + action_dim_};
  critic_sizes.insert(critic_sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  critic_sizes.push_back(1);
  actor_ = Mlp::make(actor_sizes, Activation::Tanh, rng);
  critic_ = Mlp::make(critic_sizes, Activation::Identity, rng);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = AdamState::zeros_like(actor_);
  critic_opt_ = AdamState::zeros_like(critic_);
}

std::vector<double> DdpgAgent::act(std::span<const double> state, double sigma,
                                   Rng& noise_rng) const {
  return slicesim::act(actor_, state, sigma, noise_rng);
}

DdpgAgent::TrainStats DdpgAgent::train_step(std::span<const Transition> batch) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  TrainStats stats;

  // critic: minimize mean squared TD error against the target networks
  Gradients critic_grads = Gradients::zeros_like(critic_);
  std::vector<double> sa(state_dim_ + action_dim_);
  for (const Transition& tr : batch) {
    const auto next_action = forward(actor_target_, tr.next_state).output();
    std::copy(tr.next_state.begin(), tr.next_state.end(), sa.begin());
    std::copy(next_action.begin(), next_action.end(), sa.begin() + state_dim_);
    const double next_q = forward(critic_target_, sa).output()[0];
    const double target = tr.reward + cfg_.discount * next_q;

    std::copy(tr.state.begin(), tr.state.end(), sa.begin());
    std::copy(tr.action.begin(), tr.action.end(), sa.begin() + state_dim_);
    const ForwardPass fp = forward(critic_, sa);
    const double err = fp.output()[0] - target;
    stats.critic_loss += err * err * inv_b;
    const double dl[1] = {2.0 * err * inv_b};
    critic_grads.accumulate(backward(critic_, fp, dl));
  }
  adam_update(critic_, critic_grads, critic_opt_, cfg_.lr_critic);

  // actor: ascend mean Q(s, mu(s)) through the deterministic policy gradient
  Gradients actor_grads = Gradients::zeros_like(actor_);
  for (const Transition& tr : batch) {
    const ForwardPass mu = forward(actor_, tr.state);
    std::copy(tr.state.begin(), tr.state.end(), sa.begin());
    std::copy(mu.output().begin(), mu.output().end(), sa.begin() + state_dim_);
    const ForwardPass q = forward(critic_, sa);
    stats.actor_objective += q.output()[0] * inv_b;
    const double dq[1] = {1.0};
    const Gradients through_critic = backward(critic_, q, dq);
    // loss = -mean Q, so push -dQ/da through the actor
    std::vector<double> da(action_dim_);
    for (int i = 0; i < action_dim_; ++i)
      da[i] = -through_critic.input[state_dim_ + i] * inv_b;
    actor_grads.accumulate(backward(actor_, mu, da));
  }
  adam_update(actor_, actor_grads, actor_opt_, cfg_.lr_actor);

  soft_update(actor_target_, actor_, cfg_.tau);
  soft_update(critic_target_, critic_, cfg_.tau);
  return stats;
}

namespace {

nlohmann::json mlp_to_json(const Mlp& net) {
  nlohmann::json j;
  j["output_activation"] = net.output_activation == Activation::Tanh ? "tanh" : "identity";
  j["layers"] = nlohmann::json::array();
  for (const auto& l : net.layers)
    j["layers"].push_back({{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}});
  return j;
}

Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp net;
  net.output_activation =
      j.at("output_activation") == "tanh" ? Activation::Tanh : Activation::Identity;
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.in = lj.at("in");
    l.out = lj.at("out");
    l.w = lj.at("w").get<std::vector<double>>();
    l.b = lj.at("b").get<std::vector<double>>();
    if (l.w.size() != static_cast<size_t>(l.in) * l.out || l.b.size() != static_cast<size_t>(l.out))
      throw std::runtime_error("checkpoint: layer shape mismatch");
    net.layers.push_back(std::move(l));
  }
  if (net.layers.empty()) throw std::runtime_error("checkpoint: empty network");
  return net;
}

nlohmann::json adam_to_json(const AdamState& s) {
  return {{"beta1", s.beta1}, {"beta2", s.beta2}, {"eps", s.eps}, {"step", s.step},
          {"mw", s.mw},       {"vw", s.vw},       {"mb", s.mb},   {"vb", s.vb}};
}

AdamState adam_from_json(const nlohmann::json& j) {
  AdamState s;
  s.beta1 = j.at("beta1");
  s.beta2 = j.at("beta2");
  s.eps = j.at("eps");
  s.step = j.at("step");
  s.mw = j.at("mw").get<std::vector<std::vector<double>>>();
  s.vw = j.at("vw").get<std::vector<std::vector<double>>>();
  s.mb = j.at("mb").get<std::vector<std::vector<double>>>();
  s.vb = j.at("vb").get<std::vector<std::vector<double>>>();
  return s;
}

}  // namespace

nlohmann::json DdpgAgent::to_json() const {
  nlohmann::json j;
  j["state_dim"] = state_dim_;
  j["action_dim"] = action_dim_;
  j["config"] = {{"hidden", cfg_.hidden},
                 {"discount", cfg_.discount},
                 {"tau", cfg_.tau},
                 {"lr_actor", cfg_.lr_actor},
                 {"lr_critic", cfg_.lr_critic},
                 {"batch_size", cfg_.batch_size},
                 {"buffer_capacity", cfg_.buffer_capacity},
                 {"sigma", cfg_.sigma},
                 {"sigma_decay", cfg_.sigma_decay},
                 {"warmup_episodes", cfg_.warmup_episodes}};
  j["actor"] = mlp_to_json(actor_);
  j["critic"] = mlp_to_json(critic_);
  j["actor_target"] = mlp_to_json(actor_target_);
  j["critic_target"] = mlp_to_json(critic_target_);
  j["actor_opt"] = adam_to_json(actor_opt_);
  j["critic_opt"] = adam_to_json(critic_opt_);
  return j;
}

DdpgAgent DdpgAgent::from_json(const nlohmann::json& j) {
  DdpgAgent a;
  a.state_dim_ = j.at("state_dim");
  a.action_dim_ = j.at("action_dim");
  const auto& c = j.at("config");
  a.cfg_.hidden = c.at("hidden").get<std::vector<int>>();
  a.cfg_.discount = c.at("discount");
  a.cfg_.tau = c.at("tau");
  a.cfg_.lr_actor = c.at("lr_actor");
  a.cfg_.lr_critic = c.at("lr_critic");
  a.cfg_.batch_size = c.at("batch_size");
  a.cfg_.buffer_capacity = c.at("buffer_capacity");
  a.cfg_.sigma = c.at("sigma");
  a.cfg_.sigma_decay = c.at("sigma_decay");
  a.cfg_.warmup_episodes = c.at("warmup_episodes");
  a.cfg_.validate();
  a.actor_ = mlp_from_json(j.at("actor"));
  a.critic_ = mlp_from_json(j.at("critic"));
  a.actor_target_ = mlp_from_json(j.at("actor_target"));
  a.critic_target_ = mlp_from_json(j.at("critic_target"));
  a.actor_opt_ = adam_from_json(j.at("actor_opt"));
  a.critic_opt_ = adam_from_json(j.at("critic_opt"));
  return a;
}

}  // namespace slicesim
