#include "slicesim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "slicesim/baseline.hpp"

namespace slicesim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

WindowMetrics make_window_metrics(int episode, int window, const CostBreakdown& cb,
                                  const std::vector<double>& mean_delay,
                                  const std::vector<SliceSpec>& slices) {
  WindowMetrics wm;
  wm.episode = episode;
  wm.window = window;
  wm.cost = cb;
  wm.mean_delay = mean_delay;
  wm.violated.resize(slices.size());
  for (size_t k = 0; k < slices.size(); ++k)
    wm.violated[k] = mean_delay[k] > slices[k].deadline_s ? 1 : 0;
  return wm;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

TrainResult run_training(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch clock;
  const EnvScenario sc = cfg.scenario();
  const int num_slices = static_cast<int>(sc.slices.size());
  SliceEnv env(sc);

  DdpgAgent agent(state_size(num_slices, sc.topo), action_size(num_slices, sc.topo), cfg.agent,
                  cfg.seed);
  ReplayBuffer buffer(cfg.agent.buffer_capacity);
  Rng noise_rng(derive_seed(cfg.seed, streams::kNoise));
  Rng warmup_rng(derive_seed(cfg.seed, streams::kWarmup));
  Rng buffer_rng(derive_seed(cfg.seed, streams::kBuffer));
  std::uniform_real_distribution<double> uniform_action(-1.0, 1.0);

  RunMetrics metrics;
  double sigma = cfg.agent.sigma;
  const int action_dim = action_size(num_slices, sc.topo);

  for (int e = 0; e < cfg.episodes; ++e) {
    std::vector<double> state = env.reset(derive_seed(cfg.seed, streams::kEpisode, e));
    EpisodeMetrics em;
    em.episode = e;
    em.sigma = e < cfg.agent.warmup_episodes ? 0.0 : sigma;

    for (int w = 1; w <= sc.windows; ++w) {
      std::vector<double> action;
      if (e < cfg.agent.warmup_episodes) {
        action.resize(action_dim);
        for (auto& a : action) a = uniform_action(warmup_rng);
      } else {
        action = agent.act(state, sigma, noise_rng);
      }
      auto res = env.step(action);
      buffer.push(Transition{state, action, res.reward, res.next_state});
      if (buffer.size() >= static_cast<std::size_t>(cfg.agent.batch_size)) {
        const auto batch = buffer.sample(cfg.agent.batch_size, buffer_rng);
        const auto stats = agent.train_step(batch);
        if (!std::isfinite(stats.critic_loss) || !std::isfinite(stats.actor_objective))
          throw std::runtime_error("training diverged (non-finite loss) at episode " +
                                   std::to_string(e) + ", window " + std::to_string(w));
        em.critic_loss += stats.critic_loss;
        em.actor_objective += stats.actor_objective;
        em.train_steps += 1;
      }

      const auto wm = make_window_metrics(e, w, res.cost, res.mean_delay, sc.slices);
      em.total_cost += res.cost.total;
      em.deployment += res.cost.deployment;
      em.provisioning += res.cost.provisioning;
      em.adjustment += res.cost.adjustment;
      em.sla_revenue += res.cost.sla_revenue;
      for (int v : wm.violated) em.sla_violations += v;
      metrics.windows.push_back(wm);
      state = std::move(res.next_state);
    }
    if (em.train_steps > 0) {
      em.critic_loss /= em.train_steps;
      em.actor_objective /= em.train_steps;
    }
    if (e >= cfg.agent.warmup_episodes) sigma *= cfg.agent.sigma_decay;
    metrics.episodes.push_back(em);
  }
  metrics.wall_clock_s = clock.seconds();

  std::ostringstream noise_ss, warmup_ss, buffer_ss;
  noise_ss << noise_rng;
  warmup_ss << warmup_rng;
  buffer_ss << buffer_rng;
  TrainResult out{std::move(metrics),
                  Checkpoint{std::move(agent), sigma, cfg.episodes, noise_ss.str(),
                             buffer_ss.str(), warmup_ss.str()}};
  return out;
}

RunMetrics run_baseline(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Stopwatch clock;
  const EnvScenario sc = cfg.scenario();
  const SearchGrid grid = cfg.search_grid();
  const int num_slices = static_cast<int>(sc.slices.size());

  RunMetrics metrics;
  EpisodeMetrics em;
  QueueState queues(num_slices, sc.topo.num_stations());
  PlanningDecision prev = sc.initial_plan;

  for (int w = 1; w <= sc.windows; ++w) {
    const WindowTraffic traffic = make_window_traffic(sc, seed, w);
    const PlanningDecision plan = myopic_plan(traffic, queues, grid, sc.slices, sc.topo, sc.radio,
                                              sc.compute, sc.cost, sc.slot_seconds);
    for (int m = 0; m < sc.topo.num_stations(); ++m) {
      if (plan.station_active(sc.topo, m)) continue;
      for (int k = 0; k < num_slices; ++k) queues.at(k, m) = 0.0;
    }
    WindowResult wres = run_window(plan, traffic, queues, sc.slices, sc.topo, sc.radio,
                                   sc.compute, sc.slot_seconds, /*keep_slot_reports=*/false);
    const CostBreakdown cb = window_cost(plan, prev, wres.mean_delay, sc.slices, sc.topo, sc.cost);
    const auto wm = make_window_metrics(0, w, cb, wres.mean_delay, sc.slices);
    em.total_cost += cb.total;
    em.deployment += cb.deployment;
    em.provisioning += cb.provisioning;
    em.adjustment += cb.adjustment;
    em.sla_revenue += cb.sla_revenue;
    for (int v : wm.violated) em.sla_violations += v;
    metrics.windows.push_back(wm);
    queues = std::move(wres.queues);
    prev = plan;
  }
  metrics.episodes.push_back(em);
  metrics.wall_clock_s = clock.seconds();
  return metrics;
}

RunMetrics run_policy(const ExperimentConfig& cfg, const DdpgAgent& agent, std::uint64_t seed) {
  cfg.validate();
  const EnvScenario sc = cfg.scenario();
  SliceEnv env(sc);
  Rng unused_rng(0);  // sigma = 0 draws nothing

  RunMetrics metrics;
  EpisodeMetrics em;
  std::vector<double> state = env.reset(seed);
  for (int w = 1; w <= sc.windows; ++w) {
    const auto action = agent.act(state, 0.0, unused_rng);
    auto res = env.step(action);
    const auto wm = make_window_metrics(0, w, res.cost, res.mean_delay, sc.slices);
    em.total_cost += res.cost.total;
    em.deployment += res.cost.deployment;
    em.provisioning += res.cost.provisioning;
    em.adjustment += res.cost.adjustment;
    em.sla_revenue += res.cost.sla_revenue;
    for (int v : wm.violated) em.sla_violations += v;
    metrics.windows.push_back(wm);
    state = std::move(res.next_state);
  }
  metrics.episodes.push_back(em);
  return metrics;
}

EvalResult evaluate(const ExperimentConfig& cfg, const DdpgAgent& agent) {
  const int num_slices = static_cast<int>(cfg.slices.size());
  if (agent.state_dim() != state_size(num_slices, cfg.topology) ||
      agent.action_dim() != action_size(num_slices, cfg.topology))
    throw std::invalid_argument(
        "evaluate: checkpoint dimensions do not match this configuration");
  EvalResult out;
  for (double rate : cfg.eval.arrival_rates) {
    ExperimentConfig swept = cfg;
    for (auto& s : swept.slices) s.arrival_rate = rate;

    std::vector<double> taws_costs, base_costs;
    for (std::uint64_t seed : cfg.eval.seeds) {
      RunMetrics taws = run_policy(swept, agent, seed);
      RunMetrics base = run_baseline(swept, seed);
      taws_costs.push_back(taws.episodes[0].total_cost);
      base_costs.push_back(base.episodes[0].total_cost);
      out.runs.push_back(EvalRun{rate, "taws", seed, taws.episodes[0].total_cost,
                                 std::move(taws.windows)});
      out.runs.push_back(EvalRun{rate, "baseline", seed, base.episodes[0].total_cost,
                                 std::move(base.windows)});
    }
    const auto stats = [](const std::vector<double>& v) {
      double mean = 0;
      for (double x : v) mean += x;
      mean /= v.size();
      double var = 0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
      return std::pair<double, double>{mean, sd};
    };
    const auto [tm, ts] = stats(taws_costs);
    const auto [bm, bs] = stats(base_costs);
    out.table.push_back(CompareRow{rate, "taws", tm, ts, static_cast<int>(taws_costs.size())});
    out.table.push_back(CompareRow{rate, "baseline", bm, bs, static_cast<int>(base_costs.size())});
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (series.empty()) throw std::invalid_argument("moving_average: empty series");
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  const int n = static_cast<int>(series.size());
  const int half = window / 2;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n, i + (window - half));
    double sum = 0;
    for (int j = lo; j < hi; ++j) sum += series[j];
    out[i] = sum / (hi - lo);
  }
  return out;
}

std::string format_episodes_csv(const std::vector<EpisodeMetrics>& episodes) {
  std::ostringstream os;
  os << "episode,total_cost,total_cost_ma5,phi_d,phi_p,phi_s,phi_q,critic_loss,actor_q,sigma,"
        "train_steps,sla_violations\n";
  std::vector<double> totals;
  totals.reserve(episodes.size());
  for (const auto& e : episodes) totals.push_back(e.total_cost);
  const std::vector<double> smoothed =
      totals.empty() ? totals : moving_average(totals, 5);
  for (size_t i = 0; i < episodes.size(); ++i) {
    const auto& e = episodes[i];
    os << e.episode << ',' << fmt(e.total_cost) << ',' << fmt(smoothed[i]) << ','
       << fmt(e.deployment) << ',' << fmt(e.provisioning) << ',' << fmt(e.adjustment) << ','
       << fmt(e.sla_revenue) << ',' << fmt(e.critic_loss) << ',' << fmt(e.actor_objective) << ','
       << fmt(e.sigma) << ',' << e.train_steps << ',' << e.sla_violations << '\n';
  }
  return os.str();
}

std::string format_windows_csv(const std::vector<WindowMetrics>& windows, int num_slices) {
  std::ostringstream os;
  os << "episode,window,phi_d,phi_p,phi_s,phi_q,total";
  for (int k = 1; k <= num_slices; ++k) os << ",dbar_" << k;
  for (int k = 1; k <= num_slices; ++k) os << ",viol_" << k;
  os << '\n';
  for (const auto& w : windows) {
    os << w.episode << ',' << w.window << ',' << fmt(w.cost.deployment) << ','
       << fmt(w.cost.provisioning) << ',' << fmt(w.cost.adjustment) << ','
       << fmt(w.cost.sla_revenue) << ',' << fmt(w.cost.total);
    for (double d : w.mean_delay) os << ',' << fmt(d);
    for (int v : w.violated) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

std::string format_compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "arrival_rate,scheme,mean_cost,std_cost,n_seeds\n";
  for (const auto& r : rows)
    os << fmt(r.arrival_rate) << ',' << r.scheme << ',' << fmt(r.mean_cost) << ','
       << fmt(r.std_cost) << ',' << r.n_seeds << '\n';
  return os.str();
}

std::string format_eval_windows_csv(const std::vector<EvalRun>& runs, int num_slices) {
  std::ostringstream os;
  os << "arrival_rate,scheme,seed,window,phi_d,phi_p,phi_s,phi_q,total";
  for (int k = 1; k <= num_slices; ++k) os << ",dbar_" << k;
  os << '\n';
  for (const auto& r : runs) {
    for (const auto& w : r.windows) {
      os << fmt(r.arrival_rate) << ',' << r.scheme << ',' << r.seed << ',' << w.window << ','
         << fmt(w.cost.deployment) << ',' << fmt(w.cost.provisioning) << ','
         << fmt(w.cost.adjustment) << ',' << fmt(w.cost.sla_revenue) << ',' << fmt(w.cost.total);
      for (double d : w.mean_delay) os << ',' << fmt(d);
      os << '\n';
    }
  }
  return os.str();
}

std::string simulate_report(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const EnvScenario sc = cfg.scenario();
  const int num_slices = static_cast<int>(sc.slices.size());
  const PlanningDecision plan = cfg.simulate_plan ? *cfg.simulate_plan : sc.initial_plan;
  const auto verdict = validate_plan(plan, sc.topo);
  if (!verdict.ok())
    throw std::invalid_argument("simulate: plan infeasible: " + verdict.violations.front());

  const WindowTraffic traffic = make_window_traffic(sc, seed, 1);
  QueueState queues(num_slices, sc.topo.num_stations());
  const WindowResult res = run_window(plan, traffic, queues, sc.slices, sc.topo, sc.radio,
                                      sc.compute, sc.slot_seconds, /*keep_slot_reports=*/true);
  std::ostringstream os;
  os << "slot,slice,tasks,delay,offload,edge,cloud\n";
  for (const auto& rep : res.slot_reports) {
    for (int k = 0; k < num_slices; ++k) {
      const auto& s = rep.slices[k];
      os << rep.slot << ',' << k << ',' << s.tasks << ',' << fmt(s.total) << ','
         << fmt(s.offload) << ',' << fmt(s.edge) << ',' << fmt(s.cloud) << '\n';
    }
  }
  os << "# window mean delay:";
  for (int k = 0; k < num_slices; ++k) os << ' ' << fmt(res.mean_delay[k]);
  os << '\n';
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json j;
  j["format"] = "slicesim-checkpoint-v1";
  j["episodes_trained"] = ckpt.episodes_trained;
  j["sigma"] = ckpt.sigma;
  j["agent"] = ckpt.agent.to_json();
  j["rng"] = {{"noise", ckpt.noise_rng_state},
              {"buffer", ckpt.buffer_rng_state},
              {"warmup", ckpt.warmup_rng_state}};
  write_text_file(path, j.dump(2) + "\n");
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "slicesim-checkpoint-v1")
    throw std::runtime_error("checkpoint: unknown format");
  Checkpoint ckpt{DdpgAgent::from_json(j.at("agent")), j.at("sigma"), j.at("episodes_trained"),
                  j.at("rng").at("noise"), j.at("rng").at("buffer"), j.at("rng").at("warmup")};
  return ckpt;
}

}  // namespace slicesim
