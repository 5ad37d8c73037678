#pragma once

#include <span>
#include <string>
#include <vector>

#include "slicesim/config.hpp"
#include "slicesim/ddpg.hpp"

namespace slicesim {

struct WindowMetrics {
  int episode = 0;
  int window = 0;
  CostBreakdown cost;
  std::vector<double> mean_delay;  // per slice
  std::vector<int> violated;       // per slice, mean delay beyond the deadline
};

struct EpisodeMetrics {
  int episode = 0;
  double total_cost = 0.0;  // sum of window totals
  double deployment = 0.0;
  double provisioning = 0.0;
  double adjustment = 0.0;
  double sla_revenue = 0.0;
  double critic_loss = 0.0;      // mean over the episode's train steps
  double actor_objective = 0.0;  // mean over the episode's train steps
  double sigma = 0.0;
  int train_steps = 0;
  int sla_violations = 0;  // (window, slice) pairs beyond the deadline
};

struct RunMetrics {
  std::vector<EpisodeMetrics> episodes;
  std::vector<WindowMetrics> windows;
  double wall_clock_s = 0.0;  // reported on stdout only, never in CSVs
};

struct Checkpoint {
  DdpgAgent agent;
  double sigma = 0.0;
  int episodes_trained = 0;
  std::string noise_rng_state;
  std::string buffer_rng_state;
  std::string warmup_rng_state;
};

struct TrainResult {
  RunMetrics metrics;
  Checkpoint checkpoint;
};

// Per episode and window: act, run the window, store the transition, sample a
// minibatch and update the networks. The first warmup episodes act uniformly
// at random; exploration noise decays per episode afterwards. Throws on
// non-finite losses.
TrainResult run_training(const ExperimentConfig& cfg);

// One lifecycle of per-window myopic planning over the same traffic streams a
// policy rollout with this seed would face; realized costs include the
// adjustment component the planner ignored.
RunMetrics run_baseline(const ExperimentConfig& cfg, std::uint64_t seed);

// Deterministic-policy rollout (sigma = 0) of one lifecycle.
RunMetrics run_policy(const ExperimentConfig& cfg, const DdpgAgent& agent, std::uint64_t seed);

struct CompareRow {
  double arrival_rate = 0.0;
  std::string scheme;  // "taws" or "baseline"
  double mean_cost = 0.0;
  double std_cost = 0.0;  // sample std, 0 for a single seed
  int n_seeds = 0;
};

struct EvalRun {
  double arrival_rate = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  std::vector<WindowMetrics> windows;
};

struct EvalResult {
  std::vector<CompareRow> table;
  std::vector<EvalRun> runs;
};

// TAWS (deterministic policy) vs the myopic benchmark on shared seeds, swept
// over arrival rates (each sweep value overrides every slice's rate).
EvalResult evaluate(const ExperimentConfig& cfg, const DdpgAgent& agent);

// Centered moving average, truncated at the edges; length preserved.
std::vector<double> moving_average(std::span<const double> series, int window = 5);

// CSV renderings (schemas in README); byte-stable for fixed inputs.
std::string format_episodes_csv(const std::vector<EpisodeMetrics>& episodes);
std::string format_windows_csv(const std::vector<WindowMetrics>& windows, int num_slices);
std::string format_compare_csv(const std::vector<CompareRow>& rows);
std::string format_eval_windows_csv(const std::vector<EvalRun>& runs, int num_slices);

// One window under a fixed plan with per-slot delay detail.
std::string simulate_report(const ExperimentConfig& cfg, std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);
void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace slicesim
