// Command-line front end: train the planner, run the myopic benchmark,
// compare both, or trace one window in detail.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "slicesim/harness.hpp"

namespace {

slicesim::ExperimentConfig load_config(const std::string& config_path,
                                       std::optional<std::uint64_t> seed,
                                       std::optional<int> episodes,
                                       std::optional<std::string> out_dir) {
  auto cfg = config_path.empty() ? slicesim::ExperimentConfig::defaults()
                                 : slicesim::ExperimentConfig::load(config_path);
  if (seed) cfg.seed = *seed;
  if (episodes) cfg.episodes = *episodes;
  if (out_dir) cfg.out_dir = *out_dir;
  cfg.validate();
  return cfg;
}

std::string join(const std::string& dir, const std::string& name) { return dir + "/" + name; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-timescale network slicing simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "JSON config file (defaults used when omitted)");
  app.add_option("--seed", seed, "master seed override");
  app.add_option("--episodes", episodes, "training episode count override");
  app.add_option("--out", out_dir, "output directory override");

  auto* train = app.add_subcommand("train", "train the planning policy");
  auto* baseline = app.add_subcommand("baseline", "run the myopic per-window planner");
  auto* eval = app.add_subcommand("eval", "compare a trained policy against the benchmark");
  auto* simulate = app.add_subcommand("simulate", "run one window under a fixed plan");
  for (auto* sub : {train, baseline, eval, simulate}) sub->fallthrough();

  std::string checkpoint_path;
  eval->add_option("--checkpoint", checkpoint_path,
                   "checkpoint to evaluate (default: <out>/checkpoint.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load_config(config_path, seed, episodes, out_dir);

    if (train->parsed()) {
      const auto result = slicesim::run_training(cfg);
      slicesim::write_text_file(join(cfg.out_dir, "episodes.csv"),
                                slicesim::format_episodes_csv(result.metrics.episodes));
      slicesim::write_text_file(
          join(cfg.out_dir, "windows.csv"),
          slicesim::format_windows_csv(result.metrics.windows,
                                       static_cast<int>(cfg.slices.size())));
      slicesim::save_checkpoint_file(join(cfg.out_dir, "checkpoint.json"), result.checkpoint);
      std::printf("trained %d episodes in %.1f s; outputs in %s\n", cfg.episodes,
                  result.metrics.wall_clock_s, cfg.out_dir.c_str());
      if (!result.metrics.episodes.empty())
        std::printf("last episode cost: %.4f\n", result.metrics.episodes.back().total_cost);
    } else if (baseline->parsed()) {
      const auto metrics = slicesim::run_baseline(cfg, cfg.seed);
      slicesim::write_text_file(join(cfg.out_dir, "episodes.csv"),
                                slicesim::format_episodes_csv(metrics.episodes));
      slicesim::write_text_file(
          join(cfg.out_dir, "windows.csv"),
          slicesim::format_windows_csv(metrics.windows, static_cast<int>(cfg.slices.size())));
      std::printf("baseline lifecycle cost: %.4f (%.1f s); outputs in %s\n",
                  metrics.episodes[0].total_cost, metrics.wall_clock_s, cfg.out_dir.c_str());
    } else if (eval->parsed()) {
      const std::string path =
          checkpoint_path.empty() ? join(cfg.out_dir, "checkpoint.json") : checkpoint_path;
      const auto ckpt = slicesim::load_checkpoint_file(path);
      const auto result = slicesim::evaluate(cfg, ckpt.agent);
      slicesim::write_text_file(join(cfg.out_dir, "compare.csv"),
                                slicesim::format_compare_csv(result.table));
      slicesim::write_text_file(
          join(cfg.out_dir, "eval_windows.csv"),
          slicesim::format_eval_windows_csv(result.runs, static_cast<int>(cfg.slices.size())));
      for (const auto& row : result.table)
        std::printf("rate %.2f %-8s mean %.4f std %.4f (%d seeds)\n", row.arrival_rate,
                    row.scheme.c_str(), row.mean_cost, row.std_cost, row.n_seeds);
    } else if (simulate->parsed()) {
      std::fputs(slicesim::simulate_report(cfg, cfg.seed).c_str(), stdout);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
