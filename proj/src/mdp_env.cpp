#include "slicesim/mdp_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicesim {

int state_size(int num_slices, const Topology& topo) {
  return topo.num_regions() + topo.num_stations() + 2 * num_slices * topo.num_stations() +
         num_slices;
}

int action_size(int num_slices, const Topology& topo) {
  return plan_vector_size(num_slices, topo);
}

namespace {
inline double unit_clamp(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

std::vector<double> encode_state(const DensityMap& density, const PlanningDecision& prev_plan,
                                 const Topology& topo, const NormBounds& bounds) {
  if (static_cast<int>(density.mean_vehicles.size()) != topo.num_regions())
    throw std::invalid_argument("encode_state: density region count mismatch");
  const int num_slices = prev_plan.spectrum.slices;
  std::vector<double> s;
  s.reserve(state_size(num_slices, topo));
  for (double lambda : density.mean_vehicles) s.push_back(unit_clamp(lambda / bounds.lambda_max));
  for (int m = 0; m < topo.num_stations(); ++m)
    s.push_back(prev_plan.station_active(topo, m) ? 1.0 : 0.0);
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < topo.num_stations(); ++m)
      s.push_back(unit_clamp(double(prev_plan.spectrum.at(k, m)) /
                             topo.stations[m].subcarrier_capacity));
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < topo.num_stations(); ++m)
      s.push_back(unit_clamp(double(prev_plan.compute.at(k, m)) / topo.stations[m].vm_capacity));
  for (int k = 0; k < num_slices; ++k) {
    const double denom = bounds.h_max > 1 ? bounds.h_max - 1.0 : 1.0;
    s.push_back(unit_clamp((prev_plan.cloud[k] - 1.0) / denom));
  }
  return s;
}

std::vector<double> plan_to_action(const PlanningDecision& plan, const Topology& topo,
                                   const NormBounds& bounds) {
  const int num_slices = plan.spectrum.slices;
  std::vector<double> a;
  a.reserve(action_size(num_slices, topo));
  for (int flag : plan.activation) a.push_back(flag ? 1.0 : -1.0);
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < topo.num_stations(); ++m)
      a.push_back(2.0 * plan.spectrum.at(k, m) / topo.stations[m].subcarrier_capacity - 1.0);
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < topo.num_stations(); ++m)
      a.push_back(2.0 * plan.compute.at(k, m) / topo.stations[m].vm_capacity - 1.0);
  for (int k = 0; k < num_slices; ++k) {
    const double denom = bounds.h_max > 1 ? bounds.h_max - 1.0 : 1.0;
    a.push_back(2.0 * (plan.cloud[k] - 1.0) / denom - 1.0);
  }
  return a;
}

DensityMap DensitySource::density_for(int window, std::uint64_t episode_seed) const {
  if (pattern) {
    Rng rng(derive_seed(episode_seed, streams::kDensity, static_cast<std::uint64_t>(window)));
    return gen_density(window, *pattern, rng);
  }
  if (trace.empty()) throw std::runtime_error("density source: neither pattern nor trace set");
  const int idx = (window - 1) % static_cast<int>(trace.size());
  DensityMap d = trace[idx];
  d.window = window;
  return d;
}

DensityMap window_density(const EnvScenario& sc, std::uint64_t episode_seed, int window) {
  return sc.density.density_for(window, episode_seed);
}

WindowTraffic make_window_traffic(const EnvScenario& sc, std::uint64_t episode_seed, int window) {
  Rng rng(derive_seed(episode_seed, streams::kTraffic, static_cast<std::uint64_t>(window)));
  WindowTraffic t;
  t.slots = sample_window(window_density(sc, episode_seed, window), sc.topo, sc.slices,
                          sc.shadowing_sigma_db, sc.radio.tx_power_dbm, sc.slots_per_window, rng);
  return t;
}

SliceEnv::SliceEnv(EnvScenario scenario) : sc_(std::move(scenario)) {
  sc_.topo.validate();
  for (const auto& s : sc_.slices) s.validate();
  sc_.cost.validate();
  if (sc_.windows < 1) throw std::invalid_argument("env: needs at least one window");
  if (sc_.slots_per_window < 1) throw std::invalid_argument("env: needs at least one slot");
  if (sc_.initial_plan.cloud.empty())
    sc_.initial_plan = PlanningDecision::zero(static_cast<int>(sc_.slices.size()), sc_.topo);
  const auto verdict = validate_plan(sc_.initial_plan, sc_.topo);
  if (!verdict.ok())
    throw std::invalid_argument("env: initial plan infeasible: " + verdict.violations.front());
  prev_plan_ = sc_.initial_plan;
  queues_ = QueueState(static_cast<int>(sc_.slices.size()), sc_.topo.num_stations());
}

std::vector<double> SliceEnv::reset(std::uint64_t episode_seed) {
  episode_seed_ = episode_seed;
  window_ = 1;
  queues_ = QueueState(static_cast<int>(sc_.slices.size()), sc_.topo.num_stations());
  prev_plan_ = sc_.initial_plan;
  return encode_state(window_density(sc_, episode_seed_, 1), prev_plan_, sc_.topo, sc_.bounds);
}

SliceEnv::StepResult SliceEnv::step(std::span<const double> action) {
  const int num_slices = static_cast<int>(sc_.slices.size());
  if (window_ > sc_.windows)
    throw std::logic_error("env: episode finished, call reset first");
  if (static_cast<int>(action.size()) != action_size(num_slices, sc_.topo))
    throw std::invalid_argument("env: action dimension mismatch");

  // affine map from the [-1,1] box to plan units, then feasibility projection
  std::vector<double> scaled(action.size());
  const int m_s = sc_.topo.num_small();
  const int m_all = sc_.topo.num_stations();
  int idx = 0;
  const auto unit = [](double a) { return (std::clamp(a, -1.0, 1.0) + 1.0) / 2.0; };
  for (int s = 0; s < m_s; ++s, ++idx) scaled[idx] = unit(action[idx]);
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < m_all; ++m, ++idx)
      scaled[idx] = unit(action[idx]) * sc_.topo.stations[m].subcarrier_capacity;
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < m_all; ++m, ++idx)
      scaled[idx] = unit(action[idx]) * sc_.topo.stations[m].vm_capacity;
  for (int k = 0; k < num_slices; ++k, ++idx)
    scaled[idx] = 1.0 + unit(action[idx]) * (sc_.bounds.h_max - 1);

  StepResult out;
  out.plan = project_plan(scaled, sc_.topo, num_slices, sc_.bounds.h_max);
  const auto verdict = validate_plan(out.plan, sc_.topo);
  if (!verdict.ok())
    throw std::logic_error("env: projection produced infeasible plan: " +
                           verdict.violations.front());

  // backlog of stations that just went dark is gone with them
  for (int m = 0; m < m_all; ++m) {
    if (out.plan.station_active(sc_.topo, m)) continue;
    for (int k = 0; k < num_slices; ++k) queues_.at(k, m) = 0.0;
  }

  const WindowTraffic traffic = make_window_traffic(sc_, episode_seed_, window_);
  WindowResult wres = run_window(out.plan, traffic, queues_, sc_.slices, sc_.topo, sc_.radio,
                                 sc_.compute, sc_.slot_seconds, /*keep_slot_reports=*/false);
  out.cost = window_cost(out.plan, prev_plan_, wres.mean_delay, sc_.slices, sc_.topo, sc_.cost);
  out.reward = -out.cost.total;
  out.mean_delay = std::move(wres.mean_delay);

  queues_ = std::move(wres.queues);
  prev_plan_ = out.plan;
  window_ += 1;
  out.next_state =
      encode_state(window_density(sc_, episode_seed_, window_), prev_plan_, sc_.topo, sc_.bounds);
  out.episode_done = window_ > sc_.windows;
  return out;
}

}  // namespace slicesim
