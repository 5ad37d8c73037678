#include "slicesim/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "slicesim/traffic.hpp"

namespace slicesim {

void TimescaleConfig::validate() const {
  if (slot_seconds <= 0 || window_seconds <= 0)
    throw std::invalid_argument("timescales: durations must be > 0");
  const double ratio = window_seconds / slot_seconds;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1)
    throw std::invalid_argument("timescales: window/slot must be a positive integer");
  if (windows < 1) throw std::invalid_argument("timescales: windows must be >= 1");
  if (slots_per_window < 1 || slots_per_window > static_cast<int>(std::round(ratio)))
    throw std::invalid_argument("timescales: slots_per_window must be in [1, window/slot]");
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;

  c.topology.area_side_m = 1000.0;
  c.topology.region_grid = RegionGrid{4, 4};
  c.topology.stations = {
      BaseStation{0, BsKind::Macro, {500.0, 500.0}, 720.0, 10, 10},
      BaseStation{1, BsKind::Small, {250.0, 250.0}, 300.0, 10, 10},
      BaseStation{2, BsKind::Small, {750.0, 750.0}, 300.0, 10, 10},
  };

  c.slices = {
      SliceSpec{0, 0.6e6, 1000.0, 0.100, 0.050, 1.0},
      SliceSpec{1, 2.0e6, 200.0, 0.200, 0.100, 1.0},
  };

  c.radio = RadioParams::from_dbm(20e6, 27.0, -174.0, -164.0);
  c.compute = ComputeParams{10e9, 100e9, 0.15};

  const int j_count = c.topology.region_grid.count();
  DensityPattern p;
  p.base.assign(j_count, 1.0);
  p.amplitude.assign(j_count, 0.6);
  p.phase.assign(j_count, 0.0);
  p.period_windows = 24.0;
  p.noise_std = 0.2;
  c.traffic.pattern = std::move(p);
  return c;
}

namespace {

std::vector<double> expand_per_region(const nlohmann::json& v, int n, const char* name) {
  if (v.is_array()) {
    auto a = v.get<std::vector<double>>();
    if (static_cast<int>(a.size()) != n)
      throw std::invalid_argument(std::string("config: ") + name +
                                  " must be a scalar or an array of length J");
    return a;
  }
  return std::vector<double>(n, v.get<double>());
}

PlanningDecision plan_from_json(const nlohmann::json& j, const Topology& topo, int num_slices) {
  PlanningDecision p = PlanningDecision::zero(num_slices, topo);
  p.activation = j.at("activation").get<std::vector<int>>();
  const auto b = j.at("spectrum").get<std::vector<std::vector<int>>>();
  const auto c = j.at("compute").get<std::vector<std::vector<int>>>();
  if (static_cast<int>(b.size()) != num_slices || static_cast<int>(c.size()) != num_slices)
    throw std::invalid_argument("config: plan must have one resource row per slice");
  for (int k = 0; k < num_slices; ++k) {
    if (static_cast<int>(b[k].size()) != topo.num_stations() ||
        static_cast<int>(c[k].size()) != topo.num_stations())
      throw std::invalid_argument("config: plan rows must have one entry per station");
    for (int m = 0; m < topo.num_stations(); ++m) {
      p.spectrum.at(k, m) = b[k][m];
      p.compute.at(k, m) = c[k][m];
    }
  }
  p.cloud = j.at("cloud").get<std::vector<int>>();
  return p;
}

nlohmann::json plan_to_json(const PlanningDecision& p) {
  nlohmann::json b = nlohmann::json::array();
  nlohmann::json c = nlohmann::json::array();
  for (int k = 0; k < p.spectrum.slices; ++k) {
    std::vector<int> bk(p.spectrum.stations), ck(p.spectrum.stations);
    for (int m = 0; m < p.spectrum.stations; ++m) {
      bk[m] = p.spectrum.at(k, m);
      ck[m] = p.compute.at(k, m);
    }
    b.push_back(bk);
    c.push_back(ck);
  }
  return {{"activation", p.activation}, {"spectrum", b}, {"compute", c}, {"cloud", p.cloud}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c = defaults();
  c.seed = j.value("seed", c.seed);
  c.episodes = j.value("episodes", c.episodes);
  c.out_dir = j.value("out_dir", c.out_dir);

  if (j.contains("topology")) {
    const auto& tj = j.at("topology");
    Topology t;
    t.area_side_m = tj.at("area_side_m");
    t.region_grid.rows = tj.at("region_grid").at("rows");
    t.region_grid.cols = tj.at("region_grid").at("cols");
    int id = 0;
    for (const auto& sj : tj.at("stations")) {
      BaseStation s;
      s.id = id++;
      const std::string kind = sj.at("kind");
      if (kind == "macro") s.kind = BsKind::Macro;
      else if (kind == "small") s.kind = BsKind::Small;
      else throw std::invalid_argument("config: station kind must be macro or small");
      s.position = Point{sj.at("x"), sj.at("y")};
      s.coverage_radius_m = sj.at("coverage_radius_m");
      s.subcarrier_capacity = sj.at("subcarriers");
      s.vm_capacity = sj.at("edge_vms");
      t.stations.push_back(s);
    }
    c.topology = std::move(t);
  }

  if (j.contains("slices")) {
    c.slices.clear();
    int id = 0;
    for (const auto& sj : j.at("slices")) {
      SliceSpec s;
      s.id = id++;
      s.task_size_bits = sj.at("task_size_bits");
      s.compute_cycles_per_bit = sj.at("cycles_per_bit");
      s.deadline_s = sj.at("deadline_s");
      s.soft_deadline_s = sj.at("soft_deadline_s");
      s.arrival_rate = sj.at("arrival_rate");
      c.slices.push_back(s);
    }
  }

  if (j.contains("radio")) {
    const auto& rj = j.at("radio");
    c.radio = RadioParams::from_dbm(
        rj.value("subcarrier_bandwidth_hz", c.radio.subcarrier_bandwidth_hz),
        rj.value("tx_power_dbm", c.radio.tx_power_dbm),
        rj.value("noise_dbm_per_hz", c.radio.noise_dbm_per_hz),
        rj.value("interference_dbm_per_hz", c.radio.interference_dbm_per_hz));
  }
  if (j.contains("compute")) {
    const auto& cj = j.at("compute");
    c.compute.edge_vm_hz = cj.value("edge_vm_hz", c.compute.edge_vm_hz);
    c.compute.cloud_vm_hz = cj.value("cloud_vm_hz", c.compute.cloud_vm_hz);
    c.compute.backbone_rtt_s = cj.value("backbone_rtt_s", c.compute.backbone_rtt_s);
  }
  if (j.contains("cost")) {
    const auto& cj = j.at("cost");
    c.cost.q_d = cj.value("q_d", c.cost.q_d);
    c.cost.q_r = cj.value("q_r", c.cost.q_r);
    c.cost.q_s = cj.value("q_s", c.cost.q_s);
    c.cost.q_b = cj.value("q_b", c.cost.q_b);
    c.cost.q_p = cj.value("q_p", c.cost.q_p);
    const std::string ramp = cj.value("sla_ramp", "as_printed");
    if (ramp == "as_printed") c.cost.ramp = SlaRamp::AsPrinted;
    else if (ramp == "decreasing") c.cost.ramp = SlaRamp::Decreasing;
    else throw std::invalid_argument("config: sla_ramp must be as_printed or decreasing");
  }
  if (j.contains("timescales")) {
    const auto& tj = j.at("timescales");
    c.timescales.slot_seconds = tj.value("slot_seconds", c.timescales.slot_seconds);
    c.timescales.window_seconds = tj.value("window_seconds", c.timescales.window_seconds);
    c.timescales.windows = tj.value("windows", c.timescales.windows);
    c.timescales.slots_per_window = tj.value("slots_per_window", c.timescales.slots_per_window);
  }
  if (j.contains("traffic")) {
    const auto& tj = j.at("traffic");
    c.traffic.shadowing_sigma_db = tj.value("shadowing_sigma_db", c.traffic.shadowing_sigma_db);
    if (tj.contains("trace_path")) {
      c.traffic.trace_path = tj.at("trace_path");
      c.traffic.pattern.reset();
    }
    if (tj.contains("pattern")) {
      const auto& pj = tj.at("pattern");
      const int j_count = c.topology.region_grid.count();
      DensityPattern p;
      p.base = expand_per_region(pj.at("base"), j_count, "pattern.base");
      p.amplitude = expand_per_region(pj.value("amplitude", nlohmann::json(0.0)), j_count,
                                      "pattern.amplitude");
      p.phase = expand_per_region(pj.value("phase", nlohmann::json(0.0)), j_count, "pattern.phase");
      p.period_windows = pj.value("period_windows", 24.0);
      p.noise_std = pj.value("noise_std", 0.0);
      c.traffic.pattern = std::move(p);
      c.traffic.trace_path.clear();
    }
  }
  if (j.contains("bounds")) {
    c.bounds.lambda_max = j.at("bounds").value("lambda_max", c.bounds.lambda_max);
    c.bounds.h_max = j.at("bounds").value("h_max", c.bounds.h_max);
  }
  if (j.contains("agent")) {
    const auto& aj = j.at("agent");
    c.agent.hidden = aj.value("hidden", c.agent.hidden);
    c.agent.discount = aj.value("discount", c.agent.discount);
    c.agent.tau = aj.value("tau", c.agent.tau);
    c.agent.lr_actor = aj.value("lr_actor", c.agent.lr_actor);
    c.agent.lr_critic = aj.value("lr_critic", c.agent.lr_critic);
    c.agent.batch_size = aj.value("batch_size", c.agent.batch_size);
    c.agent.buffer_capacity = aj.value("buffer_capacity", c.agent.buffer_capacity);
    c.agent.sigma = aj.value("sigma", c.agent.sigma);
    c.agent.sigma_decay = aj.value("sigma_decay", c.agent.sigma_decay);
    c.agent.warmup_episodes = aj.value("warmup_episodes", c.agent.warmup_episodes);
  }
  if (j.contains("baseline")) {
    const auto& bj = j.at("baseline");
    c.baseline.spectrum_step = bj.value("spectrum_step", c.baseline.spectrum_step);
    c.baseline.vm_step = bj.value("vm_step", c.baseline.vm_step);
    c.baseline.cloud_values = bj.value("cloud_values", c.baseline.cloud_values);
  }
  if (j.contains("eval")) {
    const auto& ej = j.at("eval");
    c.eval.seeds = ej.value("seeds", c.eval.seeds);
    c.eval.arrival_rates = ej.value("arrival_rates", c.eval.arrival_rates);
  }
  const int num_slices = static_cast<int>(c.slices.size());
  if (j.contains("initial_plan"))
    c.initial_plan = plan_from_json(j.at("initial_plan"), c.topology, num_slices);
  if (j.contains("simulate_plan"))
    c.simulate_plan = plan_from_json(j.at("simulate_plan"), c.topology, num_slices);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config: invalid JSON in " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["episodes"] = episodes;
  j["out_dir"] = out_dir;

  nlohmann::json stations = nlohmann::json::array();
  for (const auto& s : topology.stations)
    stations.push_back({{"kind", s.kind == BsKind::Macro ? "macro" : "small"},
                        {"x", s.position.x},
                        {"y", s.position.y},
                        {"coverage_radius_m", s.coverage_radius_m},
                        {"subcarriers", s.subcarrier_capacity},
                        {"edge_vms", s.vm_capacity}});
  j["topology"] = {{"area_side_m", topology.area_side_m},
                   {"region_grid",
                    {{"rows", topology.region_grid.rows}, {"cols", topology.region_grid.cols}}},
                   {"stations", stations}};

  nlohmann::json slices_j = nlohmann::json::array();
  for (const auto& s : slices)
    slices_j.push_back({{"task_size_bits", s.task_size_bits},
                        {"cycles_per_bit", s.compute_cycles_per_bit},
                        {"deadline_s", s.deadline_s},
                        {"soft_deadline_s", s.soft_deadline_s},
                        {"arrival_rate", s.arrival_rate}});
  j["slices"] = slices_j;

  j["radio"] = {{"subcarrier_bandwidth_hz", radio.subcarrier_bandwidth_hz},
                {"tx_power_dbm", radio.tx_power_dbm},
                {"noise_dbm_per_hz", radio.noise_dbm_per_hz},
                {"interference_dbm_per_hz", radio.interference_dbm_per_hz}};
  j["compute"] = {{"edge_vm_hz", compute.edge_vm_hz},
                  {"cloud_vm_hz", compute.cloud_vm_hz},
                  {"backbone_rtt_s", compute.backbone_rtt_s}};
  j["cost"] = {{"q_d", cost.q_d}, {"q_r", cost.q_r}, {"q_s", cost.q_s},
               {"q_b", cost.q_b}, {"q_p", cost.q_p},
               {"sla_ramp", cost.ramp == SlaRamp::AsPrinted ? "as_printed" : "decreasing"}};
  j["timescales"] = {{"slot_seconds", timescales.slot_seconds},
                     {"window_seconds", timescales.window_seconds},
                     {"windows", timescales.windows},
                     {"slots_per_window", timescales.slots_per_window}};
  j["traffic"] = nlohmann::json::object();
  j["traffic"]["shadowing_sigma_db"] = traffic.shadowing_sigma_db;
  if (traffic.pattern) {
    j["traffic"]["pattern"] = {{"base", traffic.pattern->base},
                               {"amplitude", traffic.pattern->amplitude},
                               {"phase", traffic.pattern->phase},
                               {"period_windows", traffic.pattern->period_windows},
                               {"noise_std", traffic.pattern->noise_std}};
  } else {
    j["traffic"]["trace_path"] = traffic.trace_path;
  }
  j["bounds"] = {{"lambda_max", bounds.lambda_max}, {"h_max", bounds.h_max}};
  j["agent"] = {{"hidden", agent.hidden},
                {"discount", agent.discount},
                {"tau", agent.tau},
                {"lr_actor", agent.lr_actor},
                {"lr_critic", agent.lr_critic},
                {"batch_size", agent.batch_size},
                {"buffer_capacity", agent.buffer_capacity},
                {"sigma", agent.sigma},
                {"sigma_decay", agent.sigma_decay},
                {"warmup_episodes", agent.warmup_episodes}};
  j["baseline"] = {{"spectrum_step", baseline.spectrum_step},
                   {"vm_step", baseline.vm_step},
                   {"cloud_values", baseline.cloud_values}};
  j["eval"] = {{"seeds", eval.seeds}, {"arrival_rates", eval.arrival_rates}};
  if (initial_plan) j["initial_plan"] = plan_to_json(*initial_plan);
  if (simulate_plan) j["simulate_plan"] = plan_to_json(*simulate_plan);
  return j;
}

void ExperimentConfig::validate() const {
  topology.validate();
  if (slices.empty()) throw std::invalid_argument("config: at least one slice required");
  for (const auto& s : slices) s.validate();
  cost.validate();
  timescales.validate();
  agent.validate();
  if (episodes < 0) throw std::invalid_argument("config: episodes must be >= 0");
  if (bounds.lambda_max <= 0) throw std::invalid_argument("config: lambda_max must be > 0");
  if (bounds.h_max < 1) throw std::invalid_argument("config: h_max must be >= 1");
  if (traffic.pattern) {
    traffic.pattern->validate(topology.region_grid.count());
  } else if (traffic.trace_path.empty()) {
    throw std::invalid_argument("config: traffic needs a pattern or a trace_path");
  }
  if (traffic.shadowing_sigma_db < 0)
    throw std::invalid_argument("config: shadowing sigma must be >= 0");
  if (baseline.spectrum_step < 1 || baseline.vm_step < 1)
    throw std::invalid_argument("config: baseline steps must be >= 1");
  const int num_slices = static_cast<int>(slices.size());
  if (initial_plan) {
    const auto verdict = validate_plan(*initial_plan, topology);
    if (!verdict.ok())
      throw std::invalid_argument("config: initial plan infeasible: " +
                                  verdict.violations.front());
    if (initial_plan->spectrum.slices != num_slices)
      throw std::invalid_argument("config: initial plan slice count mismatch");
  }
}

EnvScenario ExperimentConfig::scenario() const {
  EnvScenario sc;
  sc.topo = topology;
  sc.slices = slices;
  sc.radio = radio;
  sc.compute = compute;
  sc.cost = cost;
  if (traffic.pattern) {
    sc.density.pattern = traffic.pattern;
  } else {
    sc.density.trace = load_trace(traffic.trace_path, topology.region_grid.count());
  }
  sc.bounds = bounds;
  sc.shadowing_sigma_db = traffic.shadowing_sigma_db;
  sc.slots_per_window = timescales.slots_per_window;
  sc.slot_seconds = timescales.slot_seconds;
  sc.windows = timescales.windows;
  sc.initial_plan =
      initial_plan ? *initial_plan : PlanningDecision::zero(static_cast<int>(slices.size()), topology);
  return sc;
}

SearchGrid ExperimentConfig::search_grid() const {
  return SearchGrid::quantized(topology, baseline.spectrum_step, baseline.vm_step,
                               baseline.cloud_values);
}

}  // namespace slicesim
