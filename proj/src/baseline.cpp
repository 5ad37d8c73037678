#include "slicesim/baseline.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace slicesim {

SearchGrid SearchGrid::quantized(const Topology& topo, int spectrum_step, int vm_step,
                                 std::vector<int> cloud_values) {
  if (spectrum_step < 1 || vm_step < 1)
    throw std::invalid_argument("search grid: steps must be >= 1");
  const auto ladder = [](int step, int cap) {
    std::vector<int> v;
    for (int x = 0; x < cap; x += step) v.push_back(x);
    v.push_back(cap);
    return v;
  };
  SearchGrid g;
  for (const auto& st : topo.stations) {
    g.spectrum_values.push_back(ladder(spectrum_step, st.subcarrier_capacity));
    g.compute_values.push_back(ladder(vm_step, st.vm_capacity));
  }
  g.cloud_values = std::move(cloud_values);
  return g;
}

void SearchGrid::validate(const Topology& topo) const {
  const size_t m = static_cast<size_t>(topo.num_stations());
  if (spectrum_values.size() != m || compute_values.size() != m)
    throw std::invalid_argument("search grid: one value list per station required");
  for (size_t i = 0; i < m; ++i) {
    if (spectrum_values[i].empty() || compute_values[i].empty())
      throw std::invalid_argument("search grid: empty value list");
    for (int v : spectrum_values[i])
      if (v < 0 || v > topo.stations[i].subcarrier_capacity)
        throw std::invalid_argument("search grid: spectrum value out of range");
    for (int v : compute_values[i])
      if (v < 0 || v > topo.stations[i].vm_capacity)
        throw std::invalid_argument("search grid: vm value out of range");
  }
  if (cloud_values.empty()) throw std::invalid_argument("search grid: no cloud values");
  for (int v : cloud_values)
    if (v < 1) throw std::invalid_argument("search grid: cloud values must be >= 1");
}

namespace {

// One per-slice candidate: resource rows plus its simulated window outcome.
struct SliceRow {
  std::vector<int> spectrum;  // per station
  std::vector<int> compute;   // per station
  int cloud = 1;
  double revenue = 0.0;       // Omega_k(D_bar)
  long resource_units = 0;    // h + sum(b) + sum(c)
};

void enumerate_rows(const std::vector<std::vector<int>>& values, std::vector<int>& current,
                    size_t station, std::vector<std::vector<int>>& out) {
  if (station == values.size()) {
    out.push_back(current);
    return;
  }
  for (int v : values[station]) {
    current[station] = v;
    enumerate_rows(values, current, station + 1, out);
  }
}

std::vector<int> plan_lex_key(const PlanningDecision& plan) {
  std::vector<int> key;
  key.insert(key.end(), plan.activation.begin(), plan.activation.end());
  key.insert(key.end(), plan.spectrum.values.begin(), plan.spectrum.values.end());
  key.insert(key.end(), plan.compute.values.begin(), plan.compute.values.end());
  key.insert(key.end(), plan.cloud.begin(), plan.cloud.end());
  return key;
}

PlanningDecision assemble_plan(const std::vector<const SliceRow*>& rows, const Topology& topo) {
  const int num_slices = static_cast<int>(rows.size());
  PlanningDecision plan = PlanningDecision::zero(num_slices, topo);
  for (int k = 0; k < num_slices; ++k) {
    for (int m = 0; m < topo.num_stations(); ++m) {
      plan.spectrum.at(k, m) = rows[k]->spectrum[m];
      plan.compute.at(k, m) = rows[k]->compute[m];
    }
    plan.cloud[k] = rows[k]->cloud;
  }
  const auto small_ids = topo.small_station_ids();
  for (size_t s = 0; s < small_ids.size(); ++s) {
    const int m = small_ids[s];
    bool used = false;
    for (int k = 0; k < num_slices && !used; ++k)
      used = plan.spectrum.at(k, m) > 0 || plan.compute.at(k, m) > 0;
    plan.activation[s] = used ? 1 : 0;
  }
  return plan;
}

}  // namespace

PlanningDecision myopic_plan(const WindowTraffic& traffic, const QueueState& queues_in,
                             const SearchGrid& grid, const std::vector<SliceSpec>& slices,
                             const Topology& topo, const RadioParams& radio,
                             const ComputeParams& compute, const CostParams& cost,
                             double slot_seconds) {
  grid.validate(topo);
  if (traffic.slots.empty()) throw std::invalid_argument("myopic_plan: empty traffic sample");
  const int num_slices = static_cast<int>(slices.size());
  const int m_all = topo.num_stations();
  if (queues_in.slices != num_slices || queues_in.stations != m_all)
    throw std::invalid_argument("myopic_plan: queue dimensions do not match");

  std::vector<std::vector<int>> b_rows, c_rows;
  {
    std::vector<int> scratch(m_all, 0);
    enumerate_rows(grid.spectrum_values, scratch, 0, b_rows);
    enumerate_rows(grid.compute_values, scratch, 0, c_rows);
  }

  // simulate each (slice, b_row, c_row, h) combination once; slices are
  // independent given the shared traffic, so candidates reuse these
  std::vector<std::vector<SliceRow>> rows(num_slices);
  for (int k = 0; k < num_slices; ++k) {
    std::span<const double> q_row(queues_in.backlog_bits.data() + static_cast<size_t>(k) * m_all,
                                  m_all);
    rows[k].reserve(b_rows.size() * c_rows.size() * grid.cloud_values.size());
    for (const auto& b : b_rows) {
      for (const auto& c : c_rows) {
        for (int h : grid.cloud_values) {
          const SliceWindowResult r = run_window_slice(
              k, b, c, h, q_row, traffic, slices, topo, radio, compute, slot_seconds);
          SliceRow row;
          row.spectrum = b;
          row.compute = c;
          row.cloud = h;
          row.revenue = sla_revenue(r.mean_delay, slices[k], cost);
          row.resource_units = h;
          for (int m = 0; m < m_all; ++m) row.resource_units += b[m] + c[m];
          rows[k].push_back(std::move(row));
        }
      }
    }
  }

  // combine per-slice rows under the per-station capacity constraints
  double best_cost = std::numeric_limits<double>::infinity();
  PlanningDecision best_plan;
  std::vector<int> best_key;
  std::vector<const SliceRow*> chosen(num_slices, nullptr);
  std::vector<int> used_b(m_all, 0), used_c(m_all, 0);

  // the leaf objective reproduces (Phi_d + Phi_p) - Phi_q exactly as the cost
  // module computes it: resource units are integers (exact in double), so only
  // the final multiplies and the k-ordered revenue sum carry rounding
  const auto evaluate_leaf = [&]() {
    long total_units = 0;
    double revenue = 0.0;
    for (int k = 0; k < num_slices; ++k) {
      total_units += chosen[k]->resource_units;
      revenue += chosen[k]->revenue;
    }
    int active = 0;
    for (const auto& st : topo.stations) {
      if (st.kind != BsKind::Small) continue;
      if (used_b[st.id] > 0 || used_c[st.id] > 0) ++active;
    }
    const double objective =
        (cost.q_d * active + cost.q_r * static_cast<double>(total_units)) - revenue;
    if (objective > best_cost) return;
    PlanningDecision plan = assemble_plan(chosen, topo);
    std::vector<int> key = plan_lex_key(plan);
    if (objective < best_cost || (objective == best_cost && key < best_key)) {
      best_cost = objective;
      best_plan = std::move(plan);
      best_key = std::move(key);
    }
  };

  const auto recurse = [&](auto&& self, int k) -> void {
    if (k == num_slices) {
      evaluate_leaf();
      return;
    }
    for (const SliceRow& row : rows[k]) {
      bool fits = true;
      for (int m = 0; m < m_all && fits; ++m) {
        fits = used_b[m] + row.spectrum[m] <= topo.stations[m].subcarrier_capacity &&
               used_c[m] + row.compute[m] <= topo.stations[m].vm_capacity;
      }
      if (!fits) continue;
      for (int m = 0; m < m_all; ++m) {
        used_b[m] += row.spectrum[m];
        used_c[m] += row.compute[m];
      }
      chosen[k] = &row;
      self(self, k + 1);
      for (int m = 0; m < m_all; ++m) {
        used_b[m] -= row.spectrum[m];
        used_c[m] -= row.compute[m];
      }
    }
  };
  recurse(recurse, 0);

  if (!std::isfinite(best_cost)) throw std::logic_error("myopic_plan: no feasible grid plan");
  return best_plan;
}

}  // namespace slicesim
