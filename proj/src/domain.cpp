#include "slicesim/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace slicesim {

double distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

int Topology::num_small() const {
  return static_cast<int>(std::count_if(stations.begin(), stations.end(),
                                        [](const BaseStation& s) { return s.kind == BsKind::Small; }));
}

std::vector<int> Topology::small_station_ids() const {
  std::vector<int> ids;
  for (const auto& s : stations)
    if (s.kind == BsKind::Small) ids.push_back(s.id);
  return ids;
}

int Topology::nearest_station(Point p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& s : stations) {
    const double d = distance(p, s.position);
    if (d < best_d) {
      best_d = d;
      best = s.id;
    }
  }
  return best;
}

int Topology::nearest_macro(Point p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& s : stations) {
    if (s.kind != BsKind::Macro) continue;
    const double d = distance(p, s.position);
    if (d < best_d) {
      best_d = d;
      best = s.id;
    }
  }
  return best;
}

Rect Topology::region_rect(int region) const {
  const double cw = area_side_m / region_grid.cols;
  const double ch = area_side_m / region_grid.rows;
  const int row = region / region_grid.cols;
  const int col = region % region_grid.cols;
  return Rect{col * cw, row * ch, (col + 1) * cw, (row + 1) * ch};
}

int Topology::region_of(Point p) const {
  const double cw = area_side_m / region_grid.cols;
  const double ch = area_side_m / region_grid.rows;
  int col = std::clamp(static_cast<int>(p.x / cw), 0, region_grid.cols - 1);
  int row = std::clamp(static_cast<int>(p.y / ch), 0, region_grid.rows - 1);
  return row * region_grid.cols + col;
}

void Topology::validate() const {
  if (stations.empty()) throw std::invalid_argument("topology: no stations");
  if (area_side_m <= 0) throw std::invalid_argument("topology: area_side_m must be > 0");
  if (region_grid.rows < 1 || region_grid.cols < 1)
    throw std::invalid_argument("topology: region grid must be at least 1x1");
  for (int i = 0; i < num_stations(); ++i) {
    const auto& s = stations[i];
    if (s.id != i) throw std::invalid_argument("topology: station ids must be 0..M-1 in order");
    if (s.coverage_radius_m <= 0)
      throw std::invalid_argument("topology: coverage_radius must be > 0");
    if (s.subcarrier_capacity < 1 || s.vm_capacity < 1)
      throw std::invalid_argument("topology: station capacities must be >= 1");
  }
  const bool has_macro =
      std::any_of(stations.begin(), stations.end(),
                  [](const BaseStation& s) { return s.kind == BsKind::Macro; });
  if (!has_macro) throw std::invalid_argument("topology: at least one macro station required");

  // sampled coverage check: every probed point must lie inside some macro disc
  const int grid_n = 21;
  for (int i = 0; i <= grid_n; ++i) {
    for (int j = 0; j <= grid_n; ++j) {
      const Point p{area_side_m * i / grid_n, area_side_m * j / grid_n};
      bool covered = false;
      for (const auto& s : stations) {
        if (s.kind == BsKind::Macro && distance(p, s.position) <= s.coverage_radius_m) {
          covered = true;
          break;
        }
      }
      if (!covered)
        throw std::invalid_argument("topology: area not fully covered by macro stations");
    }
  }
}

void SliceSpec::validate() const {
  if (task_size_bits <= 0) throw std::invalid_argument("slice: task_size_bits must be > 0");
  if (compute_cycles_per_bit <= 0)
    throw std::invalid_argument("slice: compute_cycles_per_bit must be > 0");
  if (!(soft_deadline_s > 0 && soft_deadline_s < deadline_s))
    throw std::invalid_argument("slice: requires 0 < soft_deadline < deadline");
  if (arrival_rate < 0) throw std::invalid_argument("slice: arrival_rate must be >= 0");
}

PlanningDecision PlanningDecision::zero(int num_slices, const Topology& topo) {
  PlanningDecision p;
  p.activation.assign(topo.num_small(), 0);
  p.spectrum = ResourceGrid(num_slices, topo.num_stations());
  p.compute = ResourceGrid(num_slices, topo.num_stations());
  p.cloud.assign(num_slices, 1);
  return p;
}

bool PlanningDecision::station_active(const Topology& topo, int station) const {
  if (topo.stations[station].kind == BsKind::Macro) return true;
  int pos = 0;
  for (int id : topo.small_station_ids()) {
    if (id == station) return activation[pos] != 0;
    ++pos;
  }
  return false;
}

PlanVerdict validate_plan(const PlanningDecision& plan, const Topology& topo) {
  const int m_s = topo.num_small();
  const int m_all = topo.num_stations();
  if (static_cast<int>(plan.activation.size()) != m_s ||
      plan.spectrum.stations != m_all || plan.compute.stations != m_all ||
      plan.spectrum.slices != plan.compute.slices ||
      static_cast<int>(plan.cloud.size()) != plan.spectrum.slices)
    throw std::invalid_argument("validate_plan: plan dimensions do not match topology");

  PlanVerdict v;
  const int num_slices = plan.spectrum.slices;
  for (int flag : plan.activation)
    if (flag != 0 && flag != 1) v.violations.push_back("activation flag not in {0,1}");
  for (int k = 0; k < num_slices; ++k) {
    if (plan.cloud[k] < 1)
      v.violations.push_back("cloud VMs below 1 for slice " + std::to_string(k));
    for (int m = 0; m < m_all; ++m) {
      if (plan.spectrum.at(k, m) < 0 || plan.compute.at(k, m) < 0)
        v.violations.push_back("negative resource at station " + std::to_string(m));
    }
  }
  for (int m = 0; m < m_all; ++m) {
    const bool active = plan.station_active(topo, m);
    int b_sum = 0, c_sum = 0;
    for (int k = 0; k < num_slices; ++k) {
      b_sum += plan.spectrum.at(k, m);
      c_sum += plan.compute.at(k, m);
    }
    if (!active && (b_sum > 0 || c_sum > 0))
      v.violations.push_back("resource on inactive BS " + std::to_string(m));
    if (active && b_sum > topo.stations[m].subcarrier_capacity)
      v.violations.push_back("spectrum capacity at " + std::to_string(m));
    if (active && c_sum > topo.stations[m].vm_capacity)
      v.violations.push_back("vm capacity at " + std::to_string(m));
  }
  return v;
}

int plan_vector_size(int num_slices, const Topology& topo) {
  return topo.num_small() + 2 * num_slices * topo.num_stations() + num_slices;
}

namespace {

// Rounds targets to integers whose sum fits cap. If plain rounding fits, use
// it; otherwise scale targets proportionally to sum exactly cap and apply
// largest-remainder rounding (ties toward lower index).
std::vector<int> fit_to_capacity(const std::vector<double>& targets, int cap) {
  const int n = static_cast<int>(targets.size());
  std::vector<int> out(n, 0);
  double target_sum = 0;
  long long rounded_sum = 0;
  for (int i = 0; i < n; ++i) {
    out[i] = static_cast<int>(std::llround(targets[i]));
    rounded_sum += out[i];
    target_sum += targets[i];
  }
  if (rounded_sum <= cap) return out;

  const double scale = cap / target_sum;
  std::vector<double> scaled(n);
  std::vector<int> flo(n);
  int flo_sum = 0;
  for (int i = 0; i < n; ++i) {
    scaled[i] = targets[i] * scale;
    flo[i] = static_cast<int>(std::floor(scaled[i]));
    flo_sum += flo[i];
  }
  int leftover = cap - flo_sum;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return (scaled[a] - flo[a]) > (scaled[b] - flo[b]);
  });
  for (int i = 0; i < n && leftover > 0; ++i, --leftover) flo[order[i]] += 1;
  return flo;
}

}  // namespace

PlanningDecision project_plan(const std::vector<double>& raw, const Topology& topo,
                              int num_slices, int h_max) {
  const int m_s = topo.num_small();
  const int m_all = topo.num_stations();
  if (static_cast<int>(raw.size()) != plan_vector_size(num_slices, topo))
    throw std::invalid_argument("project_plan: raw vector has wrong length");
  if (h_max < 1) throw std::invalid_argument("project_plan: h_max must be >= 1");

  PlanningDecision plan = PlanningDecision::zero(num_slices, topo);
  int idx = 0;
  for (int s = 0; s < m_s; ++s) plan.activation[s] = raw[idx++] >= 0.5 ? 1 : 0;

  const int b_off = idx;
  const int c_off = idx + num_slices * m_all;
  const int h_off = c_off + num_slices * m_all;

  for (int m = 0; m < m_all; ++m) {
    const auto& st = topo.stations[m];
    if (!plan.station_active(topo, m)) continue;
    std::vector<double> b_t(num_slices), c_t(num_slices);
    for (int k = 0; k < num_slices; ++k) {
      b_t[k] = std::clamp(raw[b_off + k * m_all + m], 0.0, double(st.subcarrier_capacity));
      c_t[k] = std::clamp(raw[c_off + k * m_all + m], 0.0, double(st.vm_capacity));
    }
    const auto b_fit = fit_to_capacity(b_t, st.subcarrier_capacity);
    const auto c_fit = fit_to_capacity(c_t, st.vm_capacity);
    for (int k = 0; k < num_slices; ++k) {
      plan.spectrum.at(k, m) = b_fit[k];
      plan.compute.at(k, m) = c_fit[k];
    }
  }
  for (int k = 0; k < num_slices; ++k) {
    const double h = std::clamp(raw[h_off + k], 1.0, double(h_max));
    plan.cloud[k] = std::max(1, static_cast<int>(std::llround(h)));
  }
  return plan;
}

std::vector<double> plan_to_raw(const PlanningDecision& plan, const Topology& topo) {
  const int num_slices = plan.spectrum.slices;
  const int m_all = topo.num_stations();
  std::vector<double> raw;
  raw.reserve(plan_vector_size(num_slices, topo));
  for (int flag : plan.activation) raw.push_back(flag ? 1.0 : 0.0);
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < m_all; ++m) raw.push_back(plan.spectrum.at(k, m));
  for (int k = 0; k < num_slices; ++k)
    for (int m = 0; m < m_all; ++m) raw.push_back(plan.compute.at(k, m));
  for (int k = 0; k < num_slices; ++k) raw.push_back(plan.cloud[k]);
  return raw;
}

}  // namespace slicesim
