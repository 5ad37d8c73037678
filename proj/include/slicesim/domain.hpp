#pragma once

#include <string>
#include <vector>

namespace slicesim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

enum class BsKind { Macro, Small };

struct BaseStation {
  int id = 0;
  BsKind kind = BsKind::Small;
  Point position;
  double coverage_radius_m = 0.0;
  int subcarrier_capacity = 0;  // B_m
  int vm_capacity = 0;          // C_m
};

struct RegionGrid {
  int rows = 1;
  int cols = 1;
  int count() const { return rows * cols; }
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

// Physical network: base stations plus the square service area split into
// J = rows*cols equal rectangular regions. Macro stations are always active.
struct Topology {
  std::vector<BaseStation> stations;
  double area_side_m = 0.0;
  RegionGrid region_grid;

  int num_stations() const { return static_cast<int>(stations.size()); }
  int num_small() const;
  int num_regions() const { return region_grid.count(); }
  std::vector<int> small_station_ids() const;
  // station index nearest to p; ties broken toward the lowest id
  int nearest_station(Point p) const;
  int nearest_macro(Point p) const;
  Rect region_rect(int region) const;
  int region_of(Point p) const;

  // throws std::invalid_argument on structural problems (no macro, uncovered
  // area, non-positive capacities, bad grid)
  void validate() const;
};

struct SliceSpec {
  int id = 0;
  double task_size_bits = 0.0;         // xi_k
  double compute_cycles_per_bit = 0.0; // eta_k
  double deadline_s = 0.0;             // theta_k
  double soft_deadline_s = 0.0;        // theta'_k
  double arrival_rate = 0.0;           // tasks per vehicle per slot
  void validate() const;
};

// K x M integer grid stored k-major (slice outer, station inner).
struct ResourceGrid {
  int slices = 0;
  int stations = 0;
  std::vector<int> values;

  ResourceGrid() = default;
  ResourceGrid(int k, int m) : slices(k), stations(m), values(static_cast<size_t>(k) * m, 0) {}
  int& at(int k, int m) { return values[static_cast<size_t>(k) * stations + m]; }
  int at(int k, int m) const { return values[static_cast<size_t>(k) * stations + m]; }
  bool same_shape(const ResourceGrid& o) const {
    return slices == o.slices && stations == o.stations;
  }
  bool operator==(const ResourceGrid&) const = default;
};

// One planning window's decisions: SBS activation flags (station order,
// small stations only), per-slice per-station subcarriers and edge VMs,
// per-slice cloud VMs.
struct PlanningDecision {
  std::vector<int> activation;  // length M_s, entries 0/1
  ResourceGrid spectrum;        // b, K x M
  ResourceGrid compute;         // c, K x M
  std::vector<int> cloud;       // h, length K, entries >= 1

  static PlanningDecision zero(int num_slices, const Topology& topo);
  // macro stations are always active
  bool station_active(const Topology& topo, int station) const;
  bool operator==(const PlanningDecision&) const = default;
};

struct PlanVerdict {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the planning-decision invariants. Throws std::invalid_argument on
// dimension mismatch (a structural error, not an infeasibility).
PlanVerdict validate_plan(const PlanningDecision& plan, const Topology& topo);

// Layout of raw plan vectors: [o (M_s) ; b (K*M, k-major) ; c (K*M) ; h (K)].
int plan_vector_size(int num_slices, const Topology& topo);

// Deterministic projection of a raw real vector onto the feasible plan set.
// Activation entries are thresholded at 0.5; b and c entries are desired
// resource amounts clamped to [0, cap] and rounded; per-station sums beyond
// capacity are scaled down proportionally and re-rounded with a
// largest-remainder correction; h is rounded and clamped to [1, h_max];
// resources on deactivated SBSs are zeroed.
PlanningDecision project_plan(const std::vector<double>& raw, const Topology& topo,
                              int num_slices, int h_max);

// Inverse helper: encodes a plan as a raw vector that project_plan maps back
// to the same plan.
std::vector<double> plan_to_raw(const PlanningDecision& plan, const Topology& topo);

// Per-station task backlogs in bits, K x M.
struct QueueState {
  int slices = 0;
  int stations = 0;
  std::vector<double> backlog_bits;

  QueueState() = default;
  QueueState(int k, int m)
      : slices(k), stations(m), backlog_bits(static_cast<size_t>(k) * m, 0.0) {}
  double& at(int k, int m) { return backlog_bits[static_cast<size_t>(k) * stations + m]; }
  double at(int k, int m) const { return backlog_bits[static_cast<size_t>(k) * stations + m]; }
};

}  // namespace slicesim
