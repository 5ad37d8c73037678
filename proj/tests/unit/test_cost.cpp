#include <doctest.h>

#include <stdexcept>

#include <limits>
#include <random>

#include "slicesim/cost.hpp"
#include "slicesim/rng.hpp"

using namespace slicesim;

namespace {

Topology topo3() {
  Topology t;
  t.area_side_m = 1000.0;
  t.region_grid = RegionGrid{2, 2};
  t.stations = {
      BaseStation{0, BsKind::Macro, {500, 500}, 720, 10, 10},
      BaseStation{1, BsKind::Small, {250, 250}, 300, 10, 10},
      BaseStation{2, BsKind::Small, {750, 750}, 300, 10, 10},
  };
  return t;
}

std::vector<SliceSpec> slices2() {
  return {SliceSpec{0, 0.6e6, 1000.0, 0.100, 0.050, 1.0},
          SliceSpec{1, 2.0e6, 200.0, 0.200, 0.100, 1.0}};
}

PlanningDecision random_plan(const Topology& topo, int num_slices, Rng& rng) {
  std::uniform_real_distribution<double> u(-3.0, 13.0);
  std::vector<double> raw(plan_vector_size(num_slices, topo));
  for (auto& v : raw) v = u(rng);
  return project_plan(raw, topo, num_slices, 10);
}

}  // namespace

TEST_CASE("cost params validation") {
  CostParams p;
  CHECK_NOTHROW(p.validate());
  p.q_p = p.q_b;  // penalty must exceed top revenue
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("deployment_cost") {
  const Topology topo = topo3();
  CostParams p;
  p.q_d = 3.0;
  auto plan = PlanningDecision::zero(2, topo);
  CHECK(deployment_cost(plan, topo, p) == 0.0);
  plan.activation = {1, 1};
  CHECK(deployment_cost(plan, topo, p) == doctest::Approx(6.0));
  // the macro never shows up in the sum
  plan.activation = {0, 0};
  plan.cloud = {5, 5};
  CHECK(deployment_cost(plan, topo, p) == 0.0);
}

TEST_CASE("provisioning_cost") {
  const Topology topo = topo3();
  CostParams p;
  p.q_r = 2.0;
  auto plan = PlanningDecision::zero(2, topo);
  CHECK(provisioning_cost(plan, topo, p) == doctest::Approx(4.0));  // h = (1,1)

  // resources on a deactivated SBS are gated out of the sum
  auto gated = plan;
  gated.spectrum.at(0, 1) = 7;  // station 1 inactive
  CHECK(provisioning_cost(gated, topo, p) == doctest::Approx(4.0));

  auto doubled = plan;
  CostParams p2 = p;
  p2.q_r = 4.0;
  CHECK(provisioning_cost(doubled, topo, p2) == doctest::Approx(8.0));
}

TEST_CASE("adjustment_cost") {
  const Topology topo = topo3();
  CostParams p;
  p.q_s = 1.0;
  auto prev = PlanningDecision::zero(2, topo);
  prev.activation = {1, 1};
  prev.spectrum.at(0, 1) = 3;

  SUBCASE("identical plans cost nothing") {
    CHECK(adjustment_cost(prev, prev, topo, p) == 0.0);
  }
  SUBCASE("pure decrease costs nothing") {
    auto next = prev;
    next.spectrum.at(0, 1) = 1;
    CHECK(adjustment_cost(next, prev, topo, p) == 0.0);
  }
  SUBCASE("increase on a continuously active SBS") {
    auto next = prev;
    next.spectrum.at(0, 1) = 5;
    CHECK(adjustment_cost(next, prev, topo, p) == doctest::Approx(2.0));
  }
  SUBCASE("increase on a freshly activated SBS is not an adjustment") {
    auto prev_off = PlanningDecision::zero(2, topo);
    auto next = PlanningDecision::zero(2, topo);
    next.activation = {1, 0};
    next.spectrum.at(0, 1) = 5;
    CHECK(adjustment_cost(next, prev_off, topo, p) == 0.0);
  }
  SUBCASE("cloud term is always gated on") {
    auto next = PlanningDecision::zero(2, topo);
    next.cloud = {4, 1};
    CHECK(adjustment_cost(next, PlanningDecision::zero(2, topo), topo, p) ==
          doctest::Approx(3.0));
  }
}

TEST_CASE("sla_revenue branches") {
  const auto slices = slices2();
  CostParams p;  // q_b = 5, q_p = 10

  CHECK(sla_revenue(slices[0].soft_deadline_s / 2, slices[0], p) == doctest::Approx(5.0));
  CHECK(sla_revenue(slices[0].deadline_s + 1e-9, slices[0], p) == doctest::Approx(-10.0));
  CHECK(sla_revenue(slices[0].soft_deadline_s, slices[0], p) == doctest::Approx(0.0));
  CHECK(sla_revenue(std::numeric_limits<double>::infinity(), slices[0], p) ==
        doctest::Approx(-10.0));
  // printed ramp increases toward q_b at the hard deadline
  CHECK(sla_revenue(slices[0].deadline_s, slices[0], p) == doctest::Approx(5.0));

  CostParams dec = p;
  dec.ramp = SlaRamp::Decreasing;
  CHECK(sla_revenue(slices[0].soft_deadline_s, slices[0], dec) == doctest::Approx(5.0));
  CHECK(sla_revenue(slices[0].deadline_s, slices[0], dec) == doctest::Approx(0.0));

  SUBCASE("bounded in [-q_p, q_b] under both ramps for any delay") {
    Rng rng(9);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      for (const auto* params : {&p, &dec}) {
        const double v = sla_revenue(d(rng), slices[1], *params);
        CHECK(v <= params->q_b);
        CHECK(v >= -params->q_p);
      }
    }
  }
}

TEST_CASE("window_cost composition") {
  const Topology topo = topo3();
  const auto slices = slices2();
  CostParams p;

  SUBCASE("zero plan with perfect delays earns pure revenue") {
    const auto plan = PlanningDecision::zero(2, topo);
    // h = (1,1) still carries provisioning cost, so subtract it explicitly
    const std::vector<double> delays{0.0, 0.0};
    const auto cb = window_cost(plan, plan, delays, slices, topo, p);
    CHECK(cb.deployment == 0.0);
    CHECK(cb.adjustment == 0.0);
    CHECK(cb.sla_revenue == doctest::Approx(2 * p.q_b));
    CHECK(cb.total == doctest::Approx(cb.provisioning - 2 * p.q_b));
  }

  SUBCASE("total identity holds exactly and components compose") {
    Rng rng(12);
    std::uniform_real_distribution<double> d(0.0, 0.4);
    for (int trial = 0; trial < 300; ++trial) {
      const auto prev = random_plan(topo, 2, rng);
      const auto plan = random_plan(topo, 2, rng);
      const std::vector<double> delays{d(rng), d(rng)};
      const auto cb = window_cost(plan, prev, delays, slices, topo, p);
      CHECK(cb.total == ((cb.deployment + cb.provisioning) + cb.adjustment) - cb.sla_revenue);
      CHECK(cb.deployment == deployment_cost(plan, topo, p));
      CHECK(cb.provisioning == provisioning_cost(plan, topo, p));
      CHECK(cb.adjustment == adjustment_cost(plan, prev, topo, p));
      // spreadsheet-style recomputation of the revenue
      double rev = 0.0;
      for (int k = 0; k < 2; ++k) rev += sla_revenue(delays[k], slices[k], p);
      CHECK(cb.sla_revenue == rev);
      CHECK(cb.adjustment >= 0.0);
      CHECK(adjustment_cost(plan, plan, topo, p) == 0.0);
    }
  }

  SUBCASE("adjustment is monotone in each resource increase") {
    Rng rng(13);
    CostParams p1;
    for (int trial = 0; trial < 100; ++trial) {
      auto prev = random_plan(topo, 2, rng);
      auto next = random_plan(topo, 2, rng);
      const double base = adjustment_cost(next, prev, topo, p1);
      auto bumped = next;
      // bump a resource on an active station in both windows, if any
      for (int m = 0; m < topo.num_stations(); ++m) {
        if (next.station_active(topo, m) && prev.station_active(topo, m)) {
          int total = 0;
          for (int k = 0; k < 2; ++k) total += bumped.spectrum.at(k, m);
          if (total < topo.stations[m].subcarrier_capacity) {
            bumped.spectrum.at(0, m) += 1;
            CHECK(adjustment_cost(bumped, prev, topo, p1) >= base);
          }
          break;
        }
      }
    }
  }
}
