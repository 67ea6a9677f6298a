#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "spreadnet/epidemic.hpp"
#include "spreadnet/errors.hpp"
#include "spreadnet/mission.hpp"
#include "spreadnet/optimizer.hpp"
#include "spreadnet/rng.hpp"

using namespace spreadnet;

namespace {

constexpr double kPi = std::numbers::pi;

MissionSpec two_layer_mission() {
  MissionSpec ms;
  ms.name = "test";
  ms.layers = {LayerSpec::bounded(0.5, 20.0, 0.05, 0.6),
               LayerSpec::bounded(1.0, 30.0, 0.02, 0.5)};
  ms.weights = {0.7, 0.3};
  ms.power_price = 20.0;
  ms.path_loss_exponent = 4.0;
  ms.thresholds.intra = {0.0, 0.0};
  ms.thresholds.inter = {{0.0, 0.0}, {0.0, 0.0}};
  ms.thresholds.global = 0.0;
  return ms;
}

MissionSpec one_layer_mission(double lam_lo, double lam_hi, double r_lo, double r_hi) {
  MissionSpec ms;
  ms.name = "single";
  ms.layers = {LayerSpec::bounded(lam_lo, lam_hi, r_lo, r_hi)};
  ms.weights = {1.0};
  ms.power_price = 10.0;
  ms.path_loss_exponent = 4.0;
  ms.thresholds.intra = {0.0};
  ms.thresholds.inter = {{0.0}};
  ms.thresholds.global = 0.0;
  return ms;
}

}  // namespace

TEST_CASE("cost formula with the area factored out") {
  MissionSpec ms = two_layer_mission();
  ms.weights = {0.8, 0.2};
  ms.power_price = 40.0;
  ms.path_loss_exponent = 4.0;

  const NetworkDesign d{{5.0, 20.0}, {0.5, 0.1}};
  CHECK(design_cost(d, ms) == doctest::Approx(20.58).epsilon(1e-12));

  const NetworkDesign zero{{0.0, 0.0}, {0.5, 0.1}};
  CHECK(design_cost(zero, ms) == 0.0);

  ms.power_price = 0.0;
  const NetworkDesign other_r{{5.0, 20.0}, {0.05, 0.4}};
  CHECK(design_cost(d, ms) == doctest::Approx(design_cost(other_r, ms)).epsilon(1e-12));
}

TEST_CASE("surrogate constraints activate only for positive thresholds") {
  MissionSpec ms = two_layer_mission();
  CHECK(surrogate_constraints(ms).empty());

  ms.thresholds.intra[1] = 0.7;
  ms.gamma = 0.9;
  const auto active = surrogate_constraints(ms);
  REQUIRE(active.size() == 1);
  CHECK(active[0].label() == "intra:2");
  CHECK(active[0].rhs == doctest::Approx(1.0 / (0.9 * 0.3)).epsilon(1e-12));
  CHECK(active[0].rhs == doctest::Approx(3.7037).epsilon(1e-4));
}

TEST_CASE("alpha 0 with active thresholds is infeasible by threat") {
  MissionSpec ms = two_layer_mission();
  ms.thresholds.global = 0.5;
  ms.delta = 1.0;
  CHECK_THROWS_AS(surrogate_constraints(ms), InfeasibleError);
}

TEST_CASE("residual sits at zero on the constraint boundary") {
  MissionSpec ms = two_layer_mission();
  ms.thresholds.intra[0] = 0.5;
  const double rhs = 1.0 / (1.0 * 0.5);
  const double r1 = 0.3;
  const NetworkDesign d{{rhs / (kPi * r1 * r1), 1.0}, {r1, 0.1}};
  const auto residuals = surrogate_residuals(d, ms);
  REQUIRE(residuals.size() == 1);
  CHECK(residuals[0].residual == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("density block: no active constraints returns the lower bounds") {
  MissionSpec ms = two_layer_mission();
  const auto lambda = solve_density_block({0.3, 0.2}, ms);
  CHECK(lambda[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lambda[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("density block: single binding constraint has a closed form") {
  MissionSpec ms = one_layer_mission(0.5, 30.0, 0.05, 0.6);
  ms.thresholds.intra[0] = 0.6;
  ms.delta = 0.2;  // alpha 0.8
  const double r = 0.25;
  const auto lambda = solve_density_block({r}, ms);
  const double expected = 1.0 / (0.8 * 0.4) / (kPi * r * r);
  CHECK(lambda[0] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("density block: infeasible ranges carry a certificate") {
  MissionSpec ms = one_layer_mission(0.5, 2.0, 0.05, 0.6);
  ms.thresholds.intra[0] = 0.9;
  try {
    solve_density_block({0.05}, ms);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& err) {
    REQUIRE(err.violated.size() == 1);
    CHECK(err.violated[0] == "intra:1");
  }
}

TEST_CASE("range block: no active constraints returns the lower bounds") {
  MissionSpec ms = two_layer_mission();
  const auto r = solve_range_block({5.0, 5.0}, ms);
  CHECK(r[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("range block: single layer inverts the intra constraint") {
  MissionSpec ms = one_layer_mission(1.0, 40.0, 0.01, 1.0);
  ms.thresholds.intra[0] = 0.7;
  ms.delta = 0.5;  // alpha 0.5
  const auto r = solve_range_block({25.0}, ms);
  const double expected = std::sqrt(1.0 / (0.5 * 0.3) / (25.0 * kPi));
  CHECK(r[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("range block: global lift matches a dense grid search") {
  rng::CounterRng gen(555);
  for (int instance = 0; instance < 6; ++instance) {
    MissionSpec ms = two_layer_mission();
    ms.power_price = 5.0 + 30.0 * gen.uniform();
    ms.path_loss_exponent = instance % 2 == 0 ? 4.0 : 2.0;
    ms.thresholds.intra = {0.2 + 0.3 * gen.uniform(), 0.0};
    ms.thresholds.global = 0.5 + 0.3 * gen.uniform();
    const std::vector<double> lambda = {2.0 + 10.0 * gen.uniform(), 3.0 + 15.0 * gen.uniform()};

    std::vector<double> r;
    try {
      r = solve_range_block(lambda, ms);
    } catch (const InfeasibleError&) {
      continue;  // the draw asked more than the boxes allow
    }
    const NetworkDesign d{lambda, r};
    for (const auto& res : surrogate_residuals(d, ms)) CHECK(res.residual >= -1e-6);
    const double cost = design_cost(d, ms);

    // brute force over s = r^2 on a 400x400 grid
    const auto& l0 = ms.layers[0];
    const auto& l1 = ms.layers[1];
    double best = 1e300;
    const int steps = 400;
    for (int i = 0; i <= steps; ++i) {
      const double s0 = l0.range_min_km * l0.range_min_km +
                        (l0.range_max_km * l0.range_max_km - l0.range_min_km * l0.range_min_km) *
                            i / steps;
      for (int j = 0; j <= steps; ++j) {
        const double s1 = l1.range_min_km * l1.range_min_km +
                          (l1.range_max_km * l1.range_max_km - l1.range_min_km * l1.range_min_km) *
                              j / steps;
        const NetworkDesign cand{lambda, {std::sqrt(s0), std::sqrt(s1)}};
        bool ok = true;
        for (const auto& res : surrogate_residuals(cand, ms)) ok = ok && res.residual >= -1e-9;
        if (ok) best = std::min(best, design_cost(cand, ms));
      }
    }
    REQUIRE(best < 1e300);
    CHECK(cost <= best * (1.0 + 1e-3));
  }
}

TEST_CASE("optimize with zero thresholds lands on the box minimum") {
  MissionSpec ms = two_layer_mission();
  const auto res = optimize(ms);
  REQUIRE(res.feasible);
  CHECK(res.design.density[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.design.density[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.design.range_km[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(res.design.range_km[1] == doctest::Approx(0.02).epsilon(1e-12));
  const NetworkDesign floor{{0.5, 1.0}, {0.05, 0.02}};
  CHECK(res.cost == doctest::Approx(design_cost(floor, ms)).epsilon(1e-12));
}

TEST_CASE("intelligence mission favours commander reach and follower mass") {
  MissionSpec ms = preset_intelligence();
  ms.delta = 0.2;
  const auto res = optimize(ms);
  REQUIRE(res.feasible);
  CHECK(res.design.range_km[0] > res.design.range_km[1]);
  CHECK(res.design.density[1] > res.design.density[0]);
  for (const auto& r : res.residuals) CHECK(r.residual >= -1e-6);
  for (std::size_t i = 1; i < res.cost_trace.size(); ++i)
    CHECK(res.cost_trace[i] <= res.cost_trace[i - 1] + 1e-9);
}

TEST_CASE("encounter mission keeps the commander density pinned") {
  MissionSpec ms = preset_encounter();
  ms.delta = 0.3;
  const auto res = optimize(ms);
  REQUIRE(res.feasible);
  CHECK(res.design.density[0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("converged designs are single-coordinate stationary") {
  for (MissionSpec ms : {preset_intelligence(), preset_encounter()}) {
    ms.delta = 0.4;
    const auto res = optimize(ms);
    REQUIRE(res.feasible);
    const double cost = res.cost;

    for (int i = 0; i < ms.layer_count(); ++i) {
      for (double scale : {0.99, 1.01}) {
        for (int which : {0, 1}) {
          NetworkDesign probe = res.design;
          auto& v = which == 0 ? probe.density[i] : probe.range_km[i];
          v *= scale;
          const auto& layer = ms.layers[i];
          const double lo = which == 0 ? layer.density_min : layer.range_min_km;
          const double hi = which == 0 ? layer.density_max : layer.range_max_km;
          if (v < lo || v > hi) continue;
          bool feasible = true;
          for (const auto& r : surrogate_residuals(probe, ms))
            feasible = feasible && r.residual >= -1e-9;
          if (!feasible) continue;
          CHECK(design_cost(probe, ms) >= cost * (1.0 - 1e-6));
        }
      }
    }
  }
}

TEST_CASE("ACS matches a dense grid oracle on a two-layer instance") {
  MissionSpec ms = two_layer_mission();
  ms.thresholds.intra = {0.0, 0.55};
  ms.thresholds.inter = {{0.0, 0.6}, {0.0, 0.0}};
  ms.thresholds.global = 0.5;
  ms.delta = 0.25;

  const auto res = optimize(ms);
  REQUIRE(res.feasible);

  // 200 grid points per axis; the cheapest feasible lambda_2 follows in
  // closed form, which makes the scan exact over the 4-D grid.
  const auto constraints = surrogate_constraints(ms);
  const int steps = 200;
  double best = 1e300;
  const auto& l0 = ms.layers[0];
  const auto& l1 = ms.layers[1];
  for (int ir0 = 0; ir0 < steps; ++ir0) {
    const double r0 = l0.range_min_km + (l0.range_max_km - l0.range_min_km) * ir0 / (steps - 1);
    for (int ir1 = 0; ir1 < steps; ++ir1) {
      const double r1 = l1.range_min_km + (l1.range_max_km - l1.range_min_km) * ir1 / (steps - 1);
      for (int il0 = 0; il0 < steps; ++il0) {
        const double lam0 =
            l0.density_min + (l0.density_max - l0.density_min) * il0 / (steps - 1);
        double lam1_need = l1.density_min;
        for (const auto& c : constraints) {
          switch (c.kind) {
            case ConstraintSpec::Kind::Intra:
              if (c.m == 1 && lam0 * kPi * r0 * r0 < c.rhs - 1e-12) lam1_need = 1e300;
              if (c.m == 2) lam1_need = std::max(lam1_need, c.rhs / (kPi * r1 * r1));
              break;
            case ConstraintSpec::Kind::Inter: {
              const double rr = c.m == 1 ? r0 : r1;
              lam1_need = std::max(lam1_need, c.rhs / (kPi * rr * rr) - lam0);
              break;
            }
            case ConstraintSpec::Kind::Global:
              lam1_need =
                  std::max(lam1_need, (c.rhs - lam0 * kPi * r0 * r0) / (kPi * r1 * r1));
              break;
          }
        }
        if (lam1_need > l1.density_max + 1e-12) continue;
        // snap up to the grid so the point is a true 4-D grid point
        const double step1 = (l1.density_max - l1.density_min) / (steps - 1);
        const double snapped =
            l1.density_min +
            std::ceil(std::max(0.0, lam1_need - l1.density_min) / step1 - 1e-12) * step1;
        const NetworkDesign cand{{lam0, std::min(snapped, l1.density_max)}, {r0, r1}};
        best = std::min(best, design_cost(cand, ms));
      }
    }
  }
  REQUIRE(best < 1e300);
  CHECK(std::fabs(res.cost - best) <= 0.01 * best);
}

TEST_CASE("ACS matches a dense grid oracle on single-layer instances") {
  rng::CounterRng gen(8080);
  for (int instance = 0; instance < 5; ++instance) {
    MissionSpec ms = one_layer_mission(0.5 + gen.uniform(), 20.0 + 10.0 * gen.uniform(),
                                       0.05, 0.5 + 0.1 * gen.uniform());
    ms.power_price = 5.0 + 30.0 * gen.uniform();
    ms.thresholds.intra[0] = 0.3 + 0.4 * gen.uniform();
    ms.delta = 0.3 * gen.uniform();

    const auto res = optimize(ms);
    if (!res.feasible) continue;  // box too small for the draw

    const auto constraints = surrogate_constraints(ms);
    const int steps = 200;
    const auto& layer = ms.layers[0];
    const double lam_step = (layer.density_max - layer.density_min) / (steps - 1);
    double best = 1e300;
    for (int ir = 0; ir < steps; ++ir) {
      const double r =
          layer.range_min_km + (layer.range_max_km - layer.range_min_km) * ir / (steps - 1);
      double need = layer.density_min;
      for (const auto& c : constraints) need = std::max(need, c.rhs / (kPi * r * r));
      if (need > layer.density_max + 1e-12) continue;
      const double snapped =
          layer.density_min +
          std::ceil(std::max(0.0, need - layer.density_min) / lam_step - 1e-12) * lam_step;
      const NetworkDesign cand{{std::min(snapped, layer.density_max)}, {r}};
      best = std::min(best, design_cost(cand, ms));
    }
    REQUIRE(best < 1e300);
    CHECK(std::fabs(res.cost - best) <= 0.01 * best);
  }
}

TEST_CASE("verify_original reports pass and fail per strand") {
  MissionSpec ms = two_layer_mission();

  SUBCASE("all-zero thresholds pass everywhere") {
    const NetworkDesign d{{1.0, 1.0}, {0.05, 0.05}};
    for (const auto& row : verify_original(d, ms, ms.thresholds)) CHECK(row.pass);
  }

  SUBCASE("a subcritical strand fails its positive threshold") {
    ThresholdSet original = ms.thresholds;
    original.intra[0] = 0.5;
    ms.delta = 0.5;  // alpha 0.5, far below alpha_c ~ 0.99 of this strand
    const NetworkDesign d{{1.0, 1.0}, {0.05, 0.05}};  // E[K] ~ 0.008, hopeless
    const auto rows = verify_original(d, ms, original);
    REQUIRE(rows[0].strand == StrandId::intra(1));
    CHECK_FALSE(rows[0].pass);
    CHECK(rows[0].avg_informed == 0.0);
  }

  SUBCASE("a well-connected strand passes a modest threshold") {
    ThresholdSet original = ms.thresholds;
    original.intra[0] = 0.5;
    const NetworkDesign d{{15.0, 1.0}, {0.5, 0.05}};  // E[K] ~ 11.8
    const auto rows = verify_original(d, ms, original);
    CHECK(rows[0].pass);
    CHECK(rows[0].avg_informed > 0.5);
  }
}

TEST_CASE("full pipeline: optimize then verify the intelligence mission") {
  MissionSpec ms = preset_intelligence();
  ms.delta = 0.2;
  const auto res = optimize(ms);
  REQUIRE(res.feasible);
  const auto rows = verify_original(res.design, ms, ms.thresholds);
  REQUIRE(rows.size() == 5);  // intra x2, inter x2, combined
  for (const auto& row : rows) {
    CHECK(row.theta >= 0.0);
    CHECK(row.theta <= 1.0);
    if (row.threshold == 0.0) CHECK(row.pass);
  }
  // the surrogate guarantees theta >= T' on every active strand (Eq. 18
  // algebra), checked through the exact solver
  for (const auto& r : res.residuals) {
    const double t = r.constraint.threshold;
    const PoissonMixture model = strand_model(
        res.design.density, res.design.range_km,
        r.constraint.kind == ConstraintSpec::Kind::Intra ? StrandId::intra(r.constraint.m)
        : r.constraint.kind == ConstraintSpec::Kind::Inter
            ? StrandId::inter(r.constraint.m, r.constraint.n)
            : StrandId::combined());
    const double lb = 1.0 - 1.0 / (ms.alpha() * model.mean());
    CHECK(lb >= t - 1e-9);
    CHECK(solve_theta_exact(model, ms.alpha()).theta >= lb - 1e-12);
  }
}

TEST_CASE("sweep emits one row per threat level and keeps going on failures") {
  MissionSpec ms = preset_intelligence();
  const auto rows = sweep_threat(ms, {0.0, 0.3, 0.6}, 1);
  REQUIRE(rows.size() == 3);
  double prev = -1.0;
  for (const auto& row : rows) {
    REQUIRE(row.result.feasible);
    CHECK(row.result.cost >= prev - 1e-9);
    prev = row.result.cost;
  }

  // an unreachable mission: tiny boxes against a high threshold
  MissionSpec hard = two_layer_mission();
  hard.layers = {LayerSpec::bounded(0.5, 1.0, 0.02, 0.05),
                 LayerSpec::bounded(0.5, 1.0, 0.02, 0.05)};
  hard.thresholds.global = 0.9;
  const auto hard_rows = sweep_threat(hard, {0.0, 0.5}, 1);
  REQUIRE(hard_rows.size() == 2);
  for (const auto& row : hard_rows) {
    CHECK_FALSE(row.result.feasible);
    CHECK_FALSE(row.result.start_failures.empty());
  }
}

TEST_CASE("sweep rejects threat levels outside [0, 1)") {
  MissionSpec ms = two_layer_mission();
  CHECK_THROWS_AS(sweep_threat(ms, {0.5, 1.0}, 1), std::invalid_argument);
}

TEST_CASE("zero-threshold sweep is constant at the minimal design") {
  MissionSpec ms = two_layer_mission();
  const auto rows = sweep_threat(ms, {0.0}, 1);
  REQUIRE(rows.size() == 1);
  const NetworkDesign floor{{0.5, 1.0}, {0.05, 0.02}};
  CHECK(rows[0].result.cost == doctest::Approx(design_cost(floor, ms)).epsilon(1e-12));
}

TEST_CASE("mission invariants are enforced") {
  MissionSpec ms = two_layer_mission();
  ms.weights = {0.5, 0.6};
  CHECK_THROWS_AS(ms.validate(), std::invalid_argument);
  ms = two_layer_mission();
  ms.thresholds.global = 1.0;
  CHECK_THROWS_AS(ms.validate(), std::invalid_argument);
  ms = two_layer_mission();
  ms.thresholds.inter[0][0] = 0.2;
  CHECK_THROWS_AS(ms.validate(), std::invalid_argument);
  ms = two_layer_mission();
  ms.path_loss_exponent = 1.5;
  CHECK_THROWS_AS(ms.validate(), std::invalid_argument);
}
