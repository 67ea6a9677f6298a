#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spreadnet/degree_model.hpp"
#include "spreadnet/strand.hpp"

namespace spreadnet {

// Spreading thresholds per strand.  `inter[m][n]` (0-based) is the
// threshold of strand (m+1, n+1); the diagonal must stay 0.
struct ThresholdSet {
  std::vector<double> intra;
  std::vector<std::vector<double>> inter;
  double global = 0.0;
};

struct MissionSpec {
  std::string name;
  std::vector<LayerSpec> layers;  // box bounds per device type
  ThresholdSet thresholds;        // surrogate thresholds T'
  std::vector<double> weights;    // relative deployment cost, sums to 1
  double power_price = 0.0;       // p
  double path_loss_exponent = 4.0;
  double area_km2 = 1.0;          // reporting only; factored out of the cost
  double gamma = 1.0;
  double delta = 0.0;

  int layer_count() const { return static_cast<int>(layers.size()); }
  double alpha() const;
  void validate() const;
};

// The decision vector: per-layer density (km^-2) and range (km).
struct NetworkDesign {
  std::vector<double> density;
  std::vector<double> range_km;
};

// Deployment plus power cost with the battlefield area factored out:
// sum_m lambda_m (w_m + p r_m^eta), r in km.
double design_cost(const NetworkDesign& design, const MissionSpec& mission);

// One surrogate constraint: required mean strand degree
// rhs = 1 / (alpha (1 - T')).  Thresholds of exactly 0 impose nothing and
// produce no constraint.
struct ConstraintSpec {
  enum class Kind { Intra, Inter, Global };

  Kind kind = Kind::Global;
  int m = 0;  // 1-based; unused for Global
  int n = 0;  // inter only
  double threshold = 0.0;
  double rhs = 0.0;

  double lhs(const NetworkDesign& design) const;  // mean strand degree
  std::string label() const;
};

// Active constraints of the mission.  Throws InfeasibleError if alpha == 0
// while some threshold is positive (no spreading survives the threat).
std::vector<ConstraintSpec> surrogate_constraints(const MissionSpec& mission);

struct Residual {
  ConstraintSpec constraint;
  double lhs = 0.0;
  double residual = 0.0;  // lhs - rhs; feasible when >= 0
};

std::vector<Residual> surrogate_residuals(const NetworkDesign& design,
                                          const MissionSpec& mission);

// Exact minimiser over densities with ranges fixed: a linear program solved
// by the in-repo dense simplex.  Throws InfeasibleError naming the
// constraints that stay violated even at the density upper bounds.
std::vector<double> solve_density_block(const std::vector<double>& ranges_km,
                                        const MissionSpec& mission);

// Exact minimiser over ranges with densities fixed.  In s = r^2 every
// constraint is linear and the power cost is convex, so the optimum is the
// per-layer lower bounds raised, if the global constraint still binds, to a
// common water-filling level (equal marginal power cost per unit of mean
// combined degree).
std::vector<double> solve_range_block(const std::vector<double>& densities,
                                      const MissionSpec& mission);

struct StartFailure {
  NetworkDesign start;
  std::vector<std::string> violated;
};

struct OptimizationResult {
  NetworkDesign design;
  double cost = 0.0;
  bool feasible = false;
  std::vector<Residual> residuals;  // at the returned design
  int iterations = 0;
  std::vector<double> cost_trace;  // per ACS iteration, non-increasing
  std::vector<StartFailure> start_failures;
  int start_index = -1;  // which deterministic start won
};

// Alternate convex search over the two blocks, multi-started from the box
// corners and centre; the best feasible run is returned.  If every start is
// infeasible the result carries feasible = false and the aggregated
// failures.
OptimizationResult optimize(const MissionSpec& mission,
                            std::optional<NetworkDesign> start = std::nullopt);

// Post-hoc check of the original thresholds: per strand, solve the exact
// fixed point for the optimised design and compare the average informed
// density against T.
struct VerifyRow {
  StrandId strand;
  double threshold = 0.0;
  double theta = 0.0;
  double avg_informed = 0.0;
  bool pass = false;
};

std::vector<VerifyRow> verify_original(const NetworkDesign& design,
                                       const MissionSpec& mission,
                                       const ThresholdSet& original);

struct SweepRow {
  double delta = 0.0;
  double alpha = 0.0;
  OptimizationResult result;
};

// optimize() per threat level; rows are independent and may run on up to
// `jobs` threads.  Row order follows the input grid.
std::vector<SweepRow> sweep_threat(const MissionSpec& mission,
                                   const std::vector<double>& deltas,
                                   int jobs = 1);

}  // namespace spreadnet
