#include "spreadnet/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "spreadnet/epidemic.hpp"
#include "spreadnet/errors.hpp"
#include "spreadnet/lp.hpp"

namespace spreadnet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFeasSlack = 1e-9;
constexpr double kAcsRelTol = 1e-6;
constexpr int kAcsMaxIter = 200;

void check_threshold(double t, const std::string& name) {
  if (!(t >= 0.0) || !(t < 1.0))
    throw std::invalid_argument(name + ": thresholds must lie in [0, 1)");
}

}  // namespace

double MissionSpec::alpha() const { return effective_rate(gamma, delta); }

void MissionSpec::validate() const {
  const int m = layer_count();
  if (m < 1) throw std::invalid_argument("mission: at least one layer required");
  for (const auto& layer : layers) layer.validate();

  if (static_cast<int>(weights.size()) != m)
    throw std::invalid_argument("mission: one weight per layer required");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mission: weights must be >= 0");
    wsum += w;
  }
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("mission: weights must sum to 1");

  if (static_cast<int>(thresholds.intra.size()) != m)
    throw std::invalid_argument("mission: one intra threshold per layer required");
  for (double t : thresholds.intra) check_threshold(t, "mission intra");
  if (static_cast<int>(thresholds.inter.size()) != m)
    throw std::invalid_argument("mission: inter threshold matrix must be M x M");
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(thresholds.inter[i].size()) != m)
      throw std::invalid_argument("mission: inter threshold matrix must be M x M");
    for (int j = 0; j < m; ++j) {
      check_threshold(thresholds.inter[i][j], "mission inter");
      if (i == j && thresholds.inter[i][j] != 0.0)
        throw std::invalid_argument("mission: inter threshold diagonal must be 0");
    }
  }
  check_threshold(thresholds.global, "mission global");

  if (!(power_price >= 0.0)) throw std::invalid_argument("mission: power price must be >= 0");
  if (!(path_loss_exponent >= 2.0))
    throw std::invalid_argument("mission: path-loss exponent must be >= 2");
  if (!(area_km2 > 0.0)) throw std::invalid_argument("mission: area must be > 0");
  (void)effective_rate(gamma, delta);
}

double design_cost(const NetworkDesign& design, const MissionSpec& mission) {
  const int m = mission.layer_count();
  if (static_cast<int>(design.density.size()) != m ||
      static_cast<int>(design.range_km.size()) != m)
    throw std::invalid_argument("design/mission layer count mismatch");
  double cost = 0.0;
  for (int i = 0; i < m; ++i)
    cost += design.density[i] *
            (mission.weights[i] +
             mission.power_price * std::pow(design.range_km[i], mission.path_loss_exponent));
  return cost;
}

double ConstraintSpec::lhs(const NetworkDesign& design) const {
  switch (kind) {
    case Kind::Intra:
      return design.density[m - 1] * kPi * design.range_km[m - 1] * design.range_km[m - 1];
    case Kind::Inter:
      return (design.density[m - 1] + design.density[n - 1]) * kPi *
             design.range_km[m - 1] * design.range_km[m - 1];
    case Kind::Global: {
      double acc = 0.0;
      for (std::size_t i = 0; i < design.density.size(); ++i)
        acc += design.density[i] * kPi * design.range_km[i] * design.range_km[i];
      return acc;
    }
  }
  throw std::logic_error("unknown constraint kind");
}

std::string ConstraintSpec::label() const {
  switch (kind) {
    case Kind::Intra:
      return "intra:" + std::to_string(m);
    case Kind::Inter:
      return "inter:" + std::to_string(m) + "," + std::to_string(n);
    case Kind::Global:
      return "global";
  }
  return "?";
}

std::vector<ConstraintSpec> surrogate_constraints(const MissionSpec& mission) {
  mission.validate();
  const double alpha = mission.alpha();
  const int m = mission.layer_count();

  std::vector<ConstraintSpec> active;
  std::vector<std::string> blocked;
  const auto add = [&](ConstraintSpec::Kind kind, int i, int j, double t) {
    if (t <= 0.0) return;  // T' = 0 imposes nothing
    ConstraintSpec c;
    c.kind = kind;
    c.m = i;
    c.n = j;
    c.threshold = t;
    if (alpha <= 0.0) {
      blocked.push_back(c.label());
      return;
    }
    c.rhs = 1.0 / (alpha * (1.0 - t));
    active.push_back(c);
  };

  for (int i = 1; i <= m; ++i) add(ConstraintSpec::Kind::Intra, i, 0, mission.thresholds.intra[i - 1]);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      if (i != j) add(ConstraintSpec::Kind::Inter, i, j, mission.thresholds.inter[i - 1][j - 1]);
  add(ConstraintSpec::Kind::Global, 0, 0, mission.thresholds.global);

  if (!blocked.empty())
    throw InfeasibleError("threat level leaves no spreading capacity (alpha = 0)", blocked);
  return active;
}

std::vector<Residual> surrogate_residuals(const NetworkDesign& design,
                                          const MissionSpec& mission) {
  if (static_cast<int>(design.density.size()) != mission.layer_count() ||
      static_cast<int>(design.range_km.size()) != mission.layer_count())
    throw std::invalid_argument("design/mission layer count mismatch");
  std::vector<Residual> out;
  for (const auto& c : surrogate_constraints(mission)) {
    const double lhs = c.lhs(design);
    out.push_back({c, lhs, lhs - c.rhs});
  }
  return out;
}

namespace {

// Constraint row in lambda-space for fixed ranges: coef . lambda >= rhs.
std::vector<double> lambda_coefficients(const ConstraintSpec& c,
                                        const std::vector<double>& ranges_km,
                                        int m_layers) {
  std::vector<double> coef(m_layers, 0.0);
  switch (c.kind) {
    case ConstraintSpec::Kind::Intra:
      coef[c.m - 1] = kPi * ranges_km[c.m - 1] * ranges_km[c.m - 1];
      break;
    case ConstraintSpec::Kind::Inter:
      coef[c.m - 1] += kPi * ranges_km[c.m - 1] * ranges_km[c.m - 1];
      coef[c.n - 1] += kPi * ranges_km[c.m - 1] * ranges_km[c.m - 1];
      break;
    case ConstraintSpec::Kind::Global:
      for (int i = 0; i < m_layers; ++i) coef[i] = kPi * ranges_km[i] * ranges_km[i];
      break;
  }
  return coef;
}

}  // namespace

std::vector<double> solve_density_block(const std::vector<double>& ranges_km,
                                        const MissionSpec& mission) {
  const int m_layers = mission.layer_count();
  if (static_cast<int>(ranges_km.size()) != m_layers)
    throw std::invalid_argument("solve_density_block: one range per layer required");

  const auto constraints = surrogate_constraints(mission);

  std::vector<double> lo(m_layers), hi(m_layers);
  for (int i = 0; i < m_layers; ++i) {
    lo[i] = mission.layers[i].density_min;
    hi[i] = mission.layers[i].density_max;
  }

  // Every lhs is nondecreasing in lambda, so feasibility is decided at the
  // upper density bounds; anything violated there is a certificate.
  std::vector<std::string> violated;
  for (const auto& c : constraints) {
    const auto coef = lambda_coefficients(c, ranges_km, m_layers);
    double best = 0.0;
    for (int i = 0; i < m_layers; ++i) best += coef[i] * hi[i];
    if (best < c.rhs - kFeasSlack) violated.push_back(c.label());
  }
  if (!violated.empty())
    throw InfeasibleError("density block infeasible at the given ranges", violated);

  // LP over x = lambda - lambda_min: maximize -cost, coverage rows flipped
  // to <= form, box upper bounds as extra rows.
  lp::Matrix a;
  lp::Vector b, c_obj(m_layers);
  for (const auto& c : constraints) {
    const auto coef = lambda_coefficients(c, ranges_km, m_layers);
    double shift = c.rhs;
    for (int i = 0; i < m_layers; ++i) shift -= coef[i] * lo[i];
    std::vector<double> row(m_layers);
    for (int i = 0; i < m_layers; ++i) row[i] = -coef[i];
    a.push_back(std::move(row));
    b.push_back(-shift);
  }
  for (int i = 0; i < m_layers; ++i) {
    std::vector<double> row(m_layers, 0.0);
    row[i] = 1.0;
    a.push_back(std::move(row));
    b.push_back(hi[i] - lo[i]);
  }
  for (int i = 0; i < m_layers; ++i)
    c_obj[i] = -(mission.weights[i] +
                 mission.power_price * std::pow(ranges_km[i], mission.path_loss_exponent));

  const lp::Result sol = lp::maximize(a, b, c_obj);
  if (sol.status != lp::Result::Status::Optimal) {
    std::vector<std::string> labels;
    for (const auto& c : constraints) labels.push_back(c.label());
    throw InfeasibleError("density block LP failed", labels);
  }

  std::vector<double> lambda(m_layers);
  for (int i = 0; i < m_layers; ++i)
    lambda[i] = std::clamp(lo[i] + sol.x[i], lo[i], hi[i]);
  return lambda;
}

std::vector<double> solve_range_block(const std::vector<double>& densities,
                                      const MissionSpec& mission) {
  const int m_layers = mission.layer_count();
  if (static_cast<int>(densities.size()) != m_layers)
    throw std::invalid_argument("solve_range_block: one density per layer required");

  const auto constraints = surrogate_constraints(mission);

  // Work in s = r^2, where every constraint is linear.
  std::vector<double> s_lo(m_layers), s_hi(m_layers);
  for (int i = 0; i < m_layers; ++i) {
    s_lo[i] = mission.layers[i].range_min_km * mission.layers[i].range_min_km;
    s_hi[i] = mission.layers[i].range_max_km * mission.layers[i].range_max_km;
  }

  std::vector<double> floor_s = s_lo;  // per-layer lower bounds from Eqs. 18-19
  std::vector<std::string> violated;
  double global_rhs = 0.0;
  for (const auto& c : constraints) {
    switch (c.kind) {
      case ConstraintSpec::Kind::Intra: {
        const double denom = densities[c.m - 1] * kPi;
        if (denom <= 0.0) {
          violated.push_back(c.label());
          break;
        }
        floor_s[c.m - 1] = std::max(floor_s[c.m - 1], c.rhs / denom);
        break;
      }
      case ConstraintSpec::Kind::Inter: {
        const double denom = (densities[c.m - 1] + densities[c.n - 1]) * kPi;
        if (denom <= 0.0) {
          violated.push_back(c.label());
          break;
        }
        floor_s[c.m - 1] = std::max(floor_s[c.m - 1], c.rhs / denom);
        break;
      }
      case ConstraintSpec::Kind::Global:
        global_rhs = std::max(global_rhs, c.rhs);
        break;
    }
  }
  for (int i = 0; i < m_layers; ++i)
    if (floor_s[i] > s_hi[i] * (1.0 + 1e-12) + 1e-300) {
      for (const auto& c : constraints)
        if (c.kind != ConstraintSpec::Kind::Global && c.m - 1 == i)
          violated.push_back(c.label());
    }
  if (!violated.empty())
    throw InfeasibleError("range block infeasible at the given densities", violated);
  for (int i = 0; i < m_layers; ++i) floor_s[i] = std::min(floor_s[i], s_hi[i]);

  const auto coverage = [&](const std::vector<double>& s) {
    double acc = 0.0;
    for (int i = 0; i < m_layers; ++i) acc += densities[i] * kPi * s[i];
    return acc;
  };

  std::vector<double> s = floor_s;
  if (coverage(s) < global_rhs) {
    // The power cost p * lambda_m * s^(eta/2) has the same marginal price
    // per unit of covered degree for every layer, so the cheapest lift is a
    // common level: s_m = clamp(level, floor_m, s_hi_m) for lambda_m > 0.
    std::vector<double> probe(m_layers);
    const auto coverage_at = [&](double level) {
      for (int i = 0; i < m_layers; ++i)
        probe[i] = densities[i] > 0.0 ? std::clamp(level, floor_s[i], s_hi[i]) : floor_s[i];
      return coverage(probe);
    };

    double hi_level = 0.0;
    for (int i = 0; i < m_layers; ++i) hi_level = std::max(hi_level, s_hi[i]);
    if (coverage_at(hi_level) < global_rhs - kFeasSlack)
      throw InfeasibleError("range block infeasible at the given densities", {"global"});

    double lo_level = 0.0;
    for (int i = 0; i < m_layers; ++i) lo_level = std::min(lo_level, floor_s[i]);
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo_level + hi_level);
      if (coverage_at(mid) >= global_rhs)
        hi_level = mid;
      else
        lo_level = mid;
    }
    coverage_at(hi_level);  // hi_level always satisfies the constraint
    s = probe;
  }

  std::vector<double> r(m_layers);
  for (int i = 0; i < m_layers; ++i) r[i] = std::sqrt(s[i]);
  return r;
}

namespace {

struct AcsRun {
  bool feasible = false;
  NetworkDesign design;
  double cost = 0.0;
  int iterations = 0;
  std::vector<double> cost_trace;
  std::vector<std::string> violated;
};

AcsRun run_acs(const MissionSpec& mission, const NetworkDesign& start) {
  AcsRun run;
  run.design = start;

  try {
    double prev_cost = 0.0;
    for (int iter = 1; iter <= kAcsMaxIter; ++iter) {
      run.design.density = solve_density_block(run.design.range_km, mission);
      run.design.range_km = solve_range_block(run.design.density, mission);
      const double cost = design_cost(run.design, mission);

      if (!run.cost_trace.empty() && cost > prev_cost + 1e-9 * std::max(1.0, std::fabs(prev_cost)))
        throw std::logic_error("ACS cost increased between iterations");
      run.cost_trace.push_back(cost);
      run.iterations = iter;

      if (iter >= 2 && prev_cost - cost < kAcsRelTol * std::max(1.0, std::fabs(prev_cost))) {
        break;
      }
      prev_cost = cost;
    }
    run.cost = run.cost_trace.back();
    run.feasible = true;
  } catch (const InfeasibleError& err) {
    run.feasible = false;
    run.violated = err.violated;
  }
  return run;
}

std::vector<NetworkDesign> deterministic_starts(const MissionSpec& mission) {
  const int m = mission.layer_count();
  std::vector<double> lam_lo(m), lam_hi(m), lam_mid(m), r_lo(m), r_hi(m), r_mid(m);
  for (int i = 0; i < m; ++i) {
    lam_lo[i] = mission.layers[i].density_min;
    lam_hi[i] = mission.layers[i].density_max;
    lam_mid[i] = 0.5 * (lam_lo[i] + lam_hi[i]);
    r_lo[i] = mission.layers[i].range_min_km;
    r_hi[i] = mission.layers[i].range_max_km;
    r_mid[i] = 0.5 * (r_lo[i] + r_hi[i]);
  }
  std::vector<double> r_alt(m), r_tla(m);
  for (int i = 0; i < m; ++i) {
    r_alt[i] = i % 2 == 0 ? r_lo[i] : r_hi[i];
    r_tla[i] = i % 2 == 0 ? r_hi[i] : r_lo[i];
  }

  // Efficient radius per layer: the interior minimiser of
  // lambda (w + p r^eta) under a binding mean-degree product, i.e.
  // r^eta = 2w / ((eta - 2) p).  The alternation started anywhere else tends
  // to freeze on the first tight corner it reaches, so this start matters.
  std::vector<double> r_eff(m), r_eff_lo(m), r_eff_hi(m);
  for (int i = 0; i < m; ++i) {
    const double eta = mission.path_loss_exponent;
    double r = r_hi[i];
    if (mission.power_price > 0.0 && eta > 2.0) {
      r = std::pow(2.0 * mission.weights[i] / ((eta - 2.0) * mission.power_price), 1.0 / eta);
    }
    r_eff[i] = std::clamp(r, r_lo[i], r_hi[i]);
    r_eff_lo[i] = std::sqrt(std::max(r_eff[i] * r_lo[i], 1e-300));
    r_eff_hi[i] = std::sqrt(r_eff[i] * r_hi[i]);
  }

  // Box corners and centre, the efficient radius and its geometric blends
  // with the box edges; the density part only seeds the trace since the
  // first block solve replaces it.
  std::vector<NetworkDesign> starts = {{lam_lo, r_lo},     {lam_hi, r_hi},
                                       {lam_mid, r_mid},   {lam_lo, r_alt},
                                       {lam_hi, r_tla},    {lam_mid, r_eff},
                                       {lam_mid, r_eff_lo}, {lam_mid, r_eff_hi}};
  std::vector<NetworkDesign> unique;
  for (auto& s : starts) {
    bool seen = false;
    for (const auto& u : unique)
      if (u.range_km == s.range_km) seen = true;
    if (!seen) unique.push_back(std::move(s));
  }
  return unique;
}

}  // namespace

OptimizationResult optimize(const MissionSpec& mission, std::optional<NetworkDesign> start) {
  mission.validate();

  std::vector<NetworkDesign> starts;
  if (start) starts.push_back(*start);
  for (auto& s : deterministic_starts(mission)) starts.push_back(std::move(s));

  OptimizationResult best;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    AcsRun run = run_acs(mission, starts[i]);
    if (!run.feasible) {
      best.start_failures.push_back({starts[i], std::move(run.violated)});
      continue;
    }
    if (!best.feasible || run.cost < best.cost) {
      best.feasible = true;
      best.design = std::move(run.design);
      best.cost = run.cost;
      best.iterations = run.iterations;
      best.cost_trace = std::move(run.cost_trace);
      best.start_index = static_cast<int>(i);
    }
  }
  if (best.feasible) best.residuals = surrogate_residuals(best.design, mission);
  return best;
}

std::vector<VerifyRow> verify_original(const NetworkDesign& design,
                                       const MissionSpec& mission,
                                       const ThresholdSet& original) {
  mission.validate();
  const int m_layers = mission.layer_count();
  const double alpha = mission.alpha();
  if (static_cast<int>(design.density.size()) != m_layers ||
      static_cast<int>(design.range_km.size()) != m_layers)
    throw std::invalid_argument("design/mission layer count mismatch");
  if (static_cast<int>(original.intra.size()) != m_layers ||
      static_cast<int>(original.inter.size()) != m_layers)
    throw std::invalid_argument("verify: one original threshold per strand required");

  std::vector<std::pair<StrandId, double>> strands;
  for (int m = 1; m <= m_layers; ++m)
    strands.emplace_back(StrandId::intra(m), original.intra[m - 1]);
  for (int m = 1; m <= m_layers; ++m)
    for (int n = 1; n <= m_layers; ++n)
      if (m != n) strands.emplace_back(StrandId::inter(m, n), original.inter[m - 1][n - 1]);
  strands.emplace_back(StrandId::combined(), original.global);

  double total_density = 0.0;
  for (double d : design.density) total_density += d;

  std::vector<VerifyRow> rows;
  for (const auto& [strand, threshold] : strands) {
    VerifyRow row;
    row.strand = strand;
    row.threshold = threshold;
    if (strand.kind == StrandId::Kind::Combined && total_density <= 0.0) {
      row.theta = 0.0;
      row.avg_informed = 0.0;
    } else {
      const auto eq =
          solve_theta_exact(strand_model(design.density, design.range_km, strand), alpha);
      row.theta = eq.theta;
      row.avg_informed = eq.average_informed;
    }
    row.pass = row.avg_informed + 1e-9 >= threshold;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> sweep_threat(const MissionSpec& mission,
                                   const std::vector<double>& deltas, int jobs) {
  mission.validate();
  for (double d : deltas)
    if (!(d >= 0.0) || !(d < 1.0))
      throw std::invalid_argument("sweep: threat levels must lie in [0, 1)");
  if (jobs < 1) throw std::invalid_argument("sweep: jobs must be >= 1");

  std::vector<SweepRow> rows(deltas.size());
  std::atomic<std::size_t> cursor{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= deltas.size()) return;
      MissionSpec local = mission;
      local.delta = deltas[i];
      rows[i].delta = deltas[i];
      rows[i].alpha = local.alpha();
      try {
        rows[i].result = optimize(local);
      } catch (const InfeasibleError& err) {
        rows[i].result.feasible = false;
        rows[i].result.start_failures.push_back({{}, err.violated});
      }
    }
  };

  if (jobs == 1 || deltas.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int count = std::min<int>(jobs, static_cast<int>(deltas.size()));
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

}  // namespace spreadnet
