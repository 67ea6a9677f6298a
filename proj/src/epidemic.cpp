#include "spreadnet/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spreadnet/errors.hpp"

namespace spreadnet {

namespace {

// Values of alpha within this distance of alpha_c are treated as
// subcritical: the positive branch vanishes continuously there and the
// iteration count diverges at the bifurcation.
constexpr double kThresholdSlack = 1e-8;

void check_alpha(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
}

}  // namespace

double effective_rate(double gamma, double delta) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(delta >= 0.0) || !(delta <= 1.0))
    throw std::invalid_argument("delta must lie in [0, 1]");
  return gamma * (1.0 - delta);
}

void ThreatParams::validate() const { (void)effective_rate(gamma, delta); }

DegreeSpectrum DegreeSpectrum::of(const PoissonMixture& model) {
  return DegreeSpectrum{model.pmf_table(), model.mean(), model.second_moment()};
}

double epidemic_threshold(const DegreeSpectrum& spectrum) {
  if (!(spectrum.mean > 0.0))
    throw std::invalid_argument("epidemic threshold undefined for E[K] = 0");
  return spectrum.mean / spectrum.second_moment;
}

double epidemic_threshold(const PoissonMixture& model) {
  return epidemic_threshold(DegreeSpectrum::of(model));
}

double theta_map(const DegreeSpectrum& spectrum, double alpha, double theta) {
  check_alpha(alpha);
  if (!(theta >= 0.0) || !(theta <= 1.0))
    throw std::invalid_argument("theta must lie in [0, 1]");
  if (spectrum.mean <= 0.0) return 0.0;

  double acc = 0.0;
  for (std::size_t k = 1; k < spectrum.pmf.size(); ++k) {
    const double akt = alpha * static_cast<double>(k) * theta;
    acc += static_cast<double>(k) * spectrum.pmf[k] * akt / (1.0 + akt);
  }
  return acc / spectrum.mean;
}

EquilibriumResult solve_theta_exact(const DegreeSpectrum& spectrum, double alpha,
                                    const FixedPointOptions& options,
                                    const StrandId& strand) {
  check_alpha(alpha);
  if (!(options.theta0 > 0.0) || !(options.theta0 <= 1.0))
    throw std::invalid_argument("theta0 must lie in (0, 1]");

  EquilibriumResult res;
  res.strand = strand;
  res.alpha = alpha;
  res.informed_by_degree.assign(spectrum.pmf.size(), 0.0);

  const bool subcritical =
      spectrum.mean <= 0.0 ||
      alpha <= epidemic_threshold(spectrum) + kThresholdSlack;
  if (subcritical) {
    res.converged = true;
    return res;  // theta = 0, all densities 0
  }

  double theta = options.theta0;
  for (long it = 1; it <= options.max_iter; ++it) {
    const double next = theta_map(spectrum, alpha, theta);
    const bool done = std::fabs(next - theta) < options.tol;
    theta = next;
    if (done) {
      res.theta = theta;
      res.converged = true;
      res.iterations = it;
      for (std::size_t k = 0; k < spectrum.pmf.size(); ++k) {
        res.informed_by_degree[k] =
            stationary_informed(alpha, theta, static_cast<double>(k));
        res.average_informed += res.informed_by_degree[k] * spectrum.pmf[k];
      }
      return res;
    }
  }
  throw ConvergenceError("fixed-point iteration did not converge", theta,
                         options.max_iter);
}

EquilibriumResult solve_theta_exact(const PoissonMixture& model, double alpha,
                                    const FixedPointOptions& options) {
  return solve_theta_exact(DegreeSpectrum::of(model), alpha, options, model.strand());
}

double theta_map(const PoissonMixture& model, double alpha, double theta) {
  return theta_map(DegreeSpectrum::of(model), alpha, theta);
}

double theta_approx(const DegreeSpectrum& spectrum, double alpha) {
  check_alpha(alpha);
  if (spectrum.mean <= 0.0 || alpha * spectrum.mean <= 1.0) return 0.0;
  return 1.0 - 1.0 / (alpha * spectrum.mean);
}

double theta_approx(const PoissonMixture& model, double alpha) {
  if (!(model.mean() > 0.0) || alpha * model.mean() <= 1.0) {
    check_alpha(alpha);
    return 0.0;
  }
  return 1.0 - 1.0 / (alpha * model.mean());
}

double stationary_informed(double alpha, double theta, double k) {
  if (!(theta >= 0.0) || !(theta <= 1.0))
    throw std::invalid_argument("theta must lie in [0, 1]");
  if (!(k >= 0.0)) throw std::invalid_argument("degree must be >= 0");
  const double akt = alpha * k * theta;
  return akt / (1.0 + akt);
}

double average_informed(const DegreeSpectrum& spectrum, double alpha, double theta) {
  double acc = 0.0;
  for (std::size_t k = 0; k < spectrum.pmf.size(); ++k)
    acc += spectrum.pmf[k] * stationary_informed(alpha, theta, static_cast<double>(k));
  return acc;
}

double average_informed(const PoissonMixture& model, double alpha, double theta) {
  return average_informed(DegreeSpectrum::of(model), alpha, theta);
}

namespace {

struct Rk4Workspace {
  std::vector<double> k1, k2, k3, k4, tmp;

  explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

double derivative(const DegreeSpectrum& s, double alpha,
                  const std::vector<double>& informed, std::vector<double>& out) {
  double theta = 0.0;
  if (s.mean > 0.0) {
    for (std::size_t k = 1; k < s.pmf.size(); ++k)
      theta += static_cast<double>(k) * s.pmf[k] * informed[k];
    theta /= s.mean;
  }
  for (std::size_t k = 0; k < informed.size(); ++k)
    out[k] = -informed[k] +
             alpha * static_cast<double>(k) * (1.0 - informed[k]) * theta;
  return theta;
}

void rk4_step(const DegreeSpectrum& s, double alpha, std::vector<double>& informed,
              double h, Rk4Workspace& w) {
  const std::size_t n = informed.size();
  derivative(s, alpha, informed, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = informed[i] + 0.5 * h * w.k1[i];
  derivative(s, alpha, w.tmp, w.k2);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = informed[i] + 0.5 * h * w.k2[i];
  derivative(s, alpha, w.tmp, w.k3);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = informed[i] + h * w.k3[i];
  derivative(s, alpha, w.tmp, w.k4);
  for (std::size_t i = 0; i < n; ++i)
    informed[i] += h / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
}

void check_bounds(const std::vector<double>& informed, double step) {
  for (double v : informed) {
    if (v < -1e-6 || v > 1.0 + 1e-6)
      throw std::invalid_argument(
          "integration step " + std::to_string(step) +
          " too large: a density left [0, 1]; reduce the step size");
  }
}

std::vector<double> expand_initial(const DegreeSpectrum& s,
                                   const std::vector<double>& i0) {
  if (i0.size() != s.pmf.size())
    throw std::invalid_argument("initial densities must cover k = 0..k_max");
  for (double v : i0)
    if (!(v >= 0.0) || !(v <= 1.0))
      throw std::invalid_argument("initial densities must lie in [0, 1]");
  return i0;
}

}  // namespace

std::vector<DynamicsState> integrate_dynamics(const DegreeSpectrum& spectrum,
                                              double alpha,
                                              const std::vector<double>& i0,
                                              double t_end, double step,
                                              double record_dt) {
  check_alpha(alpha);
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");

  std::vector<double> state = expand_initial(spectrum, i0);
  Rk4Workspace w(state.size());
  std::vector<double> deriv(state.size());

  std::vector<DynamicsState> trajectory;
  const auto record = [&](double t) {
    const double theta = derivative(spectrum, alpha, state, deriv);
    trajectory.push_back({t, state, theta});
  };

  record(0.0);
  const long steps = static_cast<long>(std::ceil(t_end / step - 1e-12));
  double next_record = record_dt;
  for (long i = 1; i <= steps; ++i) {
    const double t_next = std::min(t_end, i * step);
    rk4_step(spectrum, alpha, state, t_next - (i - 1) * step, w);
    check_bounds(state, step);
    if (t_next + 1e-12 >= next_record || i == steps) {
      record(t_next);
      while (next_record <= t_next + 1e-12) next_record += record_dt;
    }
  }
  return trajectory;
}

std::vector<DynamicsState> integrate_dynamics(const PoissonMixture& model,
                                              double alpha,
                                              const std::vector<double>& i0,
                                              double t_end, double step,
                                              double record_dt) {
  return integrate_dynamics(DegreeSpectrum::of(model), alpha, i0, t_end, step, record_dt);
}

DynamicsState relax_to_equilibrium(const PoissonMixture& model, double alpha,
                                   const std::vector<double>& i0, double step,
                                   double deriv_tol, double t_max) {
  return relax_to_equilibrium(DegreeSpectrum::of(model), alpha, i0, step, deriv_tol, t_max);
}

DynamicsState relax_to_equilibrium(const DegreeSpectrum& spectrum, double alpha,
                                   const std::vector<double>& i0, double step,
                                   double deriv_tol, double t_max) {
  check_alpha(alpha);
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");

  std::vector<double> state = expand_initial(spectrum, i0);
  Rk4Workspace w(state.size());
  std::vector<double> deriv(state.size());

  double t = 0.0;
  while (t < t_max) {
    const double theta = derivative(spectrum, alpha, state, deriv);
    double max_rate = 0.0;
    for (double d : deriv) max_rate = std::max(max_rate, std::fabs(d));
    if (max_rate < deriv_tol) return {t, state, theta};

    rk4_step(spectrum, alpha, state, step, w);
    check_bounds(state, step);
    t += step;
  }
  throw ConvergenceError("dynamics did not reach stationarity before t_max",
                         state.empty() ? 0.0 : state.back(),
                         static_cast<long>(t_max / step));
}

std::vector<StrandReport> evaluate_strands(const std::vector<double>& densities,
                                           const std::vector<double>& ranges_km,
                                           double alpha) {
  if (densities.size() != ranges_km.size() || densities.empty())
    throw std::invalid_argument("evaluate_strands: need one (density, range) per layer");
  const int m_layers = static_cast<int>(densities.size());

  std::vector<StrandId> strands;
  for (int m = 1; m <= m_layers; ++m) strands.push_back(StrandId::intra(m));
  for (int m = 1; m <= m_layers; ++m)
    for (int n = 1; n <= m_layers; ++n)
      if (m != n) strands.push_back(StrandId::inter(m, n));
  strands.push_back(StrandId::combined());

  std::vector<StrandReport> reports;
  reports.reserve(strands.size());
  for (const auto& strand : strands) {
    const PoissonMixture model = strand_model(densities, ranges_km, strand);
    const DegreeSpectrum spectrum = DegreeSpectrum::of(model);
    StrandReport r;
    r.strand = strand;
    r.ek = spectrum.mean;
    r.ek2 = spectrum.second_moment;
    r.alpha_c = spectrum.mean > 0.0 ? epidemic_threshold(spectrum) : 0.0;
    const EquilibriumResult eq = solve_theta_exact(spectrum, alpha, {}, strand);
    r.theta_exact = eq.theta;
    r.theta_lower_bound = theta_approx(spectrum, alpha);
    r.avg_informed = eq.average_informed;
    r.converged = eq.converged;
    r.iterations = eq.iterations;
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace spreadnet
