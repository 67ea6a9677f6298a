#pragma once

#include <vector>

#include "spreadnet/degree_model.hpp"
#include "spreadnet/strand.hpp"

namespace spreadnet {

// Effective spreading rate alpha = gamma * (1 - delta): contact rate scaled
// by the probability that a transmission survives the threat level.
double effective_rate(double gamma, double delta);

struct ThreatParams {
  double gamma = 1.0;
  double delta = 0.0;

  double alpha() const { return effective_rate(gamma, delta); }
  void validate() const;
};

// A degree distribution materialised for the mean-field equations: pmf over
// k = 0..k_max plus exact first and second moments.
struct DegreeSpectrum {
  std::vector<double> pmf;
  double mean = 0.0;
  double second_moment = 0.0;

  static DegreeSpectrum of(const PoissonMixture& model);
};

// Spreading threshold alpha_c = E[K] / E[K^2]; below it only the
// all-uninformed equilibrium exists.
double epidemic_threshold(const DegreeSpectrum& spectrum);
double epidemic_threshold(const PoissonMixture& model);

// Right side of the fixed-point system:
//   F(theta) = (1/E[K]) sum_k k P(K=k) * alpha k theta / (1 + alpha k theta).
// Monotone nondecreasing in theta with F(1) < 1.
double theta_map(const DegreeSpectrum& spectrum, double alpha, double theta);
double theta_map(const PoissonMixture& model, double alpha, double theta);

struct FixedPointOptions {
  double tol = 1e-10;
  long max_iter = 100000;
  double theta0 = 1.0;
};

struct EquilibriumResult {
  StrandId strand;
  double alpha = 0.0;
  double theta = 0.0;
  std::vector<double> informed_by_degree;  // I_k = alpha k theta / (1 + alpha k theta)
  double average_informed = 0.0;           // sum_k I_k P(K=k)
  bool converged = false;
  long iterations = 0;
};

// Fixed-point iteration theta <- F(theta) from theta0.  Starting at 1 the
// iterates decrease monotonically onto the unique positive fixed point;
// alpha within 1e-8 of the threshold is reported as subcritical (theta 0).
// Throws ConvergenceError carrying the last iterate on failure.
EquilibriumResult solve_theta_exact(const DegreeSpectrum& spectrum, double alpha,
                                    const FixedPointOptions& options = {},
                                    const StrandId& strand = StrandId::combined());
EquilibriumResult solve_theta_exact(const PoissonMixture& model, double alpha,
                                    const FixedPointOptions& options = {});

// Closed-form lower bound max(0, 1 - 1/(alpha E[K])); tight for E[K] >> 1.
double theta_approx(const DegreeSpectrum& spectrum, double alpha);
double theta_approx(const PoissonMixture& model, double alpha);

// Stationary informed density of a degree-k class.
double stationary_informed(double alpha, double theta, double k);

// Average informed density under the spectrum's pmf.
double average_informed(const DegreeSpectrum& spectrum, double alpha, double theta);
double average_informed(const PoissonMixture& model, double alpha, double theta);

struct DynamicsState {
  double t = 0.0;
  std::vector<double> informed;  // I_k, k = 0..k_max
  double theta = 0.0;
};

// Classic fixed-step RK4 on dI_k/dt = -I_k + alpha k (1 - I_k) theta(t).
// States are recorded every record_dt plus the initial and final state.
// A step that pushes any I_k outside [0,1] by more than 1e-6 throws.
std::vector<DynamicsState> integrate_dynamics(const DegreeSpectrum& spectrum,
                                              double alpha,
                                              const std::vector<double>& i0,
                                              double t_end, double step = 0.01,
                                              double record_dt = 1.0);
std::vector<DynamicsState> integrate_dynamics(const PoissonMixture& model,
                                              double alpha,
                                              const std::vector<double>& i0,
                                              double t_end, double step = 0.01,
                                              double record_dt = 1.0);

// Integrate until max_k |dI_k/dt| < deriv_tol; throws ConvergenceError if
// t_max passes first.
DynamicsState relax_to_equilibrium(const DegreeSpectrum& spectrum, double alpha,
                                   const std::vector<double>& i0,
                                   double step = 0.01, double deriv_tol = 1e-9,
                                   double t_max = 1e5);
DynamicsState relax_to_equilibrium(const PoissonMixture& model, double alpha,
                                   const std::vector<double>& i0,
                                   double step = 0.01, double deriv_tol = 1e-9,
                                   double t_max = 1e5);

// Equilibrium of every strand of a design: intra 1..M, inter ordered pairs,
// combined.  Requires at least one layer with positive density.
struct StrandReport {
  StrandId strand;
  double ek = 0.0;
  double ek2 = 0.0;
  double alpha_c = 0.0;
  double theta_exact = 0.0;
  double theta_lower_bound = 0.0;
  double avg_informed = 0.0;
  bool converged = false;
  long iterations = 0;
};

std::vector<StrandReport> evaluate_strands(const std::vector<double>& densities,
                                           const std::vector<double>& ranges_km,
                                           double alpha);

}  // namespace spreadnet
