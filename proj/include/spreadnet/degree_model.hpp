#pragma once

#include <cstdint>
#include <vector>

#include "spreadnet/strand.hpp"

namespace spreadnet {

// One device type: deployment density (km^-2), communication range (km),
// and the tunable intervals for both.
struct LayerSpec {
  double density = 0.0;
  double range_km = 0.0;
  double density_min = 0.0;
  double density_max = 0.0;
  double range_min_km = 0.0;
  double range_max_km = 0.0;

  static LayerSpec fixed(double density, double range_km);
  static LayerSpec bounded(double density_min, double density_max,
                           double range_min_km, double range_max_km);
  void validate() const;
};

// Analytic degree distribution of a strand, represented uniformly as a
// Poisson mixture: intra and inter strands have a single component, the
// combined strand one component per layer weighted by lambda_m / Lambda.
class PoissonMixture {
 public:
  struct Component {
    double weight;
    double mean;
  };

  PoissonMixture(StrandId strand, std::vector<Component> components);

  const StrandId& strand() const { return strand_; }
  const std::vector<Component>& components() const { return components_; }

  double mean() const { return mean_; }                    // E[K], exact
  double second_moment() const { return second_moment_; }  // E[K^2], exact

  // pmf(k) = sum_j w_j e^{-mu_j} mu_j^k / k!, evaluated in log space per
  // component so means beyond ~100 stay finite.
  double pmf(int k) const;

  // Truncation point: cumulative mass reaches 1 - 1e-12 by
  // ceil(mu_max + 12 sqrt(mu_max) + 20).
  int k_max() const;
  std::vector<double> pmf_table() const;  // k = 0..k_max()

 private:
  StrandId strand_;
  std::vector<Component> components_;
  double mean_ = 0.0;
  double second_moment_ = 0.0;
};

PoissonMixture intra_model(double density, double range_km, int layer_index = 1);
PoissonMixture intra_model(const LayerSpec& layer, int layer_index = 1);

// Mean (lambda_m + lambda_n) pi r_m^2: the range of the *first* layer.
PoissonMixture inter_model(double density_m, double range_m_km, double density_n,
                           int m = 1, int n = 2);
PoissonMixture inter_model(const LayerSpec& layer_m, const LayerSpec& layer_n,
                           int m = 1, int n = 2);

PoissonMixture combined_model(const std::vector<double>& densities,
                              const std::vector<double>& ranges_km);
PoissonMixture combined_model(const std::vector<LayerSpec>& layers);

PoissonMixture strand_model(const std::vector<double>& densities,
                            const std::vector<double>& ranges_km,
                            const StrandId& strand);

struct Moments {
  double mean;
  double second;
};
Moments moments(const PoissonMixture& model);

// Total-variation distance between an empirical degree histogram and the
// analytic pmf, including the model's tail mass beyond the histogram.
double total_variation(const std::vector<std::uint64_t>& histogram,
                       const PoissonMixture& model);

}  // namespace spreadnet
