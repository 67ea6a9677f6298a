#include "spreadnet/degree_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spreadnet {

namespace {
constexpr double kPi = std::numbers::pi;
}

LayerSpec LayerSpec::fixed(double density, double range_km) {
  LayerSpec s;
  s.density = s.density_min = s.density_max = density;
  s.range_km = s.range_min_km = s.range_max_km = range_km;
  s.validate();
  return s;
}

LayerSpec LayerSpec::bounded(double density_min, double density_max,
                             double range_min_km, double range_max_km) {
  LayerSpec s;
  s.density_min = density_min;
  s.density_max = density_max;
  s.range_min_km = range_min_km;
  s.range_max_km = range_max_km;
  s.density = density_min;
  s.range_km = range_min_km;
  s.validate();
  return s;
}

void LayerSpec::validate() const {
  if (!(0.0 <= density_min) || !(density_min <= density) || !(density <= density_max))
    throw std::invalid_argument("layer: need 0 <= density_min <= density <= density_max");
  if (!(0.0 <= range_min_km) || !(range_min_km <= range_km) || !(range_km <= range_max_km))
    throw std::invalid_argument("layer: need 0 <= range_min <= range <= range_max");
}

PoissonMixture::PoissonMixture(StrandId strand, std::vector<Component> components)
    : strand_(strand), components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("degree model needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0)) throw std::invalid_argument("component weight must be >= 0");
    if (!(c.mean >= 0.0)) throw std::invalid_argument("component mean must be >= 0");
    total += c.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("component weights must not all be 0");
  for (auto& c : components_) c.weight /= total;
  for (const auto& c : components_) {
    mean_ += c.weight * c.mean;
    second_moment_ += c.weight * (c.mean + c.mean * c.mean);
  }
}

double PoissonMixture::pmf(int k) const {
  if (k < 0) throw std::invalid_argument("pmf: k must be >= 0");
  double p = 0.0;
  for (const auto& c : components_) {
    if (c.mean <= 0.0) {
      if (k == 0) p += c.weight;
      continue;
    }
    p += c.weight * std::exp(-c.mean + k * std::log(c.mean) - std::lgamma(k + 1.0));
  }
  return p;
}

int PoissonMixture::k_max() const {
  double mu_max = 0.0;
  for (const auto& c : components_) mu_max = std::max(mu_max, c.mean);
  return static_cast<int>(std::ceil(mu_max + 12.0 * std::sqrt(mu_max) + 20.0));
}

std::vector<double> PoissonMixture::pmf_table() const {
  const int kmax = k_max();
  std::vector<double> table(kmax + 1);
  for (int k = 0; k <= kmax; ++k) table[k] = pmf(k);
  return table;
}

PoissonMixture intra_model(double density, double range_km, int layer_index) {
  if (!(density >= 0.0) || !(range_km >= 0.0))
    throw std::invalid_argument("intra_model: density and range must be >= 0");
  const double mu = density * kPi * range_km * range_km;
  return PoissonMixture(StrandId::intra(layer_index), {{1.0, mu}});
}

PoissonMixture intra_model(const LayerSpec& layer, int layer_index) {
  return intra_model(layer.density, layer.range_km, layer_index);
}

PoissonMixture inter_model(double density_m, double range_m_km, double density_n,
                           int m, int n) {
  if (!(density_m >= 0.0) || !(density_n >= 0.0) || !(range_m_km >= 0.0))
    throw std::invalid_argument("inter_model: densities and range must be >= 0");
  const double mu = (density_m + density_n) * kPi * range_m_km * range_m_km;
  return PoissonMixture(StrandId::inter(m, n), {{1.0, mu}});
}

PoissonMixture inter_model(const LayerSpec& layer_m, const LayerSpec& layer_n,
                           int m, int n) {
  return inter_model(layer_m.density, layer_m.range_km, layer_n.density, m, n);
}

PoissonMixture combined_model(const std::vector<double>& densities,
                              const std::vector<double>& ranges_km) {
  if (densities.size() != ranges_km.size() || densities.empty())
    throw std::invalid_argument("combined_model: need one (density, range) per layer");
  double total = 0.0;
  for (double d : densities) {
    if (!(d >= 0.0)) throw std::invalid_argument("combined_model: densities must be >= 0");
    total += d;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("combined_model: at least one layer must have density > 0");

  // A random device belongs to layer m with probability lambda_m / Lambda
  // and then sees Poisson(Lambda pi r_m^2) neighbours.
  std::vector<PoissonMixture::Component> comps;
  for (std::size_t m = 0; m < densities.size(); ++m) {
    if (densities[m] <= 0.0) continue;
    if (!(ranges_km[m] >= 0.0))
      throw std::invalid_argument("combined_model: ranges must be >= 0");
    comps.push_back({densities[m] / total, total * kPi * ranges_km[m] * ranges_km[m]});
  }
  return PoissonMixture(StrandId::combined(), std::move(comps));
}

PoissonMixture combined_model(const std::vector<LayerSpec>& layers) {
  std::vector<double> lam, r;
  lam.reserve(layers.size());
  r.reserve(layers.size());
  for (const auto& l : layers) {
    lam.push_back(l.density);
    r.push_back(l.range_km);
  }
  return combined_model(lam, r);
}

PoissonMixture strand_model(const std::vector<double>& densities,
                            const std::vector<double>& ranges_km,
                            const StrandId& strand) {
  if (densities.size() != ranges_km.size())
    throw std::invalid_argument("strand_model: need one (density, range) per layer");
  strand.validate(static_cast<int>(densities.size()));
  switch (strand.kind) {
    case StrandId::Kind::Intra:
      return intra_model(densities[strand.m - 1], ranges_km[strand.m - 1], strand.m);
    case StrandId::Kind::Inter:
      return inter_model(densities[strand.m - 1], ranges_km[strand.m - 1],
                         densities[strand.n - 1], strand.m, strand.n);
    case StrandId::Kind::Combined:
      return combined_model(densities, ranges_km);
  }
  throw std::invalid_argument("unknown strand kind");
}

Moments moments(const PoissonMixture& model) {
  return {model.mean(), model.second_moment()};
}

double total_variation(const std::vector<std::uint64_t>& histogram,
                       const PoissonMixture& model) {
  std::uint64_t n = 0;
  for (auto c : histogram) n += c;
  if (n == 0) throw std::invalid_argument("total_variation: empty histogram");

  const int top = std::max(static_cast<int>(histogram.size()) - 1, model.k_max());
  double l1 = 0.0;
  double model_mass = 0.0;
  for (int k = 0; k <= top; ++k) {
    const double emp =
        k < static_cast<int>(histogram.size()) ? static_cast<double>(histogram[k]) / n : 0.0;
    const double p = model.pmf(k);
    model_mass += p;
    l1 += std::fabs(emp - p);
  }
  l1 += std::max(0.0, 1.0 - model_mass);  // analytic tail beyond the table
  return 0.5 * l1;
}

}  // namespace spreadnet
