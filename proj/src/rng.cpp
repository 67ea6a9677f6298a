#include "spreadnet/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace spreadnet::rng {

int poisson(CounterRng& g, double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  int total = 0;
  while (mean > 0.0) {
    const double chunk = mean > 500.0 ? 500.0 : mean;
    mean -= chunk;
    // exp(-500) ~ 7e-218, comfortably above double underflow
    const double limit = std::exp(-chunk);
    double prod = g.uniform();
    int k = 0;
    while (prod > limit) {
      prod *= g.uniform();
      ++k;
    }
    total += k;
  }
  return total;
}

}  // namespace spreadnet::rng
