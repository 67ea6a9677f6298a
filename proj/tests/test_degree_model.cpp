#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "spreadnet/degree_model.hpp"
#include "spreadnet/rng.hpp"

using namespace spreadnet;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct-formula Poisson pmf, the oracle for the log-space implementation.
double poisson_pmf_direct(double mu, int k) {
  double p = std::exp(-mu);
  for (int i = 1; i <= k; ++i) p *= mu / i;
  return p;
}

}  // namespace

TEST_CASE("intra model: mean lambda pi r^2") {
  const auto model = intra_model(25.0, 0.2);
  CHECK(model.mean() == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(model.mean() == doctest::Approx(3.14).epsilon(5e-3));  // 3 s.f.
  CHECK(model.pmf(0) == doctest::Approx(std::exp(-kPi)).epsilon(1e-12));
  CHECK(model.pmf(0) == doctest::Approx(0.0432139182637723).epsilon(1e-10));
}

TEST_CASE("intra model: empty layer") {
  const auto model = intra_model(0.0, 0.5);
  CHECK(model.mean() == 0.0);
  CHECK(model.pmf(0) == 1.0);
  CHECK(model.pmf(1) == 0.0);
}

TEST_CASE("pmf of Poisson(pi) at k=3") {
  const auto model = intra_model(25.0, 0.2);
  CHECK(model.pmf(3) == doctest::Approx(poisson_pmf_direct(kPi, 3)).epsilon(1e-12));
  CHECK(model.pmf(3) == doctest::Approx(0.2233).epsilon(1e-3));
}

TEST_CASE("negative k is rejected") {
  CHECK_THROWS_AS(intra_model(1.0, 1.0).pmf(-1), std::invalid_argument);
}

TEST_CASE("inter model: mean (lambda_m + lambda_n) pi r_m^2 and asymmetry") {
  const auto mn = inter_model(5.0, 0.3, 20.0);
  CHECK(mn.mean() == doctest::Approx(25.0 * kPi * 0.09).epsilon(1e-12));
  CHECK(mn.mean() == doctest::Approx(7.0686).epsilon(1e-4));

  const auto nm = inter_model(20.0, 0.1, 5.0);
  CHECK(nm.mean() == doctest::Approx(25.0 * kPi * 0.01).epsilon(1e-12));
  CHECK(mn.mean() / nm.mean() == doctest::Approx(0.09 / 0.01).epsilon(1e-12));
}

TEST_CASE("inter model degenerates to intra when the second layer is empty") {
  const auto inter = inter_model(25.0, 0.2, 0.0);
  const auto intra = intra_model(25.0, 0.2);
  CHECK(inter.mean() == intra.mean());
  for (int k = 0; k <= intra.k_max(); ++k)
    CHECK(inter.pmf(k) == doctest::Approx(intra.pmf(k)).epsilon(1e-14));
}

TEST_CASE("combined model: mixture weights and mean") {
  const auto model = combined_model({5.0, 20.0}, {0.3, 0.1});
  CHECK(model.mean() == doctest::Approx(5.0 * kPi * 0.09 + 20.0 * kPi * 0.01).epsilon(1e-12));
  CHECK(model.mean() == doctest::Approx(2.0420).epsilon(1e-4));
  REQUIRE(model.components().size() == 2);
  CHECK(model.components()[0].weight == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(model.components()[1].weight == doctest::Approx(0.8).epsilon(1e-12));
  // both components see the full Lambda within their own range
  CHECK(model.components()[0].mean == doctest::Approx(25.0 * kPi * 0.09).epsilon(1e-12));
}

TEST_CASE("combined model with one layer equals the intra model") {
  const auto combined = combined_model({25.0}, {0.2});
  const auto intra = intra_model(25.0, 0.2);
  for (int k = 0; k <= intra.k_max(); ++k)
    CHECK(combined.pmf(k) == doctest::Approx(intra.pmf(k)).epsilon(1e-14));
}

TEST_CASE("combined model rejects all-zero densities") {
  CHECK_THROWS_AS(combined_model({0.0, 0.0}, {0.1, 0.1}), std::invalid_argument);
}

TEST_CASE("mixture pmf is the weighted sum of its components") {
  const auto model = combined_model({5.0, 20.0}, {0.3, 0.1});
  for (int k = 0; k <= 40; ++k) {
    double manual = 0.0;
    for (const auto& c : model.components()) manual += c.weight * poisson_pmf_direct(c.mean, k);
    CHECK(model.pmf(k) == doctest::Approx(manual).epsilon(1e-12));
  }
}

TEST_CASE("pmf accumulates to 1 - 1e-12 by k_max, including large means") {
  // lambda 40 km^-2 at r = 0.5 km gives mu ~ 31.4, the top of the box.
  for (const auto& model :
       {intra_model(25.0, 0.2), intra_model(40.0, 0.5), combined_model({40.0, 5.0}, {0.5, 0.3})}) {
    double mass = 0.0;
    for (int k = 0; k <= model.k_max(); ++k) {
      const double p = model.pmf(k);
      REQUIRE(p >= 0.0);
      mass += p;
    }
    CHECK(mass >= 1.0 - 1e-12);
    CHECK(mass <= 1.0 + 1e-9);
  }
}

TEST_CASE("moments: Poisson second moment identity") {
  const auto m = moments(intra_model(25.0, 0.2));
  CHECK(m.second == doctest::Approx(kPi + kPi * kPi).epsilon(1e-12));
  CHECK(m.second == doctest::Approx(13.0112).epsilon(1e-4));

  const auto zero = moments(intra_model(0.0, 1.0));
  CHECK(zero.mean == 0.0);
  CHECK(zero.second == 0.0);
}

TEST_CASE("mixture moments match the brute-force series") {
  const auto model = combined_model({8.0, 30.0}, {0.4, 0.12});
  double mean = 0.0, second = 0.0;
  for (int k = 0; k <= model.k_max(); ++k) {
    const double p = model.pmf(k);
    mean += k * p;
    second += static_cast<double>(k) * k * p;
  }
  CHECK(model.mean() == doctest::Approx(mean).epsilon(1e-8));
  CHECK(model.second_moment() == doctest::Approx(second).epsilon(1e-8));
}

TEST_CASE("intra mean identity holds across random parameter draws") {
  rng::CounterRng gen(314);
  for (int i = 0; i < 1000; ++i) {
    const double lambda = 40.0 * gen.uniform();
    const double r = gen.uniform();
    const auto model = intra_model(lambda, r);
    const double expected = lambda * kPi * r * r;
    CHECK(std::fabs(model.mean() - expected) <= 1e-12 * std::max(1.0, expected));
  }
}

TEST_CASE("layer spec bounds are validated") {
  CHECK_THROWS_AS(LayerSpec::bounded(5.0, 1.0, 0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(LayerSpec::bounded(1.0, 5.0, 0.3, 0.2), std::invalid_argument);
  CHECK_NOTHROW(LayerSpec::bounded(1.0, 5.0, 0.2, 0.2));
}

TEST_CASE("strand model dispatches on the strand id") {
  const std::vector<double> lam = {5.0, 20.0};
  const std::vector<double> r = {0.3, 0.1};
  CHECK(strand_model(lam, r, StrandId::intra(2)).mean() ==
        doctest::Approx(20.0 * kPi * 0.01).epsilon(1e-12));
  CHECK(strand_model(lam, r, StrandId::inter(2, 1)).mean() ==
        doctest::Approx(25.0 * kPi * 0.01).epsilon(1e-12));
  CHECK(strand_model(lam, r, StrandId::combined()).mean() ==
        doctest::Approx(2.0420352248).epsilon(1e-9));
  CHECK_THROWS_AS(strand_model(lam, r, StrandId::intra(3)), std::invalid_argument);
}

TEST_CASE("strand labels parse and round-trip") {
  CHECK(StrandId::parse("intra:2") == StrandId::intra(2));
  CHECK(StrandId::parse("inter:1,2") == StrandId::inter(1, 2));
  CHECK(StrandId::parse("combined") == StrandId::combined());
  CHECK(StrandId::parse(StrandId::inter(3, 1).label()) == StrandId::inter(3, 1));
  CHECK_THROWS_AS(StrandId::parse("inter:1"), std::invalid_argument);
  CHECK_THROWS_AS(StrandId::parse("nope"), std::invalid_argument);
}
