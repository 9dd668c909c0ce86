// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lazycell/error.hpp"
#include "lazycell/stochgeo.hpp"

using namespace lazycell;
using namespace lazycell::stochgeo;

namespace {

// rho by composite Simpson after u = a * s^-8, which maps the infinite range onto (0, 1]
// and makes the integrand vanish smoothly at s = 0.
double simpson_rho(double theta, double alpha) {
  const double a = std::pow(theta, -2.0 / alpha);
  auto f = [&](double s) {
    if (s == 0.0) return 0.0;
    const double u = a * std::pow(s, -8.0);
    return 8.0 * a * std::pow(s, -9.0) / (1.0 + std::pow(u, alpha / 2.0));
  };
  const int n = 20000;
  const double h = 1.0 / n;
  double sum = f(0.0) + f(1.0);
  for (int k = 1; k < n; ++k) sum += f(k * h) * (k % 2 ? 4.0 : 2.0);
  return std::pow(theta, 2.0 / alpha) * sum * h / 3.0;
}

// Monte-Carlo P(SIR > theta) for a typical UE at the origin of a unit-intensity PPP disc.
struct McEstimate {
  double p;
  double sigma;
};
McEstimate monte_carlo_ccdf(double theta, double alpha, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double radius = 30.0;
  std::poisson_distribution<int> count(std::numbers::pi * radius * radius);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> fade(1.0);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const int n = std::max(1, count(rng));
    double best_r = INFINITY, best_power = 0.0, total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double r = radius * std::sqrt(unit(rng));
      const double p = fade(rng) * std::pow(r, -alpha);
      total += p;
      if (r < best_r) {
        best_r = r;
        best_power = p;
      }
    }
    if (best_power > theta * (total - best_power)) ++hits;
  }
  const double p = double(hits) / trials;
  return {p, std::sqrt(p * (1 - p) / trials)};
}

}  // namespace

TEST_CASE("alpha = 4 closed form") {
  for (const double theta : {0.01, 0.3, 1.0, 4.0, 100.0}) {
    const double r = std::sqrt(theta);
    const double rho = r * (std::numbers::pi / 2 - std::atan(1.0 / r));
    CHECK(interference_ratio(theta, 4.0) == doctest::Approx(rho).epsilon(1e-10));
  }
  CHECK(analytical_sir_ccdf(1.0, 4.0) == doctest::Approx(1.0 / (1.0 + std::numbers::pi / 4)).epsilon(1e-10));
  CHECK(analytical_sir_ccdf(1.0, 4.0) == doctest::Approx(0.56010).epsilon(1e-5));
}

TEST_CASE("quadrature matches an independent Simpson rule") {
  for (const double alpha : {2.5, 3.0, 3.5, 4.5, 6.0}) {
    for (const double theta : {0.1, 1.0, 10.0}) {
      INFO("alpha " << alpha << " theta " << theta);
      CHECK(interference_ratio(theta, alpha) == doctest::Approx(simpson_rho(theta, alpha)).epsilon(1e-7));
    }
  }
}

TEST_CASE("alpha = 3.5 and alpha = 4 agree with Monte-Carlo within 3 sigma") {
  for (const double alpha : {3.5, 4.0}) {
    const auto mc = monte_carlo_ccdf(1.0, alpha, 4000, 123);
    INFO("alpha " << alpha << " mc " << mc.p << " +- " << mc.sigma);
    CHECK(std::abs(analytical_sir_ccdf(1.0, alpha) - mc.p) <= 3.0 * mc.sigma);
  }
}

TEST_CASE("CCDF limits and monotonicity") {
  CHECK(analytical_sir_ccdf(0.0, 3.5) == 1.0);
  CHECK(analytical_sir_ccdf(1e-9, 3.5) == doctest::Approx(1.0).epsilon(1e-4));
  double last = 1.0;
  for (double db = -20.0; db <= 30.0; db += 0.5) {
    const double p = analytical_sir_ccdf(std::pow(10.0, db / 10.0), 3.5);
    CHECK(p < last);
    CHECK(p > 0.0);
    last = p;
  }
  // Faster decay means less far interference and better coverage.
  CHECK(analytical_sir_ccdf(1.0, 3.0) < analytical_sir_ccdf(1.0, 3.5));
  CHECK(analytical_sir_ccdf(1.0, 3.5) < analytical_sir_ccdf(1.0, 4.0));
}

TEST_CASE("path-loss exponent must exceed 2") {
  CHECK_THROWS_AS(interference_ratio(1.0, 2.0), Error);
  CHECK_THROWS_AS(analytical_sir_ccdf(1.0, 1.5), Error);
  CHECK_THROWS_AS(interference_ratio(-1.0, 3.0), Error);
}

TEST_CASE("empirical CCDF") {
  const std::vector<double> s{3.0, 1.0, 2.0};
  CHECK(empirical_ccdf_at(s, 2.0) == doctest::Approx(1.0 / 3.0));
  CHECK(empirical_ccdf_at(s, 0.5) == 1.0);
  CHECK(empirical_ccdf_at(s, 3.0) == 0.0);

  const std::vector<double> flat(5, 7.0);
  CHECK(empirical_ccdf_at(flat, 6.999) == 1.0);
  CHECK(empirical_ccdf_at(flat, 7.0) == 0.0);
  const auto steps = empirical_ccdf(flat);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].threshold == 7.0);
  CHECK(steps[0].probability == 0.0);

  const auto c = empirical_ccdf(s);
  REQUIRE(c.size() == 3);
  CHECK(c[0].threshold == 1.0);
  CHECK(c[0].probability == doctest::Approx(2.0 / 3.0));
  CHECK(c[2].probability == 0.0);
  CHECK_THROWS_AS(empirical_ccdf(std::vector<double>{}), Error);
}

TEST_CASE("KS distance of exact quantiles is about 1/n") {
  // Invert the analytical CCDF by bisection at the mid-quantiles.
  const double alpha = 4.0;
  const int n = 200;
  std::vector<double> samples;
  for (int k = 0; k < n; ++k) {
    const double target = 1.0 - (k + 0.5) / n;
    double lo = 1e-8, hi = 1e8;
    for (int it = 0; it < 200; ++it) {
      const double mid = std::sqrt(lo * hi);
      (analytical_sir_ccdf(mid, alpha) > target ? lo : hi) = mid;
    }
    samples.push_back(std::sqrt(lo * hi));
  }
  CHECK(ks_distance(samples, alpha) == doctest::Approx(0.5 / n).epsilon(1e-3));
}

TEST_CASE("PPP count has Poisson mean and fixed counts are exact") {
  const Region r{0, 0, 10, 10};
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) sum += double(generate_ppp(1.0, r, 0.0, s).rows());
  const double mean = sum / 1000.0;
  CHECK(std::abs(mean - 100.0) <= 3.0 * std::sqrt(100.0 / 1000.0));

  const auto pts = generate_uniform(10000, r, 1.5, 1);
  CHECK(pts.rows() == 10000);
  CHECK(pts.col(0).minCoeff() >= 0.0);
  CHECK(pts.col(1).maxCoeff() <= 10.0);
  CHECK((pts.col(2).array() == 1.5).all());
}

TEST_CASE("point sets are reproducible") {
  const Region r{-5, -5, 5, 5};
  CHECK(generate_ppp(2.0, r, 0.0, 9) == generate_ppp(2.0, r, 0.0, 9));
  CHECK(generate_uniform(50, r, 0.0, 9) == generate_uniform(50, r, 0.0, 9));
  CHECK(generate_uniform(50, r, 0.0, 9) != generate_uniform(50, r, 0.0, 10));
  const auto q = r.central_quarter();
  CHECK(q.x_min == -2.5);
  CHECK(q.y_max == 2.5);
  CHECK(q.area() == r.area() / 4.0);
}
