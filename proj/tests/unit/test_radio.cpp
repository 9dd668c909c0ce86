// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lazycell/error.hpp"
#include "lazycell/radio.hpp"

using namespace lazycell;
using namespace lazycell::radio;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

TEST_CASE("pattern at boresight, half-power offset and back lobe") {
  CHECK(antenna_attenuation_db(0.0, 0.0) == 0.0);
  CHECK(antenna_attenuation_db(32.5 * kDeg, 0.0) == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(pattern_attenuation_db(32.5) == -3.0);
  CHECK(antenna_attenuation_db(180.0 * kDeg, 0.0) == -30.0);
  CHECK(pattern_attenuation_db(180.0) == -30.0);
}

TEST_CASE("offsets wrap into [0, 180] degrees") {
  CHECK(wrapped_offset_deg(350.0 * kDeg, 10.0 * kDeg) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(wrapped_offset_deg(-170.0 * kDeg, 170.0 * kDeg) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(wrapped_offset_deg(3.0 * std::numbers::pi, 0.0) == doctest::Approx(180.0).epsilon(1e-12));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> a(-20.0, 20.0);
  for (int k = 0; k < 1000; ++k) {
    const double off = wrapped_offset_deg(a(rng), a(rng));
    CHECK(off >= 0.0);
    CHECK(off <= 180.0);
  }
}

TEST_CASE("custom beamwidth and attenuation cap") {
  const AntennaPattern narrow{30.0, 20.0};
  CHECK(pattern_attenuation_db(15.0, narrow) == -3.0);
  CHECK(pattern_attenuation_db(90.0, narrow) == -20.0);
}

TEST_CASE("omnidirectional sites attenuate nothing") {
  const auto omni = AntennaConfig::sectored(1);
  CHECK(omni.omnidirectional());
  for (int k = 0; k < 360; ++k) CHECK(antenna_attenuation_db(k * kDeg, 0, omni) == 0.0);
}

TEST_CASE("three sectors: best-sector attenuation has 120 degree period and -10.22 dB crossovers") {
  const auto three = AntennaConfig::sectored(3);
  REQUIRE(three.boresights_rad.size() == 3);
  CHECK(three.boresights_rad[1] == doctest::Approx(120.0 * kDeg));
  auto best = [&](double deg) {
    double b = -1e9;
    for (int s = 0; s < 3; ++s) b = std::max(b, antenna_attenuation_db(deg * kDeg, s, three));
    return b;
  };
  const double crossover = -12.0 * (60.0 / 65.0) * (60.0 / 65.0);
  CHECK(crossover == doctest::Approx(-10.2249).epsilon(1e-4));
  for (const double deg : {60.0, 180.0, 300.0}) CHECK(best(deg) == doctest::Approx(crossover).epsilon(1e-12));
  for (int k = 0; k < 360; ++k) {
    CHECK(best(k) == doctest::Approx(best(k + 120)).epsilon(1e-12));
    CHECK(best(k) >= crossover - 1e-12);
  }
  CHECK_THROWS_AS(AntennaConfig::sectored(0), Error);
}

TEST_CASE("fades are reproducible from the seed") {
  const auto a = sample_rayleigh_fades(20, 30, 99);
  const auto b = sample_rayleigh_fades(20, 30, 99);
  const auto c = sample_rayleigh_fades(20, 30, 100);
  CHECK(a == b);
  CHECK(a != c);
  CHECK((a.array() > 0.0).all());
}

TEST_CASE("fade moments match exponential(1)") {
  const auto f = sample_rayleigh_fades(1000, 1000, 7);
  const double mean = f.mean();
  const double var = (f.array() - mean).square().sum() / double(f.size() - 1);
  CHECK(std::abs(mean - 1.0) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
