// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lazycell/geometry.hpp"

using namespace lazycell;
using geometry::compute_distances;

namespace {

PositionTable table(std::initializer_list<std::array<double, 3>> rows) {
  PositionTable t(Index(rows.size()), 3);
  Index i = 0;
  for (const auto& r : rows) {
    t.row(i++) << r[0], r[1], r[2];
  }
  return t;
}

PositionTable random_table(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> xy(-500.0, 500.0), z(0.0, 40.0);
  PositionTable t(n, 3);
  for (Index i = 0; i < n; ++i) t.row(i) << xy(rng), xy(rng), z(rng);
  return t;
}

}  // namespace

TEST_CASE("3-4-5 triangle") {
  const auto d = compute_distances(table({{3, 4, 0}}), table({{0, 0, 0}}));
  CHECK(d.d2(0, 0) == 5.0);
  CHECK(d.d3(0, 0) == 5.0);
  CHECK(d.az(0, 0) == doctest::Approx(0.927295218).epsilon(1e-9));
}

TEST_CASE("pure vertical offset") {
  const auto d = compute_distances(table({{0, 0, 1.5}}), table({{0, 0, 26}}));
  CHECK(d.d2(0, 0) == 0.0);
  CHECK(d.d3(0, 0) == 24.5);
  CHECK(d.az(0, 0) == 0.0);
}

TEST_CASE("azimuth is measured from the cell toward the UE and folds -pi to pi") {
  const auto d = compute_distances(table({{-1, 0, 0}, {0, 2, 0}, {0, -2, 0}}), table({{0, 0, 0}}));
  CHECK(d.az(0, 0) == std::numbers::pi);
  CHECK(d.az(1, 0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(d.az(2, 0) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(geometry::azimuth(-1.0, -0.0) == std::numbers::pi);
}

TEST_CASE("a UE on top of a cell has zero distance") {
  const auto d = compute_distances(table({{10, 10, 25}}), table({{10, 10, 25}}));
  CHECK(d.d3(0, 0) == 0.0);
}

TEST_CASE("empty or malformed tables are rejected") {
  CHECK_THROWS_AS(compute_distances(PositionTable(0, 3), table({{0, 0, 0}})), Error);
  CHECK_THROWS_AS(compute_distances(MatrixXd::Zero(2, 2), MatrixXd::Zero(1, 2)), Error);
}

TEST_CASE("validate_positions names the table") {
  try {
    geometry::validate_positions(table({{0, 0, -1}}), "ue_positions");
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(e.field() == "ue_positions");
  }
  CHECK_THROWS_AS(geometry::validate_positions(table({{NAN, 0, 0}}), "cells"), Error);
  CHECK_NOTHROW(geometry::validate_positions(table({{1, 2, 0}}), "cells"));
}

TEST_CASE("property: d3 >= d2 >= 0 and d3^2 = d2^2 + dz^2") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_table(rng, 7), c = random_table(rng, 5);
    const auto d = compute_distances(u, c);
    for (Index i = 0; i < u.rows(); ++i) {
      for (Index j = 0; j < c.rows(); ++j) {
        const double dz = u(i, 2) - c(j, 2);
        CHECK(d.d2(i, j) >= 0.0);
        CHECK(d.d3(i, j) >= d.d2(i, j));
        CHECK(d.d3(i, j) * d.d3(i, j) ==
              doctest::Approx(d.d2(i, j) * d.d2(i, j) + dz * dz).epsilon(1e-12));
        CHECK(d.az(i, j) > -std::numbers::pi);
        CHECK(d.az(i, j) <= std::numbers::pi);
      }
    }
  }
}

TEST_CASE("property: translating both tables leaves every output unchanged") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    // Integer-valued coordinates keep the shifted differences exact.
    PositionTable u = random_table(rng, 6).array().round(), c = random_table(rng, 4).array().round();
    const auto before = compute_distances(u, c);
    const double sx = std::round(std::uniform_real_distribution<double>(-1e3, 1e3)(rng));
    const double sy = std::round(std::uniform_real_distribution<double>(-1e3, 1e3)(rng));
    u.col(0).array() += sx;
    u.col(1).array() += sy;
    c.col(0).array() += sx;
    c.col(1).array() += sy;
    const auto after = compute_distances(u, c);
    CHECK(before.d2 == after.d2);
    CHECK(before.d3 == after.d3);
    CHECK(before.az == after.az);
  }
}

TEST_CASE("property: rotating a UE by a full turn about a cell keeps its azimuth") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = angle(rng);
    const double r = 100.0;
    const auto d1 = compute_distances(table({{r * std::cos(a), r * std::sin(a), 1.5}}),
                                      table({{0, 0, 25}}));
    const double b = a + 2.0 * std::numbers::pi;
    const auto d2 = compute_distances(table({{r * std::cos(b), r * std::sin(b), 1.5}}),
                                      table({{0, 0, 25}}));
    CHECK(d1.az(0, 0) == doctest::Approx(d2.az(0, 0)).epsilon(1e-12));
    CHECK(d1.az(0, 0) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("property: a row update then its complement equals one full compute") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto u = random_table(rng, 9), c = random_table(rng, 3);
    const auto full = compute_distances(u, c);
    auto partial = compute_distances(random_table(rng, 9), c);
    std::vector<Index> subset, rest;
    for (Index i = 0; i < u.rows(); ++i) (std::bernoulli_distribution(0.5)(rng) ? subset : rest).push_back(i);
    geometry::compute_distances_rows(u, c, subset, partial);
    geometry::compute_distances_rows(u, c, rest, partial);
    CHECK(partial.d2 == full.d2);
    CHECK(partial.d3 == full.d3);
    CHECK(partial.az == full.az);
  }
}

TEST_CASE("rows outside the update set are untouched") {
  const auto u = table({{1, 0, 0}, {2, 0, 0}});
  const auto c = table({{0, 0, 0}});
  auto out = compute_distances(u, c);
  out.d2(1, 0) = -7.0;
  const std::vector<Index> only0{0};
  geometry::compute_distances_rows(u, c, only0, out);
  CHECK(out.d2(1, 0) == -7.0);
}

TEST_CASE("float scalar instantiation") {
  PositionTable u = table({{3, 4, 0}});
  const auto d = compute_distances(u.cast<float>().eval(), u.cast<float>().eval());
  CHECK(d.d3(0, 0) == 0.0f);
}
