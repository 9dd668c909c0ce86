// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "lazycell/scheduler.hpp"

using namespace lazycell;
using namespace lazycell::scheduler;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(Index(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

VectorXd one_cell(const VectorXd& se, double bandwidth, double p) {
  return allocate(se, VectorXi::Zero(se.size()), VectorXd::Constant(1, bandwidth), p);
}

}  // namespace

TEST_CASE("proportional fair at p = 0") {
  const auto t = one_cell(vec({2, 1}), 10.0, 0.0);
  CHECK(t(0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(t(1) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("equal throughput at p = 1") {
  const auto t = one_cell(vec({2, 1}), 10.0, 1.0);
  CHECK(t(0) == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
  CHECK(t(1) == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("a lone UE gets the whole cell for any p") {
  for (const double p : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(one_cell(vec({3.5}), 2e6, p)(0) == doctest::Approx(7e6).epsilon(1e-12));
  }
}

TEST_CASE("zero-efficiency UEs get nothing and take no share") {
  const auto t = one_cell(vec({2, 0, 1}), 10.0, 1.0);
  CHECK(t(1) == 0.0);
  CHECK(t(0) == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
  const VectorXd se = vec({2, 0, 1});
  const std::vector<Index> all{0, 1, 2};
  const auto s = resource_shares(std::span<const Index>(all), se, 0.7);
  CHECK(s[1] == 0.0);
  CHECK(s[0] + s[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one_cell(vec({0, 0}), 10.0, 0.5) == VectorXd::Zero(2));
}

TEST_CASE("cells allocate independently") {
  VectorXi a(4);
  a << 0, 1, 0, 1;
  const auto t = allocate(vec({2, 4, 1, 4}), a, vec({10, 20}), 0.0);
  CHECK(t(0) == doctest::Approx(10.0));
  CHECK(t(2) == doctest::Approx(5.0));
  CHECK(t(1) == doctest::Approx(40.0));
  CHECK(t(3) == doctest::Approx(40.0));
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(one_cell(vec({1}), 1.0, -0.1), Error);
  CHECK_THROWS_AS(one_cell(vec({-1}), 1.0, 0.0), Error);
  VectorXi a(1);
  a << 3;
  CHECK_THROWS_AS(allocate(vec({1}), a, vec({1}), 0.0), Error);
  CHECK_THROWS_AS(allocate(vec({1, 2}), a, vec({1}), 0.0), Error);
}

TEST_CASE("property: shares sum to one, endpoint behaviour and monotone redistribution") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> se_dist(0.1, 5.5);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + Index(trial % 7);
    VectorXd se(n);
    for (Index i = 0; i < n; ++i) se(i) = se_dist(rng);
    std::vector<Index> members(static_cast<std::size_t>(n));
    std::iota(members.begin(), members.end(), Index{0});
    Index lo = 0, hi = 0;
    se.minCoeff(&lo);
    se.maxCoeff(&hi);

    double last_lo = -1.0, last_hi = 1e300, last_total = 1e300;
    for (int step = 0; step <= 20; ++step) {
      const double p = 0.05 * step;
      const auto s = resource_shares(std::span<const Index>(members), se, p);
      CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      const auto t = one_cell(se, 1e7, p);
      CHECK(t(lo) >= last_lo * (1 - 1e-12));
      CHECK(t(hi) <= last_hi * (1 + 1e-12));
      CHECK(t.sum() <= last_total * (1 + 1e-12));
      last_lo = t(lo);
      last_hi = t(hi);
      last_total = t.sum();
    }
    const auto pf = one_cell(se, 1e7, 0.0);
    for (Index i = 1; i < n; ++i) {
      CHECK(pf(i) / pf(0) == doctest::Approx(se(i) / se(0)).epsilon(1e-12));
    }
    const auto eq = one_cell(se, 1e7, 1.0);
    CHECK(eq.maxCoeff() / eq.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  }
}
