/*
 * Copyright 2026 The mhtune Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <vector>

#include "doctest.h"
#include "mhtune/error.hpp"
#include "mhtune/rate_oracle.hpp"
#include "mhtune/rng.hpp"

using namespace mhtune;

namespace {

std::vector<double> random_simplex(Rng& rng, std::size_t n, double floor = 0.0) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) {
    v = floor - std::log(rng.uniform_open());
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}

FiniteMhChain random_chain(Rng& rng, std::size_t n) {
  Matrix j;
  for (std::size_t i = 0; i < n; ++i) j.push_back(random_simplex(rng, n, 0.05));
  return FiniteMhChain::build(random_simplex(rng, n, 0.1), j);
}

}  // namespace

TEST_CASE("kernel construction") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_chain(rng, 2 + t % 4);
    const std::size_t n = c.size();
    for (std::size_t x = 0; x < n; ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        row += c.kernel[x][y];
        if (y != x) {
          const double expect = std::min(1.0, c.target[y] * c.proposal[y][x] /
                                                  (c.target[x] * c.proposal[x][y])) *
                                c.proposal[x][y];
          CHECK(c.kernel[x][y] == doctest::Approx(expect).epsilon(1e-15));
        }
      }
      CHECK(std::abs(row - 1.0) <= 1e-12);
    }
    for (std::size_t y = 0; y < n; ++y) {
      double piK = 0.0;
      for (std::size_t x = 0; x < n; ++x) piK += c.target[x] * c.kernel[x][y];
      CHECK(std::abs(piK - c.target[y]) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(FiniteMhChain::build({1.0}, {{1.0}}), Error);
  CHECK_THROWS_AS(FiniteMhChain::build({0.5, 0.6}, {{0.5, 0.5}, {0.5, 0.5}}), Error);
  CHECK_THROWS_AS(FiniteMhChain::build({0.5, 0.5}, {{0.5, 0.6}, {0.5, 0.5}}), Error);
}

TEST_CASE("rate at the target is zero") {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto c = random_chain(rng, 3);
    const auto dv = finite_rate_dv(c, c.target);
    CHECK(std::abs(dv.value) <= 1e-9);
    for (double u : dv.maximizer_u) CHECK(u == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(finite_rate_entropy(c, c.target).value) <= 1e-9);
  }
}

TEST_CASE("two-state independent kernel") {
  const auto c = FiniteMhChain::build({0.5, 0.5}, {{0.5, 0.5}, {0.5, 0.5}});
  const std::vector<double> mu = {0.7, 0.3};
  // With K(x, .) = pi for every x the rate is the relative entropy of mu to pi.
  const double kl = 0.7 * std::log(1.4) + 0.3 * std::log(0.6);
  const auto coarse = finite_rate_dv(c, mu);
  DvSolverConfig fine;
  fine.grid_step = 0.125;
  const auto refined = finite_rate_dv(c, mu, fine);
  CHECK(std::abs(coarse.value - refined.value) <= 1e-8);
  CHECK(std::abs(coarse.value - kl) <= 1e-10);
  CHECK(std::abs(finite_rate_entropy(c, mu).value - kl) <= 1e-10);
}

TEST_CASE("point masses") {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    const auto c = random_chain(rng, 3);
    for (std::size_t x = 0; x < 3; ++x) {
      std::vector<double> mu(3, 0.0);
      mu[x] = 1.0;
      const double closed = -std::log(c.kernel[x][x]);
      CHECK(finite_rate_dv(c, mu).value <= closed + 1e-9);
      CHECK(finite_rate_dv(c, mu).value >= closed - 1e-9);
      CHECK(finite_rate_entropy(c, mu).value == doctest::Approx(closed).epsilon(1e-12));
    }
  }
}

TEST_CASE("both representations agree on random instances") {
  Rng rng(2026);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_chain(rng, 3);
    for (int k = 0; k < 5; ++k) {
      const auto mu = random_simplex(rng, 3);
      const auto dv = finite_rate_dv(c, mu);
      const auto ent = finite_rate_entropy(c, mu);
      CHECK(dv.converged);
      CHECK(ent.converged);
      CHECK(std::abs(dv.value - ent.value) <= 1e-6);
      CHECK(dv.value >= -1e-12);
      // The minimizing kernel is row-stochastic and leaves mu invariant.
      for (std::size_t y = 0; y < 3; ++y) {
        double s = 0.0;
        for (std::size_t x = 0; x < 3; ++x) s += mu[x] * ent.optimal_kernel[x][y];
        CHECK(std::abs(s - mu[y]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("DV solver handles up to five states") {
  Rng rng(77);
  for (std::size_t n : {4u, 5u}) {
    const auto c = random_chain(rng, n);
    const auto mu = random_simplex(rng, n);
    const auto dv = finite_rate_dv(c, mu);
    CHECK(std::abs(dv.value - finite_rate_entropy(c, mu).value) <= 1e-6);
  }
}

TEST_CASE("convexity") {
  Rng rng(99);
  for (int t = 0; t < 10; ++t) {
    const auto c = random_chain(rng, 3);
    const auto m1 = random_simplex(rng, 3);
    const auto m2 = random_simplex(rng, 3);
    const double i1 = finite_rate_dv(c, m1).value;
    const double i2 = finite_rate_dv(c, m2).value;
    for (double s : {0.25, 0.5, 0.75}) {
      std::vector<double> mix(3);
      for (int i = 0; i < 3; ++i) mix[i] = s * m1[i] + (1 - s) * m2[i];
      CHECK(finite_rate_dv(c, mix).value <= s * i1 + (1 - s) * i2 + 1e-6);
    }
  }
}

TEST_CASE("zero only at the target") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_chain(rng, 3);
    auto mu = random_simplex(rng, 3);
    double dist = 0.0;
    for (int i = 0; i < 3; ++i) dist = std::max(dist, std::abs(mu[i] - c.target[i]));
    if (dist < 1e-3) continue;
    CHECK(finite_rate_dv(c, mu).value > 1e-9);
  }
}

TEST_CASE("finite bounds sandwich the rate") {
  Rng rng(4242);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_chain(rng, 3);
    for (int k = 0; k < 5; ++k) {
      const auto mu = random_simplex(rng, 3);
      const double rate = finite_rate_dv(c, mu).value;
      const auto b = finite_bounds(c, mu);
      CHECK(b.lb_dv_phi <= rate + 1e-6);
      CHECK(b.lb_variational <= rate + 1e-6);
      CHECK(rate <= b.ub_indep + 1e-6);
      CHECK(rate <= b.ub_mh + 1e-6);
      CHECK(b.lb_variational >= 0.0);
    }
  }
}

TEST_CASE("unreachable support") {
  // Deterministic swap between states 0 and 1; state 2 stays put.
  const auto c = FiniteMhChain::build({1.0 / 3, 1.0 / 3, 1.0 / 3},
                                      {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
  const std::vector<double> lopsided = {0.8, 0.2, 0.0};
  CHECK_FALSE(reachable(c, lopsided));
  try {
    finite_rate_dv(c, lopsided);
    FAIL("expected UnreachableSupport");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnreachableSupport);
  }
  CHECK_THROWS_AS(finite_rate_entropy(c, lopsided), Error);
  const std::vector<double> balanced = {0.5, 0.5, 0.0};
  CHECK(reachable(c, balanced));
  CHECK(std::abs(finite_rate_entropy(c, balanced).value) <= 1e-12);
}
