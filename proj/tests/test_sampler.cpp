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
#include "mhtune/sampler.hpp"

using namespace mhtune;

namespace {

const Density kPi = parse_density("normal:0,1");

Proposal imh(const char* spec) { return Proposal::independent(parse_density(spec)); }

}  // namespace

TEST_CASE("perfect independence proposal accepts every move") {
  for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
    ChainConfig cfg;
    cfg.n_steps = 5000;
    cfg.seed = seed;
    const auto m = run_chain(kPi, imh("normal:0,1"), cfg);
    CHECK(m.size() == 5000);
    CHECK(m.acceptance_rate() == 1.0);
  }
}

TEST_CASE("moments of a perfect chain") {
  ChainConfig cfg;
  cfg.n_steps = 100000;
  cfg.seed = 3;
  const auto m = run_chain(kPi, imh("normal:0,1"), cfg);
  CHECK(std::abs(m.mean()) <= 4.0 / std::sqrt(1e5));
  CHECK(std::abs(m.variance() - 1.0) <= 0.05);
}

TEST_CASE("a poor proposal still targets pi") {
  ChainConfig cfg;
  cfg.n_steps = 200000;
  cfg.seed = 9;
  cfg.x0 = 0.0;
  const auto m = run_chain(kPi, Proposal::random_walk(parse_density("normal:0,2.4")), cfg);
  CHECK(m.acceptance_rate() > 0.2);
  CHECK(m.acceptance_rate() < 0.8);
  CHECK(std::abs(m.mean()) <= 0.05);
  CHECK(std::abs(m.variance() - 1.0) <= 0.08);
}

TEST_CASE("seeded chains are reproducible and chains differ") {
  ChainConfig cfg;
  cfg.n_steps = 1000;
  cfg.seed = 42;
  const auto p = imh("normal:2,0.5");
  const auto a = run_chain(kPi, p, cfg, 3);
  const auto b = run_chain(kPi, p, cfg, 3);
  const auto c = run_chain(kPi, p, cfg, 4);
  CHECK(a.samples() == b.samples());
  CHECK(a.samples() != c.samples());
}

TEST_CASE("chain invariance: histogram chi-square against pi") {
  ChainConfig cfg;
  cfg.n_steps = 1000000;
  cfg.seed = 2024;
  const auto m = run_chain(kPi, imh("normal:0,1"), cfg);
  std::vector<double> edges;
  edges.push_back(-1e300);
  for (int i = 1; i < 50; ++i) edges.push_back(kPi.quantile(i / 50.0));
  edges.push_back(1e300);
  const auto h = m.histogram(edges);
  REQUIRE(h.size() == 50);
  double total = 0.0;
  double chi2 = 0.0;
  for (double p : h) {
    total += p;
    const double observed = p * 1e6;
    const double expected = 1e6 / 50.0;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
  // 99.9% quantile of chi-square with 49 degrees of freedom.
  CHECK(chi2 < 85.351);
}

TEST_CASE("histogram end bins absorb outliers") {
  const EmpiricalMeasure m({-5.0, 0.1, 0.2, 9.0}, 3);
  const std::vector<double> edges = {0.0, 0.15, 1.0};
  const auto h = m.histogram(edges);
  CHECK(h == std::vector<double>{0.5, 0.5});
  CHECK(m.acceptance_rate() == 1.0);
  CHECK(m.sorted_prefix(2) == std::vector<double>{-5.0, 0.1});
  CHECK(std::isnan(EmpiricalMeasure({1.0}, 0).acceptance_rate()));
}

TEST_CASE("chain preconditions") {
  ChainConfig cfg;
  cfg.x0 = -1.0;
  try {
    run_chain(parse_density("exponential:1"), imh("exponential:1"), cfg);
    FAIL("expected TargetZeroAtStart");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TargetZeroAtStart);
  }
  ChainConfig empty;
  empty.n_steps = 0;
  CHECK_THROWS_AS(empty.validate(), Error);
  ChainConfig none;
  none.n_chains = 0;
  CHECK_THROWS_AS(none.validate(), Error);
}

TEST_CASE("exceedance fractions shrink with n") {
  const std::vector<std::size_t> ns = {100, 1000, 10000};
  const auto c = convergence_curve(kPi, imh("normal:0,1"), 0.05, ns, 200, 17);
  REQUIRE(c.points.size() == 3);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    CHECK(c.points[i].fraction <= c.points[i - 1].fraction);
  }
  CHECK(c.points[0].fraction > 0.5);
}

TEST_CASE("the tuned proposal leaves the eps-ball less often") {
  const std::vector<std::size_t> ns = {1000};
  const auto good = convergence_curve(kPi, imh("normal:0,1"), 0.05, ns, 100, 5);
  const auto bad = convergence_curve(kPi, imh("normal:2,0.5"), 0.05, ns, 100, 5);
  CHECK(good.points[0].fraction < bad.points[0].fraction);
}

TEST_CASE("curves do not depend on the worker count") {
  const std::vector<std::size_t> ns = {50, 500};
  const auto p = imh("normal:1,1.5");
  CurveOptions serial;
  serial.serial = true;
  const auto a = convergence_curve(kPi, p, 0.1, ns, 40, 77, serial);
  for (int w : {1, 2, 5}) {
    CurveOptions o;
    o.workers = w;
    const auto b = convergence_curve(kPi, p, 0.1, ns, 40, 77, o);
    for (std::size_t i = 0; i < ns.size(); ++i) CHECK(a.points[i].exceeded == b.points[i].exceeded);
    CHECK(a.slope == b.slope);
  }
}

TEST_CASE("log-fraction slope") {
  const std::vector<std::size_t> ns = {100, 1000};
  const auto c = convergence_curve(kPi, imh("normal:0,1"), 0.6, ns, 20, 1);
  CHECK(c.points[0].exceeded == 0);
  CHECK_FALSE(c.slope.has_value());

  const std::vector<CurvePoint> pts = {{10, 50, 0.5}, {20, 0, 0.0}, {30, 5, 0.05}};
  const auto s = log_fraction_slope(pts);
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(std::log(0.1) / 20.0).epsilon(1e-12));
  const std::vector<CurvePoint> one = {{10, 1, 0.1}};
  CHECK_FALSE(log_fraction_slope(one).has_value());
}
