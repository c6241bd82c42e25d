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
#include <limits>
#include <vector>

#include "doctest.h"
#include "mhtune/error.hpp"
#include "mhtune/tuning.hpp"
#include "test_util.hpp"

using namespace mhtune;

namespace {

const Density kPi = parse_density("normal:0,1");
const ProposalFamily kImh = ProposalFamily::parse("imh:normal:m,s");

}  // namespace

TEST_CASE("grid specs") {
  const GridSpec g = GridSpec::parse("m=-3:3:0.1,s=0.2:3:0.1");
  CHECK(g.size() == 61 * 29);
  const auto pts = g.points();
  CHECK(pts.size() == 1769);
  CHECK(pts.front() == std::vector<double>{-3.0, 0.2});
  CHECK(pts.back() == std::vector<double>{3.0, 3.0});
  CHECK(pts[30 * 29 + 8] == std::vector<double>{0.0, 1.0});
  CHECK(std::signbit(pts[30 * 29][0]) == false);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1] < pts[i]);
  CHECK(GridSpec::parse(g.spec()).points() == pts);
  CHECK(GridSpec::parse("s=1:1:0.5").size() == 1);
  CHECK_THROWS_AS(GridSpec::parse("m=1:0:0.1"), Error);
  CHECK_THROWS_AS(GridSpec::parse("m=0:1:0"), Error);
  CHECK_THROWS_AS(GridSpec::parse("m=0:1"), Error);
  CHECK_THROWS_AS(GridSpec::parse("m=0:1:0.1,m=0:1:0.1"), Error);
  CHECK_THROWS_AS(GridSpec::parse("m=a:1:0.1"), Error);
}

TEST_CASE("singleton grid") {
  const auto r = tune_single(kPi, kImh, parse_density("normal:1,2"), BoundMethod::lb_dv_phi,
                             GridSpec::parse("m=2:2:1,s=0.5:0.5:1"), {});
  CHECK(r.argmax == std::vector<double>{2.0, 0.5});
  CHECK(r.ties.size() == 1);
}

TEST_CASE("tuning rejects upper bounds and all-diverged grids") {
  const Density mu = parse_density("normal:1,2");
  const GridSpec g = GridSpec::parse("m=0:0:1,s=1:1:1");
  try {
    tune_single(kPi, kImh, mu, BoundMethod::ub_mh, g, {});
    FAIL("expected NotALowerBound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotALowerBound);
  }
  try {
    tune_single(kPi, kImh, mu, BoundMethod::lb_dv_phi, GridSpec::parse("m=0:1:0.5,s=-1:-0.5:0.5"),
                {});
    FAIL("expected AllDiverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllDiverged);
  }
  CHECK_THROWS_AS(tune_single(kPi, kImh, mu, BoundMethod::lb_dv_phi,
                              GridSpec::parse("m=0:1:0.5"), {}),
                  Error);
}

TEST_CASE("single measure reduces tune_multi to tune_single") {
  const Density mu = parse_density("weibull:3,2");
  const GridSpec g = GridSpec::parse("m=-0.4:0.4:0.2,s=0.8:1.2:0.2");
  const auto a = tune_single(kPi, kImh, mu, BoundMethod::lb_variational, g, {});
  const Density ms[] = {mu};
  const auto b = tune_multi(kPi, kImh, ms, BoundMethod::lb_variational, g, 0.0, {});
  CHECK(a.values == b.values);
  CHECK(a.argmax == b.argmax);
}

TEST_CASE("minimum over measures") {
  const GridSpec g = GridSpec::parse("m=-0.5:0.5:0.25,s=0.75:1.25:0.25");
  const Density ms[] = {parse_density("normal:1,2"), parse_density("normal:0.2,1")};
  const auto r = tune_multi(kPi, kImh, ms, BoundMethod::lb_variational, g, 0.0, {});
  REQUIRE(r.per_measure_values.size() == 2);
  bool dominated_everywhere = true;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    CHECK(r.values[i] <= r.per_measure_values[0][i]);
    CHECK(r.values[i] <= r.per_measure_values[1][i]);
    dominated_everywhere = dominated_everywhere &&
                           r.per_measure_values[1][i] <= r.per_measure_values[0][i];
  }
  // N(0.2,1) is closer to pi than N(1,4) at every grid point.
  CHECK(dominated_everywhere);
  CHECK(r.values == r.per_measure_values[1]);
}

TEST_CASE("serial and parallel evaluation are bit-identical") {
  const GridSpec g = GridSpec::parse("m=-0.6:0.6:0.2,s=0.6:1.4:0.2");
  const Density mu = parse_density("gamma:3,2");
  TuningOptions serial;
  serial.serial = true;
  const auto a = tune_single(kPi, kImh, mu, BoundMethod::lb_dv_phi, g, {}, serial);
  for (int w : {1, 2, 3}) {
    TuningOptions par;
    par.workers = w;
    const auto b = tune_single(kPi, kImh, mu, BoundMethod::lb_dv_phi, g, {}, par);
    CHECK(a.values == b.values);
    CHECK(a.ties == b.ties);
  }
}

TEST_CASE("objective signs") {
  const GridSpec g = GridSpec::parse("m=-3:3:1.5,s=0.2:3:0.7");
  for (const auto& m : testutil::six_measures()) {
    const auto r = tune_single(kPi, kImh, parse_density(m), BoundMethod::lb_variational, g, {});
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (!r.excluded[i]) CHECK(r.values[i] >= 0.0);
    }
  }
  const auto d = tune_single(kPi, kImh, parse_density("normal:1,2"), BoundMethod::lb_dv_phi,
                             GridSpec::parse("m=-3:0:3,s=0.2:1:0.8"), {});
  for (double v : d.values) CHECK(std::isfinite(v));
  CHECK(d.diverged_count == 0);
}

TEST_CASE("refining around the coarse argmax stays within one coarse step") {
  const Density mu = parse_density("normal:1,2");
  const auto coarse = tune_single(kPi, kImh, mu, BoundMethod::lb_variational,
                                  GridSpec::parse("m=-3:3:0.2,s=0.2:3:0.2"), {});
  const double m = coarse.argmax[0];
  const double s = coarse.argmax[1];
  GridSpec fine;
  fine.axes = {{"m", m - 0.2, m + 0.2, 0.1}, {"s", s - 0.2, s + 0.2, 0.1}};
  const auto refined = tune_single(kPi, kImh, mu, BoundMethod::lb_variational, fine, {});
  CHECK(std::abs(refined.argmax[0] - m) <= 0.2 + 1e-12);
  CHECK(std::abs(refined.argmax[1] - s) <= 0.2 + 1e-12);
}

TEST_CASE("eps band check warns without aborting") {
  const GridSpec g = GridSpec::parse("m=0:0:1,s=1:1:1");
  const Density ms[] = {parse_density("normal:1,2")};
  const auto r = tune_multi(kPi, kImh, ms, BoundMethod::lb_variational, g, 0.01, {});
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.argmax == std::vector<double>{0.0, 1.0});
}

TEST_CASE("boundary reduction") {
  const auto sym = FiniteMhChain::build({0.5, 0.5}, {{0.3, 0.7}, {0.7, 0.3}});
  const auto rep = check_boundary_reduction(sym, 0.2);
  CHECK(rep.holds);
  CHECK(rep.exterior_count > 0);
  CHECK(rep.shell_count >= rep.exterior_count);

  // Direct enumeration of mu = (t, 1 - t).
  double ext = std::numeric_limits<double>::infinity();
  double shell = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 10000; ++i) {
    const double t = i / 10000.0;
    const std::vector<double> mu = {t, 1 - t};
    const double d = std::abs(t - 0.5);
    if (d < 0.2 - 1e-3) continue;
    const double rate = finite_rate_dv(sym, mu).value;
    if (d >= 0.2) ext = std::min(ext, rate);
    if (std::abs(d - 0.2) <= 1e-3) shell = std::min(shell, rate);
  }
  CHECK(ext >= shell - 1e-6);

  const auto vacuous = check_boundary_reduction(sym, 0.6);
  CHECK(vacuous.holds);
  CHECK(vacuous.exterior_count == 0);
}
