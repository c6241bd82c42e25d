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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mhtune/density.hpp"
#include "mhtune/error.hpp"
#include "mhtune/quadrature.hpp"
#include "mhtune/rng.hpp"
#include "test_util.hpp"

using namespace mhtune;

namespace {

const std::vector<std::string> kFamilies = {
    "normal:0,1",  "normal:1,2",    "uniform:0,1",   "uniform:-2,3", "exponential:1",
    "exponential:3", "gamma:3,2",   "gamma:1.5,1",   "weibull:3,2",  "weibull:1.5,1",
    "mixture:0.5*normal:5,2+0.5*normal:-3,1",
};

// Kolmogorov statistic sqrt(n) D_n, with the asymptotic 1e-3 critical value 1.9495.
double ks_statistic(std::vector<double> xs, const Density& d) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = d.cdf(xs[i]);
    dmax = std::max({dmax, (i + 1) / n - f, f - i / n});
  }
  return std::sqrt(n) * dmax;
}

}  // namespace

TEST_CASE("pdf reference values") {
  CHECK(parse_density("normal:0,1").pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(parse_density("uniform:0,1").pdf(0.5) == 1.0);
  CHECK(parse_density("uniform:0,1").pdf(1.5) == 0.0);
  // 2^3 e^-2 / Gamma(3).
  CHECK(parse_density("gamma:3,2").pdf(1.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("radon-nikodym reference values") {
  const Density pi = parse_density("normal:0,1");
  CHECK(radon_nikodym(pi, pi)(0.3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(radon_nikodym(pi, pi)(-4.0) == doctest::Approx(1.0).epsilon(1e-15));
  // scipy: 1 / norm.pdf(0.5)
  CHECK(radon_nikodym(parse_density("uniform:0,1"), pi)(0.5) ==
        doctest::Approx(2.840381951811686).epsilon(1e-13));
  CHECK(radon_nikodym(parse_density("normal:1,2"), pi)(0.0) ==
        doctest::Approx(0.5 * std::exp(-0.125)).epsilon(1e-14));
  CHECK_THROWS_AS(radon_nikodym(pi, parse_density("uniform:0,1")), Error);
}

TEST_CASE("parse and spec round trip") {
  for (const auto& s : kFamilies) {
    const Density d = parse_density(s);
    const Density again = parse_density(d.spec());
    CHECK(again.spec() == d.spec());
    CHECK(again.pdf(0.7) == d.pdf(0.7));
  }
  CHECK(parse_density("exp:2").family() == Family::exponential);
  CHECK_THROWS_AS(parse_density("normal:0"), Error);
  CHECK_THROWS_AS(parse_density("normal:0,-1"), Error);
  CHECK_THROWS_AS(parse_density("cauchy:0,1"), Error);
  CHECK_THROWS_AS(parse_density("mixture:0.3*normal:0,1+0.3*normal:1,1"), Error);
  CHECK_THROWS_AS(parse_density("uniform:1,1"), Error);
}

TEST_CASE("density invariants across families") {
  QuadratureConfig q;
  for (const auto& s : kFamilies) {
    CAPTURE(s);
    const Density d = parse_density(s);
    const Density ds[] = {d};
    const Interval t = truncation_interval(ds, q.tail_mass);
    const auto breaks = density_breakpoints(d, q.tail_mass);

    const auto mass = integrate_1d([&](double x) { return d.pdf(x); }, t, q, breaks);
    CHECK(std::abs(mass.value - 1.0) <= 1e-8);

    CHECK(d.cdf(t.lo) <= 1e-10);
    CHECK(d.cdf(t.hi) >= 1.0 - 1e-10);
    const Interval sup = d.support();
    if (std::isfinite(sup.lo)) CHECK(d.pdf(sup.lo - 1.0) == 0.0);
    if (std::isfinite(sup.hi)) CHECK(d.pdf(sup.hi + 1.0) == 0.0);

    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = t.lo + (t.hi - t.lo) * i / 1000.0;
      const double p = d.pdf(x);
      CHECK(p >= 0.0);
      if (p > 0.0) CHECK(testutil::rel_close(std::exp(d.log_pdf(x)), p, 1e-12));
      const double c = d.cdf(x);
      CHECK(c >= prev);
      prev = c;
    }

    for (int i = 1; i <= 50; ++i) {
      const double x = t.lo + (t.hi - t.lo) * i / 51.0;
      const auto part = integrate_1d([&](double z) { return d.pdf(z); }, {t.lo, x}, q, breaks);
      CHECK(std::abs(part.value - d.cdf(x)) <= 1e-6);
    }

    for (double p : {1e-9, 0.01, 0.3, 0.5, 0.9, 0.999}) {
      CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
      CHECK(d.ccdf(d.upper_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("samples pass a Kolmogorov-Smirnov test") {
  for (const auto& s : kFamilies) {
    CAPTURE(s);
    const Density d = parse_density(s);
    Rng rng(20260101);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = d.sample(rng);
    CHECK(ks_statistic(xs, d) < 1.9495);
  }
}

TEST_CASE("radon-nikodym times pi reproduces mu") {
  const Density pi = parse_density("normal:0,1");
  for (const auto& s : kFamilies) {
    const Density mu = parse_density(s);
    if (!pi.support().contains(mu.support())) continue;
    const auto rn = radon_nikodym(mu, pi);
    for (int i = 0; i <= 200; ++i) {
      const double x = -6.0 + 12.0 * i / 200.0;
      CHECK(testutil::rel_close(rn(x) * pi.pdf(x), mu.pdf(x), 4e-16));
    }
  }
}

TEST_CASE("effective support contains the truncation interval") {
  for (const auto& s : kFamilies) {
    const Density d = parse_density(s);
    const Density ds[] = {d};
    const Interval eff = d.effective_support();
    CHECK(eff.contains(truncation_interval(ds, 1e-12)));
    CHECK(d.pdf(eff.lo) >= 0.0);
  }
}
