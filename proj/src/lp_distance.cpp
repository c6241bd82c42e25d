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


#include "mhtune/lp_distance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mhtune/error.hpp"

namespace mhtune {

namespace {

constexpr double kGridTail = 1e-15;

template <class Check>
double bisect(Check&& holds, double tol) {
  if (holds(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Mass of each of `n` cells of width h starting at lo; the end cells absorb
// the tails.
std::vector<double> bin_masses(const Density& d, double lo, double h, int n) {
  std::vector<double> m(static_cast<std::size_t>(n));
  double prev_cdf = 0.0;
  double prev_ccdf = 1.0;
  for (int i = 0; i < n; ++i) {
    const double edge = lo + (i + 1) * h;
    const double c = i + 1 == n ? 1.0 : d.cdf(edge);
    const double cc = i + 1 == n ? 0.0 : d.ccdf(edge);
    // Difference the smaller tail to keep relative accuracy.
    m[static_cast<std::size_t>(i)] = prev_cdf < 0.5 ? c - prev_cdf : prev_ccdf - cc;
    prev_cdf = c;
    prev_ccdf = cc;
  }
  return m;
}

}  // namespace

double levy_distance(const Cdf& f, const Cdf& g, std::span<const double> grid, double tol) {
  auto holds = [&](double eps) {
    for (double x : grid) {
      const double fx = f(x);
      const double gx = g(x);
      const double f_lo = f(x - eps);
      const double f_hi = f(x + eps);
      const double g_lo = g(x - eps);
      const double g_hi = g(x + eps);
      if (f_lo - eps > gx || gx > f_hi + eps) return false;
      if (g_lo - eps > fx || fx > g_hi + eps) return false;
    }
    return true;
  };
  return bisect(holds, tol);
}

double levy_distance(const Density& mu, const Density& nu, int resolution, double tol) {
  if (resolution < 100) {
    throw Error(ErrorCode::InvalidParameter, "resolution must be at least 100");
  }
  std::vector<double> grid;
  grid.reserve(2 * static_cast<std::size_t>(resolution));
  for (int i = 1; i < resolution; ++i) {
    const double p = static_cast<double>(i) / resolution;
    grid.push_back(mu.quantile(p));
    grid.push_back(nu.quantile(p));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return levy_distance([&](double x) { return mu.cdf(x); }, [&](double x) { return nu.cdf(x); },
                       grid, tol);
}

double levy_distance_empirical(std::span<const double> sorted_samples, const Density& nu,
                               double tol) {
  const std::size_t n = sorted_samples.size();
  if (n == 0) throw Error(ErrorCode::InvalidParameter, "empty sample");
  // Distinct jump points with the empirical cdf just before and at each.
  std::vector<double> at;
  std::vector<double> below;
  std::vector<double> upto;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted_samples[j] == sorted_samples[i]) ++j;
    at.push_back(sorted_samples[i]);
    below.push_back(static_cast<double>(i) / static_cast<double>(n));
    upto.push_back(static_cast<double>(j) / static_cast<double>(n));
    i = j;
  }
  auto holds = [&](double eps) {
    for (std::size_t k = 0; k < at.size(); ++k) {
      if (nu.cdf(at[k] - eps) > below[k] + eps) return false;
      if (nu.cdf(at[k] + eps) < upto[k] - eps) return false;
    }
    return true;
  };
  return bisect(holds, tol);
}

DistanceReport prokhorov_bracket(const Density& mu, const Density& nu, int resolution) {
  DistanceReport r;
  r.grid_resolution = resolution;
  r.levy = levy_distance(mu, nu, resolution);
  r.prokhorov_lower = r.levy;

  const double lo = std::min(mu.quantile(kGridTail), nu.quantile(kGridTail));
  const double hi = std::max(mu.upper_quantile(kGridTail), nu.upper_quantile(kGridTail));
  const double h = (hi - lo) / resolution;
  r.bin_width = h;
  const double outside = mu.cdf(lo) + mu.ccdf(hi) + nu.cdf(lo) + nu.ccdf(hi);

  const auto p = bin_masses(mu, lo, h, resolution);
  const auto q = bin_masses(nu, lo, h, resolution);
  // Monotone coupling of the binned measures; mass moved by d cells.
  std::vector<double> moved(static_cast<std::size_t>(resolution), 0.0);
  std::size_t i = 0;
  std::size_t j = 0;
  double ri = p[0];
  double rj = q[0];
  const std::size_t n = p.size();
  while (i < n && j < n) {
    const double m = std::min(ri, rj);
    moved[i > j ? i - j : j - i] += m;
    ri -= m;
    rj -= m;
    if (ri <= 0.0 && ++i < n) ri = p[i];
    if (rj <= 0.0 && ++j < n) rj = q[j];
  }
  // Ky Fan: min over thresholds D of max(D h, mass moved farther than D h).
  double beyond = 0.0;
  double ky_fan = 1.0;
  for (std::size_t d = n; d-- > 0;) {
    ky_fan = std::min(ky_fan, std::max(static_cast<double>(d) * h, beyond));
    beyond += moved[d];
  }
  r.prokhorov_upper = std::min(1.0, ky_fan + h + outside);
  // The Levy bisection reports the top of its final bracket, up to 1e-6 high.
  r.prokhorov_upper = std::max(r.prokhorov_upper, r.prokhorov_lower);
  return r;
}

}  // namespace mhtune
