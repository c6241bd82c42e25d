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

#include "mhtune/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mhtune/error.hpp"

namespace mhtune {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
};

void check_finite(double v, double x) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteIntegrand,
                "integrand returned " + std::to_string(v) + " at x = " + std::to_string(x));
  }
}

Panel gauss_kronrod(const Integrand& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 7> f1{}, f2{};
  const double fc = f(center);
  check_finite(fc, center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    const double v1 = f(center - dx);
    const double v2 = f(center + dx);
    check_finite(v1, center - dx);
    check_finite(v2, center + dx);
    f1[jtw] = v1;
    f2[jtw] = v2;
    resg += kWg[j] * (v1 + v2);
    resk += kWgk[jtw] * (v1 + v2);
    resabs += kWgk[jtw] * (std::abs(v1) + std::abs(v2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    const double v1 = f(center - dx);
    const double v2 = f(center + dx);
    check_finite(v1, center - dx);
    check_finite(v2, center + dx);
    f1[jtwm1] = v1;
    f2[jtwm1] = v2;
    resk += kWgk[jtwm1] * (v1 + v2);
    resabs += kWgk[jtwm1] * (std::abs(v1) + std::abs(v2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  }
  const double result = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) err = std::max(eps * 50.0 * resabs, err);
  return {a, b, result, err};
}

bool by_error(const Panel& l, const Panel& r) { return l.error < r.error; }

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_mass > 0.0) || tail_mass >= 1.0) {
    throw Error(ErrorCode::InvalidParameter, "quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) {
    throw Error(ErrorCode::InvalidParameter, "quad.max_subdivisions must be >= 1");
  }
}

double QuadratureConfig::tolerance(double value) const {
  return std::max(abs_tol, rel_tol * std::abs(value));
}

IntegralResult integrate_1d(const Integrand& f, Interval range, const QuadratureConfig& cfg,
                            std::span<const double> breakpoints) {
  if (!range.finite()) {
    throw Error(ErrorCode::InvalidParameter, "integrate_1d needs a finite interval");
  }
  if (!(range.lo < range.hi)) return {0.0, 0.0, true, 0};

  std::vector<double> edges{range.lo, range.hi};
  for (double b : breakpoints) {
    if (b > range.lo && b < range.hi) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Panel> heap;
  heap.reserve(static_cast<std::size_t>(cfg.max_subdivisions) + edges.size());
  std::vector<Panel> frozen;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    heap.push_back(gauss_kronrod(f, edges[i], edges[i + 1]));
  }
  long evaluations = 15 * static_cast<long>(heap.size());
  std::make_heap(heap.begin(), heap.end(), by_error);

  double total = 0.0, total_err = 0.0;
  for (const auto& p : heap) {
    total += p.value;
    total_err += p.error;
  }
  bool converged = true;
  while (total_err > cfg.tolerance(total)) {
    if (heap.empty()) {
      converged = false;
      break;
    }
    if (static_cast<int>(heap.size() + frozen.size()) >= cfg.max_subdivisions) {
      converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel at floating-point resolution; its error cannot be reduced.
      frozen.push_back(worst);
      continue;
    }
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }

  heap.insert(heap.end(), frozen.begin(), frozen.end());
  std::sort(heap.begin(), heap.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  IntegralResult out;
  for (const auto& p : heap) {
    out.value += p.value;
    out.error_estimate += p.error;
  }
  out.converged = converged && out.error_estimate <= cfg.tolerance(out.value);
  out.evaluations = evaluations;
  return out;
}

IntegralResult integrate_2d(const Integrand2d& f, Interval x, Interval y,
                            const QuadratureConfig& cfg, std::span<const double> outer_breakpoints,
                            const InnerBreakpoints& inner_breakpoints) {
  double worst_inner = 0.0;
  bool inner_ok = true;
  long evaluations = 0;
  const auto outer = integrate_1d(
      [&](double xv) {
        std::vector<double> br;
        if (inner_breakpoints) br = inner_breakpoints(xv);
        const auto inner = integrate_1d([&](double yv) { return f(xv, yv); }, y, cfg, br);
        worst_inner = std::max(worst_inner, inner.error_estimate);
        inner_ok = inner_ok && inner.converged;
        evaluations += inner.evaluations;
        return inner.value;
      },
      x, cfg, outer_breakpoints);
  IntegralResult out;
  out.value = outer.value;
  out.error_estimate = outer.error_estimate + worst_inner * x.width();
  out.converged = outer.converged && inner_ok;
  out.evaluations = evaluations;
  return out;
}

Interval truncation_interval(std::span<const Density> densities, double tail_mass) {
  if (densities.empty()) {
    throw Error(ErrorCode::InvalidParameter, "truncation_interval needs at least one density");
  }
  Interval out{kInf, -kInf};
  for (const auto& d : densities) {
    const Interval sup = d.support();
    const double lo = std::isfinite(sup.lo) ? sup.lo : d.quantile(0.5 * tail_mass);
    const double hi = std::isfinite(sup.hi) ? sup.hi : d.upper_quantile(0.5 * tail_mass);
    out = hull(out, {lo, hi});
  }
  return out;
}

std::vector<double> density_breakpoints(const Density& d, double tail_mass) {
  std::vector<double> out;
  const Interval sup = d.support();
  out.push_back(std::isfinite(sup.lo) ? sup.lo : d.quantile(0.5 * tail_mass));
  out.push_back(std::isfinite(sup.hi) ? sup.hi : d.upper_quantile(0.5 * tail_mass));
  for (double p : {0.25, 0.5, 0.75}) out.push_back(d.quantile(p));
  for (const auto& c : d.components()) {
    const auto inner = density_breakpoints(c.density, tail_mass);
    out.insert(out.end(), inner.begin(), inner.end());
  }
  return out;
}

}  // namespace mhtune
