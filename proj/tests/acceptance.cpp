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

// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mhtune/bounds.hpp"
#include "mhtune/commands.hpp"
#include "mhtune/rate_oracle.hpp"
#include "mhtune/sampler.hpp"
#include "mhtune/tuning.hpp"

using namespace mhtune;

namespace {

const std::vector<std::string> kMeasures = {
    "normal:1,2",    "weibull:3,2", "uniform:0,1", "mixture:0.5*normal:5,2+0.5*normal:-3,1",
    "exponential:1", "gamma:3,2",
};

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d %-24s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> dirichlet(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) s += x = -std::log(rng.uniform_open());
  for (auto& x : v) x /= s;
  return v;
}

FiniteMhChain random_chain(Rng& rng, std::size_t n) {
  const auto pi = dirichlet(rng, n);
  Matrix j;
  for (std::size_t i = 0; i < n; ++i) j.push_back(dirichlet(rng, n));
  return FiniteMhChain::build(pi, j);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Tuning CSVs of the twelve runs, concatenated in run order.
std::string reproduction(int workers, bool& all_at_target, std::string& detail) {
  const Density pi = parse_density("normal:0,1");
  const auto family = ProposalFamily::parse("imh:normal:m,s");
  const auto grid = GridSpec::parse("m=-3:3:0.1,s=0.2:3:0.1");
  TuningOptions opts;
  opts.workers = workers;
  std::string all;
  all_at_target = true;
  int hits = 0;
  for (const auto& m : kMeasures) {
    for (auto method : {BoundMethod::lb_dv_phi, BoundMethod::lb_variational}) {
      const auto r = tune_single(pi, family, parse_density(m), method, grid, {}, opts);
      const bool hit = r.argmax == std::vector<double>{0.0, 1.0};
      hits += hit;
      all_at_target = all_at_target && hit;
      if (!hit) {
        detail += " " + m + "/" + std::string(to_string(method)) +
                  fmt("->(%g,%g)", r.argmax[0], r.argmax[1]);
      }
      all += tuning_csv(r);
    }
  }
  detail = std::to_string(hits) + "/12 at (0,1)" + detail;
  return all;
}

std::string ordering_csvs(int workers, double& good, double& bad) {
  const Density pi = parse_density("normal:0,1");
  const std::vector<std::size_t> ns = {1000};
  CurveOptions o;
  o.workers = workers;
  const auto a = convergence_curve(pi, Proposal::independent(parse_density("normal:0,1")), 0.05,
                                   ns, 200, 2024, o);
  const auto b = convergence_curve(pi, Proposal::independent(parse_density("normal:2,0.5")), 0.05,
                                   ns, 200, 2024, o);
  good = a.points[0].fraction;
  bad = b.points[0].fraction;
  return curve_csv(a) + curve_csv(b);
}

}  // namespace

int main() {
  // 1
  auto t0 = std::chrono::steady_clock::now();
  bool c1 = false;
  std::string d1;
  const std::string csv1 = reproduction(4, c1, d1);
  const double t1 = seconds_since(t0);
  report(1, "grid-search-argmax", c1, d1 + fmt(", %.0f s", t1));

  // 2
  {
    const Density pi = parse_density("normal:0,1");
    const std::vector<Proposal> props = {
        Proposal::independent(parse_density("normal:0,1")),
        Proposal::independent(parse_density("normal:0.3,1.2")),
        Proposal::independent(parse_density("normal:-0.5,2")),
        Proposal::random_walk(parse_density("normal:0,1")),
        Proposal::random_walk(parse_density("normal:0,2.5")),
    };
    double worst = 0;
    for (const auto& p : props) {
      for (auto m : {BoundMethod::lb_dv_phi, BoundMethod::lb_variational, BoundMethod::ub_mh}) {
        worst = std::max(worst, std::abs(compute_bound(m, pi, p, pi, {}).value));
      }
    }
    const double indep = std::abs(compute_bound(BoundMethod::ub_indep, pi, props[0], pi, {}).value);
    report(2, "zero-at-target", worst <= 1e-6 && indep <= 1e-6,
           fmt("max |value| %.3g, ub-indep at J=pi %.3g", worst, indep));
  }

  // 3
  {
    Rng rng(20260101);
    int bad = 0;
    double gap = 0, slack = 0;
    for (int i = 0; i < 20; ++i) {
      const auto chain = random_chain(rng, 3);
      for (int k = 0; k < 5; ++k) {
        const auto mu = dirichlet(rng, 3);
        const double dv = finite_rate_dv(chain, mu).value;
        const double ent = finite_rate_entropy(chain, mu).value;
        const auto b = finite_bounds(chain, mu, {});
        gap = std::max(gap, std::abs(dv - ent));
        slack = std::max({slack, b.lower() - dv, dv - b.upper()});
        bad += !(b.lower() <= dv + 1e-6 && dv <= b.upper() + 1e-6 && std::abs(dv - ent) <= 1e-6);
      }
    }
    report(3, "finite-sandwich", bad == 0,
           fmt("%.0f/100 violations, max duality gap %.3g, max violation %.3g", bad, gap,
               std::max(slack, 0.0)));
  }

  // 4
  {
    const Density pi = parse_density("normal:0,1");
    const std::vector<MhKernel> kernels = {
        MhKernel::with_default_domain(pi, Proposal::independent(parse_density("normal:0.5,1.5"))),
        MhKernel::with_default_domain(pi, Proposal::random_walk(parse_density("normal:0,1"))),
    };
    Rng rng(404);
    double db = 0, row = 0, k1 = 0;
    for (const auto& k : kernels) {
      for (int i = 0; i < 1000; ++i) {
        const double x = 6 * rng.uniform() - 3;
        const double y = 6 * rng.uniform() - 3;
        const double l = pi.pdf(x) * k.acceptance_density(x, y);
        const double r = pi.pdf(y) * k.acceptance_density(y, x);
        db = std::max(db, std::abs(l - r) / std::max(std::abs(l), std::abs(r)));
      }
      for (int i = 0; i < 100; ++i) {
        const double x = 8 * rng.uniform() - 4;
        row = std::max(row, std::abs(k.accepted_mass(x).value + k.rejection_prob(x).value - 1));
        k1 = std::max(k1, std::abs(k.apply([](double) { return 1.0; }, x).value - 1));
      }
    }
    report(4, "kernel-correctness", db <= 1e-10 && row <= 1e-8 && k1 <= 1e-8,
           fmt("detailed balance %.3g, row mass %.3g, K1 %.3g", db, row, k1));
  }

  // 5
  {
    Rng rng(55);
    int held = 0;
    std::vector<FiniteMhChain> chains;
    for (int i = 0; i < 5; ++i) chains.push_back(random_chain(rng, 3));
    for (const auto& c : chains) {
      for (double eps : {0.05, 0.1, 0.2}) held += check_boundary_reduction(c, eps).holds;
    }
    int monotone = 0;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const auto& c = chains[i % 5];
      std::vector<double> mu;
      do mu = dirichlet(rng, 3);
      while (tv_distance(mu, c.target) < 0.1);
      double prev = finite_rate_dv(c, mu).value;
      bool ok = true;
      for (int s = 9; s >= 0; --s) {
        const double t = s / 10.0;
        std::vector<double> mt(3);
        for (int k = 0; k < 3; ++k) mt[k] = t * mu[k] + (1 - t) * c.target[k];
        const double v = finite_rate_dv(c, mt).value;
        worst = std::max(worst, v - prev);
        ok = ok && v <= prev + 1e-6;
        prev = v;
      }
      monotone += ok;
    }
    report(5, "boundary-reduction", held == 15 && monotone == 100,
           fmt("%.0f/15 instances hold, %.0f/100 paths monotone, max rise %.3g", held, monotone,
               std::max(worst, 0.0)));
  }

  // 6
  double good = 0, bad = 0;
  const std::string csv6 = ordering_csvs(4, good, bad);
  {
    const double p = (good + bad) / 2;
    const double se = std::sqrt(p * (1 - p) * (2.0 / 200));
    const double z = se > 0 ? (bad - good) / se : (bad > good ? INFINITY : 0);
    report(6, "convergence-ordering", good < bad && z > 3,
           fmt("fraction N(0,1) %.3f vs N(2,0.25) %.3f, z = %.2f", good, bad, z));
  }

  // 7
  {
    const Density pi = parse_density("normal:0,1");
    const Proposal j = Proposal::independent(pi);
    BoundConfig a, b;
    b.clip = {1e-13, 1e13};
    const Density mu = parse_density(kMeasures[0]);
    const double va = compute_bound(BoundMethod::lb_dv_phi, pi, j, mu, a).value;
    const double vb = compute_bound(BoundMethod::lb_dv_phi, pi, j, mu, b).value;
    report(7, "clip-insensitivity", std::abs(va - vb) <= 1e-9,
           fmt("%.12f vs %.12f, diff %.3g", va, vb, std::abs(va - vb)));
  }

  // 8
  {
    bool unused = false;
    std::string ignored;
    t0 = std::chrono::steady_clock::now();
    const std::string csv1b = reproduction(1, unused, ignored);
    double g = 0, b = 0;
    const std::string csv6b = ordering_csvs(1, g, b);
    report(8, "determinism", csv1 == csv1b && csv6 == csv6b,
           std::string("grid CSVs ") + (csv1 == csv1b ? "identical" : "differ") +
               ", curve CSVs " + (csv6 == csv6b ? "identical" : "differ") +
               fmt(" (4 vs 1 workers, rerun %.0f s)", seconds_since(t0)));
  }

  return failures;
}
