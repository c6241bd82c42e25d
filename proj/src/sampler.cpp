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


#include "mhtune/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "mhtune/error.hpp"
#include "mhtune/lp_distance.hpp"
#include "mhtune/parallel.hpp"
#include "mhtune/rng.hpp"

namespace mhtune {

namespace {

std::vector<unsigned char> exceedances(const Density& pi, const Proposal& proposal, double eps,
                                       std::span<const std::size_t> ns, const ChainConfig& cfg,
                                       std::uint64_t chain) {
  const EmpiricalMeasure run = run_chain(pi, proposal, cfg, chain);
  std::vector<unsigned char> out(ns.size());
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const auto sorted = run.sorted_prefix(ns[k]);
    out[k] = levy_distance_empirical(sorted, pi) >= eps ? 1 : 0;
  }
  return out;
}

}  // namespace

void ChainConfig::validate() const {
  if (n_steps < 1 || n_chains < 1) {
    throw Error(ErrorCode::InvalidParameter, "chains need n_steps >= 1 and n_chains >= 1");
  }
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> samples, std::size_t accepted)
    : samples_(std::move(samples)), accepted_(accepted) {}

double EmpiricalMeasure::acceptance_rate() const {
  if (samples_.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(accepted_) / static_cast<double>(samples_.size() - 1);
}

double EmpiricalMeasure::mean() const {
  double s = 0.0;
  for (double x : samples_) s += x;
  return s / static_cast<double>(samples_.size());
}

double EmpiricalMeasure::variance() const {
  const double m = mean();
  double s = 0.0;
  for (double x : samples_) s += (x - m) * (x - m);
  return s / static_cast<double>(samples_.size());
}

std::vector<double> EmpiricalMeasure::histogram(std::span<const double> edges) const {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw Error(ErrorCode::InvalidParameter, "histogram needs at least two sorted edges");
  }
  const std::size_t bins = edges.size() - 1;
  std::vector<std::size_t> count(bins, 0);
  for (double x : samples_) {
    const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
    ++count[static_cast<std::size_t>(it - (edges.begin() + 1))];
  }
  std::vector<double> mass(bins);
  const double n = static_cast<double>(samples_.size());
  for (std::size_t i = 0; i < bins; ++i) mass[i] = static_cast<double>(count[i]) / n;
  return mass;
}

std::vector<double> EmpiricalMeasure::sorted_prefix(std::size_t prefix) const {
  prefix = std::min(prefix, samples_.size());
  std::vector<double> out(samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(prefix));
  std::sort(out.begin(), out.end());
  return out;
}

EmpiricalMeasure run_chain(const Density& pi, const Proposal& proposal, const ChainConfig& cfg,
                           std::uint64_t chain_index) {
  cfg.validate();
  Rng rng = Rng::derive(cfg.seed, chain_index);
  double x = cfg.x0 ? *cfg.x0 : pi.sample(rng);
  double lpx = pi.log_pdf(x);
  if (!(lpx > -std::numeric_limits<double>::infinity())) {
    throw Error(ErrorCode::TargetZeroAtStart, "target density is zero at the initial state");
  }
  std::vector<double> states;
  states.reserve(cfg.n_steps);
  states.push_back(x);
  std::size_t accepted = 0;
  for (std::size_t i = 1; i < cfg.n_steps; ++i) {
    const double y = proposal.sample(x, rng);
    const double lpy = pi.log_pdf(y);
    // log pi(y) J(x|y) - log pi(x) J(y|x); J(y|x) > 0 since y was drawn from it.
    const double num = lpy + proposal.log_pdf(x, y);
    const double den = lpx + proposal.log_pdf(y, x);
    const double log_ratio = num - den;
    const double log_u = std::log(rng.uniform_open());
    if (num > -std::numeric_limits<double>::infinity() && log_u < log_ratio) {
      x = y;
      lpx = lpy;
      ++accepted;
    }
    states.push_back(x);
  }
  return EmpiricalMeasure(std::move(states), accepted);
}

ConvergenceCurve convergence_curve(const Density& pi, const Proposal& proposal, double eps,
                                   std::span<const std::size_t> ns, std::size_t n_chains,
                                   std::uint64_t seed, const CurveOptions& options) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParameter, "eps must be positive");
  if (ns.empty() || ns.front() < 1 || !std::is_sorted(ns.begin(), ns.end()) ||
      std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
    throw Error(ErrorCode::InvalidParameter, "ns must be positive and strictly increasing");
  }
  ChainConfig cfg;
  cfg.n_steps = ns.back();
  cfg.n_chains = n_chains;
  cfg.x0 = options.x0;
  cfg.seed = seed;
  cfg.validate();

  std::vector<std::vector<unsigned char>> hits(n_chains);
  if (options.serial) {
    for (std::size_t c = 0; c < n_chains; ++c) hits[c] = exceedances(pi, proposal, eps, ns, cfg, c);
  } else {
    std::vector<std::exception_ptr> errors(n_chains);
    const long long count = static_cast<long long>(n_chains);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(options.workers))
    for (long long c = 0; c < count; ++c) {
      const auto idx = static_cast<std::size_t>(c);
      try {
        hits[idx] = exceedances(pi, proposal, eps, ns, cfg, idx);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ConvergenceCurve curve;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    CurvePoint p;
    p.n = ns[k];
    for (const auto& h : hits) p.exceeded += h[k];
    p.fraction = static_cast<double>(p.exceeded) / static_cast<double>(n_chains);
    curve.points.push_back(p);
  }
  curve.slope = log_fraction_slope(curve.points);
  return curve;
}

std::optional<double> log_fraction_slope(std::span<const CurvePoint> points) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (const auto& p : points) {
    if (p.exceeded == 0) continue;
    const double x = static_cast<double>(p.n);
    const double y = std::log(p.fraction);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::nullopt;
  const double md = static_cast<double>(m);
  const double denom = md * sxx - sx * sx;
  if (!(denom > 0.0)) return std::nullopt;
  return (md * sxy - sx * sy) / denom;
}

}  // namespace mhtune
