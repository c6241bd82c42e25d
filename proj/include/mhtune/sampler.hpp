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


#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mhtune/density.hpp"
#include "mhtune/mh_kernel.hpp"

namespace mhtune {

struct ChainConfig {
  std::size_t n_steps = 1000;
  std::size_t n_chains = 1;
  /// Unset: draw X_0 from the target.
  std::optional<double> x0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// States X_0..X_{n-1} of one chain.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::vector<double> samples, std::size_t accepted);

  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  /// Accepted proposals over the n-1 transitions; NaN when n = 1.
  double acceptance_rate() const;
  double mean() const;
  double variance() const;
  /// Bin masses for edges e_0 < ... < e_k; mass outside goes to the end bins.
  std::vector<double> histogram(std::span<const double> edges) const;
  /// Sorted copy of the first `prefix` states.
  std::vector<double> sorted_prefix(std::size_t prefix) const;

 private:
  std::vector<double> samples_;
  std::size_t accepted_ = 0;
};

/// One MH chain of cfg.n_steps states driven by Rng::derive(cfg.seed,
/// chain_index). Accepts when log U < log Hastings ratio.
/// Throws Error(TargetZeroAtStart) when pi(x0) = 0.
EmpiricalMeasure run_chain(const Density& pi, const Proposal& proposal, const ChainConfig& cfg,
                           std::uint64_t chain_index = 0);

struct CurvePoint {
  std::size_t n = 0;
  std::size_t exceeded = 0;
  double fraction = 0.0;
};

struct ConvergenceCurve {
  std::vector<CurvePoint> points;
  /// Least-squares slope of log(fraction) against n over points with a
  /// nonzero count; unset with fewer than two such points.
  std::optional<double> slope;
};

struct CurveOptions {
  int workers = 0;
  bool serial = false;
  std::optional<double> x0;
};

/// For each n in `ns` (increasing), the fraction of `n_chains` chains whose
/// first n states are at Levy distance >= eps from pi. Chain c is the
/// prefix family of one run seeded by (seed, c).
ConvergenceCurve convergence_curve(const Density& pi, const Proposal& proposal, double eps,
                                   std::span<const std::size_t> ns, std::size_t n_chains,
                                   std::uint64_t seed, const CurveOptions& options = {});

std::optional<double> log_fraction_slope(std::span<const CurvePoint> points);

}  // namespace mhtune
