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

#include <functional>
#include <span>
#include <vector>

#include "mhtune/density.hpp"

namespace mhtune {

struct QuadratureConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  int max_subdivisions = 2000;
  /// Probability mass each density may lose to truncation of infinite supports.
  double tail_mass = 1e-12;

  /// Throws Error(InvalidParameter) when a tolerance is not positive.
  void validate() const;
  double tolerance(double value) const;
  bool operator==(const QuadratureConfig&) const = default;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  long evaluations = 0;
};

using Integrand = std::function<double(double)>;
using Integrand2d = std::function<double(double, double)>;
/// Extra panel boundaries for the inner integral of a 2d call, given the
/// outer coordinate.
using InnerBreakpoints = std::function<std::vector<double>(double)>;

/// Adaptive Gauss-Kronrod (7/15) integration of f over a finite interval.
///
/// The interval is first split at `breakpoints` (values outside are ignored),
/// then the panel with the largest error estimate is bisected until the total
/// estimate meets `cfg.tolerance(value)` or `max_subdivisions` panels exist;
/// in the latter case the best estimate is returned with converged = false.
/// Panel sums are reduced in left-to-right order so the result does not
/// depend on the refinement history.
///
/// Throws Error(NonFiniteIntegrand) if f returns NaN or an infinity at a node.
IntegralResult integrate_1d(const Integrand& f, Interval range, const QuadratureConfig& cfg,
                            std::span<const double> breakpoints = {});

/// Iterated integral over [x.lo,x.hi] x [y.lo,y.hi], inner over y. The error
/// estimate adds the outer estimate to the worst inner estimate scaled by
/// the outer width.
IntegralResult integrate_2d(const Integrand2d& f, Interval x, Interval y,
                            const QuadratureConfig& cfg,
                            std::span<const double> outer_breakpoints = {},
                            const InnerBreakpoints& inner_breakpoints = {});

/// Smallest interval containing, for every density, the central region that
/// leaves tail_mass/2 of its probability on each side. Finite support ends
/// are kept exactly.
Interval truncation_interval(std::span<const Density> densities, double tail_mass);

/// Panel boundaries that separate the bulk of a density from its tails:
/// truncation ends, quartiles, and finite support ends.
std::vector<double> density_breakpoints(const Density& d, double tail_mass);

}  // namespace mhtune
