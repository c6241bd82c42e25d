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
#include <span>
#include <vector>

#include "mhtune/bounds.hpp"

namespace mhtune {

using Matrix = std::vector<std::vector<double>>;

/// Metropolis-Hastings chain on states 0..n-1 (2 <= n <= 5). The kernel
/// keeps the rejected mass on the diagonal.
struct FiniteMhChain {
  std::vector<double> target;
  Matrix proposal;
  Matrix kernel;

  /// Throws Error(InvalidParameter) unless pi > 0 sums to 1 and J is
  /// row-stochastic, both within 1e-12.
  static FiniteMhChain build(std::vector<double> pi, Matrix proposal);
  std::size_t size() const { return target.size(); }
};

struct FiniteRateValue {
  double value = 0.0;
  /// Donsker-Varadhan maximizer with u[0] = 1; empty for the entropy solver.
  std::vector<double> maximizer_u;
  /// Minimizing kernel q of the entropy solver; empty for the DV solver.
  Matrix optimal_kernel;
  std::size_t iterations = 0;
  bool converged = true;
};

struct DvSolverConfig {
  double grid_lo = -6.0;
  double grid_hi = 6.0;
  double grid_step = 0.25;
  int starts = 8;
  double tolerance = 1e-10;
  /// Refinement may leave the coarse box up to |log u| <= log_cap.
  double log_cap = 60.0;
  int max_sweeps = 20000;
};

/// sup over u > 0 of -sum_x mu_x log((Ku)_x / u_x): coarse grid over log u,
/// then coordinate-wise golden-section ascent from the best grid points.
/// Throws Error(UnreachableSupport) when no mu-invariant kernel is dominated
/// by K (the supremum is then +inf).
FiniteRateValue finite_rate_dv(const FiniteMhChain& chain, std::span<const double> mu,
                               const DvSolverConfig& cfg = {});

/// inf over kernels q with mu q = mu of sum_x mu_x R(q_x || K_x), solved as
/// the I-projection of mu_x K_xy onto couplings with both marginals mu.
FiniteRateValue finite_rate_entropy(const FiniteMhChain& chain, std::span<const double> mu,
                                    double tolerance = 1e-14);

/// True when some kernel q << K leaves mu invariant.
bool reachable(const FiniteMhChain& chain, std::span<const double> mu);

/// The four continuous-space bounds with sums in place of integrals. Upper
/// bounds may be +inf.
struct FiniteBounds {
  double ub_indep = 0.0;
  double ub_mh = 0.0;
  double lb_dv_phi = 0.0;
  double lb_variational = 0.0;

  double lower() const;
  double upper() const;
};

FiniteBounds finite_bounds(const FiniteMhChain& chain, std::span<const double> mu,
                           const ClipConfig& clip = {});

/// Total-variation distance.
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace mhtune
