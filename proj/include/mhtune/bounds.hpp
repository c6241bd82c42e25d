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

#include <string>
#include <string_view>
#include <vector>

#include "mhtune/density.hpp"
#include "mhtune/mh_kernel.hpp"
#include "mhtune/quadrature.hpp"

namespace mhtune {

enum class BoundKind { upper, lower };
enum class BoundMethod { ub_indep, ub_mh, lb_dv_phi, lb_variational };

/// CLI names: ub-indep, ub-mh, lb-dv, lb-var.
std::string_view to_string(BoundMethod method);
BoundMethod parse_bound_method(std::string_view name);
BoundKind kind_of(BoundMethod method);

/// Clipping range for the Radon-Nikodym test function.
struct ClipConfig {
  double c_l = 1e-12;
  double c_u = 1e12;
  void validate() const;
  bool operator==(const ClipConfig&) const = default;
};

struct BoundConfig {
  QuadratureConfig quad;
  ClipConfig clip;
  /// When set, lb_variational throws DerivativeUnbounded instead of warning
  /// if dmu/dpi exceeds 1e12 on the probe grid.
  bool require_bounded_derivative = false;
};

struct BoundEstimate {
  double value = 0.0;
  BoundKind kind = BoundKind::lower;
  BoundMethod method = BoundMethod::lb_dv_phi;
  double error_estimate = 0.0;
  bool diverged = false;
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Target, proposal and test measure with the integration domain and the MH
/// kernel shared by all four bounds. The domain covers the truncation
/// intervals of pi, mu and the proposal's reach.
class BoundProblem {
 public:
  BoundProblem(Density pi, Proposal proposal, Density mu, const BoundConfig& cfg);

  const Density& pi() const { return pi_; }
  const Density& mu() const { return mu_; }
  const Proposal& proposal() const { return kernel_.proposal(); }
  const MhKernel& kernel() const { return kernel_; }
  const Interval& domain() const { return kernel_.domain(); }
  /// Truncation interval of mu alone, clipped to the domain.
  const Interval& mu_range() const { return mu_range_; }
  const BoundConfig& config() const { return cfg_; }
  /// Panel boundaries from the bulk of pi, mu and an independent proposal.
  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  Density pi_;
  Density mu_;
  BoundConfig cfg_;
  MhKernel kernel_;
  Interval mu_range_;
  std::vector<double> breaks_;
};

/// int int log(mu(y)/a(x,y)) mu(y) mu(x) dy dx. Upper bound; +inf when
/// a vanishes where mu(x)mu(y) > 0.
BoundEstimate ub_independent(const BoundProblem& problem);

/// Relative entropy of the MH kernel targeting mu (same proposal) with
/// respect to K, integrated against mu. Upper bound; +inf when r = 0 where
/// the mu-targeting kernel rejects with positive probability.
BoundEstimate ub_mh_kernel(const BoundProblem& problem);

/// -int log(K phi / phi) dmu with phi = dmu/dpi clipped to [c_l, c_u].
BoundEstimate lb_dv_phi(const BoundProblem& problem);

/// -log(1 - D/2) with
/// D = int int min{J(y|x)/pi(y), J(x|y)/pi(x)} (sqrt(mu(x)pi(y)) - sqrt(mu(y)pi(x)))^2 dy dx.
BoundEstimate lb_variational(const BoundProblem& problem);

enum class OverlapForm { symmetric, one_sided };

/// The double integral D of lb_variational. `one_sided` integrates
/// 2 min{...} sqrt(mu(x)pi(y)) (sqrt(mu(x)pi(y)) - sqrt(mu(y)pi(x))), which
/// has the same value before symmetrization.
IntegralResult variational_overlap(const BoundProblem& problem,
                                   OverlapForm form = OverlapForm::symmetric);

BoundEstimate compute_bound(BoundMethod method, const BoundProblem& problem);
BoundEstimate compute_bound(BoundMethod method, const Density& pi, const Proposal& proposal,
                            const Density& mu, const BoundConfig& cfg);

}  // namespace mhtune
