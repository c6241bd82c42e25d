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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhtune/density.hpp"
#include "mhtune/quadrature.hpp"
#include "mhtune/rng.hpp"

namespace mhtune {

enum class ProposalKind { independent, random_walk, general };

/// A proposal J(y|x) at fixed hyperparameters.
///
/// independent: J(y|x) = base(y).  random_walk: J(y|x) = base(y - x).
/// general: user-supplied conditional log-density and sampler.
class Proposal {
 public:
  using ConditionalLogPdf = std::function<double(double y, double x)>;
  using ConditionalSampler = std::function<double(double x, Rng&)>;

  static Proposal independent(Density base);
  static Proposal random_walk(Density increment);
  static Proposal general(ConditionalLogPdf log_pdf, ConditionalSampler sampler,
                          std::string label = "general");

  /// log J(y|x).
  double log_pdf(double y, double x) const;
  double pdf(double y, double x) const { return std::exp(log_pdf(y, x)); }
  double sample(double x, Rng& rng) const;

  ProposalKind kind() const { return kind_; }
  /// The proposal or increment density; unset for general proposals.
  const std::optional<Density>& base() const { return base_; }
  /// True when J(y|x) = J(x|y) identically.
  bool symmetric() const;
  /// Panel boundaries separating the bulk of J(.|x) from its tails.
  std::vector<double> breakpoints(double x, double tail_mass) const;
  /// Where the chain can move from states in `states`.
  Interval reach(Interval states, double tail_mass) const;
  std::string spec() const;

 private:
  ProposalKind kind_ = ProposalKind::independent;
  std::optional<Density> base_;
  ConditionalLogPdf log_pdf_;
  ConditionalSampler sampler_;
  std::string label_;
};

/// Hyperparameter-indexed proposal family parsed from `imh:normal:m,s` or
/// `rwm:normal:0,s`. Each parameter slot holds a literal or a name that is
/// bound to a value (typically a grid axis) by bind().
class ProposalFamily {
 public:
  static ProposalFamily parse(std::string_view spec);

  ProposalKind kind() const { return kind_; }
  Family base_family() const { return base_family_; }
  /// Names of the unbound slots, in slot order.
  std::vector<std::string> hyperparameter_names() const;
  /// Throws Error(InvalidParameter) when a named slot has no value.
  Proposal bind(const std::map<std::string, double>& values = {}) const;
  std::string spec() const;

 private:
  struct Slot {
    std::optional<double> literal;
    std::string name;
  };
  ProposalKind kind_ = ProposalKind::independent;
  Family base_family_ = Family::normal;
  std::vector<Slot> slots_;
};

/// Metropolis-Hastings kernel K(x,dy) = a(x,y) dy + r(x) delta_x(dy) for a
/// target and a proposal at fixed hyperparameters, restricted to `domain` for
/// every integral over y.
///
/// Copies share the rejection-probability memo table, which is keyed by the
/// bit pattern of x and guarded by a mutex.
class MhKernel {
 public:
  MhKernel(Density target, Proposal proposal, Interval domain, QuadratureConfig quad = {});

  /// Kernel whose domain covers the target, the proposal's reach, and any
  /// extra densities (truncated at quad.tail_mass).
  static MhKernel with_default_domain(Density target, Proposal proposal,
                                      QuadratureConfig quad = {},
                                      std::span<const Density> extra = {});

  /// log min{1, pi(y)J(x|y) / (pi(x)J(y|x))}; 0 where J(y|x) = 0.
  /// Throws Error(TargetZeroAtCurrentState) when pi(x) = 0.
  double log_acceptance_ratio(double x, double y) const;
  double log_acceptance_density(double x, double y) const;
  /// a(x,y) = min{1, pi(y)J(x|y) / (pi(x)J(y|x))} J(y|x).
  double acceptance_density(double x, double y) const {
    return std::exp(log_acceptance_density(x, y));
  }

  /// r(x) = 1 - int a(x,y) dy, integrated in the non-cancelling form
  /// int J(y|x)(1 - acceptance ratio) dy and clamped to [0,1]. Memoized.
  IntegralResult rejection_prob(double x) const;
  /// int a(x,y) dy over the domain.
  IntegralResult accepted_mass(double x) const;
  /// (Ku)(x) = int u(y) a(x,y) dy + r(x) u(x).
  IntegralResult apply(const Integrand& u, double x) const;
  /// (Ku)(x) / u(x) for u > 0 given as log u, evaluated in one pass as
  /// int J(y|x) [rho(x,y) u(y)/u(x) + 1 - rho(x,y)] dy.
  IntegralResult apply_ratio(const Integrand& log_u, double x,
                             std::span<const double> extra_breakpoints = {}) const;

  /// Panel boundaries for y -> a(x,y): y = x, the other crossings of the
  /// acceptance boundary, and the bulk of J(.|x).
  std::vector<double> breakpoints(double x) const;
  /// Points y where the Hastings ratio crosses 1, found by a sign scan when
  /// the log weight is not quadratic.
  std::vector<double> ratio_crossings(double x) const;

  const Density& target() const { return target_; }
  const Proposal& proposal() const { return proposal_; }
  const Interval& domain() const { return domain_; }
  const QuadratureConfig& quadrature() const { return quad_; }

 private:
  struct Memo;

  Density target_;
  Proposal proposal_;
  Interval domain_;
  QuadratureConfig quad_;
  std::vector<double> static_breaks_;
  // Quadratic coefficient pair (a, b) of y -> log pi(y) - log J(y|x) (or of
  // log pi for symmetric random walks) when both are Gaussian.
  std::optional<std::pair<double, double>> weight_quadratic_;
  std::shared_ptr<Memo> memo_;
};

}  // namespace mhtune
