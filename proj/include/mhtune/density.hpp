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

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhtune/rng.hpp"

namespace mhtune {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool contains(const Interval& other) const { return other.lo >= lo && other.hi <= hi; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);

enum class Family { normal, uniform, exponential, gamma, weibull, mixture };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Coefficients of a log-density that is quadratic on its support:
/// log p(x) = a x^2 + b x + c.
struct LogQuadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

namespace detail {
class DensityImpl;
}

struct MixtureComponent;

/// Immutable one-dimensional probability density.
///
/// Parametrizations: normal(mean, sd), uniform(lo, hi), exponential(rate),
/// gamma(shape, rate), weibull(shape, scale). A `Density` is a cheap handle to
/// shared immutable state; copies share it and every method is safe to call
/// concurrently.
class Density {
 public:
  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  /// 1 - cdf(x), computed without cancellation in the upper tail.
  double ccdf(double x) const;
  /// Smallest x with cdf(x) >= p.
  double quantile(double p) const;
  /// Quantile of the upper tail: the x with ccdf(x) = q.
  double upper_quantile(double q) const;
  /// Nominal support of the family (may be infinite).
  Interval support() const;
  /// Smallest interval outside which pdf <= 1e-300.
  Interval effective_support() const;
  double sample(Rng& rng) const;

  Family family() const;
  const std::vector<double>& params() const;
  /// Components of a mixture; empty for the other families.
  const std::vector<MixtureComponent>& components() const;
  std::optional<LogQuadratic> log_quadratic() const;
  /// `family:p1,p2` spec string accepted by parse_density.
  std::string spec() const;

  explicit Density(std::shared_ptr<const detail::DensityImpl> impl);

 private:
  std::shared_ptr<const detail::DensityImpl> impl_;
};

struct MixtureComponent {
  double weight;
  Density density;
};

/// Builds a density of the given family. For `mixture`, use make_mixture.
/// Throws Error(InvalidParameter) on bad parameters.
Density make_density(Family family, std::span<const double> params);
Density make_mixture(std::vector<MixtureComponent> components);

/// Parses `normal:0,1`, `weibull:3,2` or
/// `mixture:0.5*normal:5,2+0.5*normal:-3,1`.
Density parse_density(std::string_view spec);

/// dmu/dpi as a function of x, evaluated from the two densities.
class RadonNikodym {
 public:
  RadonNikodym(Density mu, Density pi) : mu_(std::move(mu)), pi_(std::move(pi)) {}

  /// mu(x)/pi(x); 0 wherever pi(x) = 0.
  double operator()(double x) const {
    const double p = pi_.pdf(x);
    return p > 0.0 ? mu_.pdf(x) / p : 0.0;
  }

  /// log mu(x) - log pi(x); -inf where mu vanishes or pi vanishes.
  double log(double x) const {
    const double lp = pi_.log_pdf(x);
    if (lp == -kInf) return -kInf;
    return mu_.log_pdf(x) - lp;
  }

 private:
  Density mu_;
  Density pi_;
};

/// Throws Error(NotAbsolutelyContinuous) unless support(mu) is inside support(pi).
RadonNikodym radon_nikodym(const Density& mu, const Density& pi);

}  // namespace mhtune
