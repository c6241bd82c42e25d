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

#include "mhtune/density.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mhtune/error.hpp"

namespace mhtune {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kSqrt2 = 1.41421356237309504880;
const double kLogTiny = std::log(1e-300);

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

}  // namespace

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::normal: return "normal";
    case Family::uniform: return "uniform";
    case Family::exponential: return "exponential";
    case Family::gamma: return "gamma";
    case Family::weibull: return "weibull";
    case Family::mixture: return "mixture";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::normal, Family::uniform, Family::exponential, Family::gamma,
                   Family::weibull, Family::mixture}) {
    if (to_string(f) == name) return f;
  }
  if (name == "exp") return Family::exponential;
  throw Error(ErrorCode::InvalidParameter, "unknown density family '" + std::string(name) + "'");
}

namespace detail {

class DensityImpl {
 public:
  DensityImpl(Family family, std::vector<double> params)
      : family_(family), params_(std::move(params)) {}
  virtual ~DensityImpl() = default;

  virtual double pdf(double x) const = 0;
  virtual double log_pdf(double x) const = 0;
  virtual double cdf(double x) const = 0;
  virtual double ccdf(double x) const = 0;
  virtual double quantile(double p) const = 0;
  virtual double upper_quantile(double q) const = 0;
  virtual Interval support() const = 0;
  virtual double sample(Rng& rng) const = 0;
  virtual std::optional<LogQuadratic> log_quadratic() const { return std::nullopt; }
  virtual const std::vector<MixtureComponent>& components() const {
    static const std::vector<MixtureComponent> none;
    return none;
  }
  virtual std::string spec() const {
    std::string s(to_string(family_));
    s += ':';
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (i) s += ',';
      s += format_number(params_[i]);
    }
    return s;
  }

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }

 private:
  Family family_;
  std::vector<double> params_;
};

namespace {

class Normal final : public DensityImpl {
 public:
  Normal(double mean, double sd) : DensityImpl(Family::normal, {mean, sd}), mean_(mean), sd_(sd) {
    require(std::isfinite(mean), "normal mean must be finite");
    require(sd > 0.0 && std::isfinite(sd), "normal sd must be positive");
    log_norm_ = -std::log(sd) - kLogSqrt2Pi;
  }

  double pdf(double x) const override {
    const double z = (x - mean_) / sd_;
    return std::exp(-0.5 * z * z + log_norm_);
  }
  double log_pdf(double x) const override {
    const double z = (x - mean_) / sd_;
    return -0.5 * z * z + log_norm_;
  }
  double cdf(double x) const override { return 0.5 * std::erfc(-(x - mean_) / (sd_ * kSqrt2)); }
  double ccdf(double x) const override { return 0.5 * std::erfc((x - mean_) / (sd_ * kSqrt2)); }
  double quantile(double p) const override {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    return mean_ - sd_ * kSqrt2 * boost::math::erfc_inv(2.0 * p);
  }
  double upper_quantile(double q) const override {
    if (q <= 0.0) return kInf;
    if (q >= 1.0) return -kInf;
    return mean_ + sd_ * kSqrt2 * boost::math::erfc_inv(2.0 * q);
  }
  Interval support() const override { return {}; }
  double sample(Rng& rng) const override { return mean_ + sd_ * rng.normal(); }
  std::optional<LogQuadratic> log_quadratic() const override {
    const double v = sd_ * sd_;
    return LogQuadratic{-0.5 / v, mean_ / v, -0.5 * mean_ * mean_ / v + log_norm_};
  }

 private:
  double mean_, sd_, log_norm_;
};

class Uniform final : public DensityImpl {
 public:
  Uniform(double lo, double hi) : DensityImpl(Family::uniform, {lo, hi}), lo_(lo), hi_(hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform requires lo < hi");
    inv_width_ = 1.0 / (hi - lo);
    log_pdf_ = -std::log(hi - lo);
  }

  double pdf(double x) const override { return (x >= lo_ && x <= hi_) ? inv_width_ : 0.0; }
  double log_pdf(double x) const override { return (x >= lo_ && x <= hi_) ? log_pdf_ : -kInf; }
  double cdf(double x) const override { return std::clamp((x - lo_) * inv_width_, 0.0, 1.0); }
  double ccdf(double x) const override { return std::clamp((hi_ - x) * inv_width_, 0.0, 1.0); }
  double quantile(double p) const override {
    return std::clamp(lo_ + p * (hi_ - lo_), lo_, hi_);
  }
  double upper_quantile(double q) const override {
    return std::clamp(hi_ - q * (hi_ - lo_), lo_, hi_);
  }
  Interval support() const override { return {lo_, hi_}; }
  double sample(Rng& rng) const override { return lo_ + (hi_ - lo_) * rng.uniform(); }

 private:
  double lo_, hi_, inv_width_, log_pdf_;
};

class Exponential final : public DensityImpl {
 public:
  explicit Exponential(double rate) : DensityImpl(Family::exponential, {rate}), rate_(rate) {
    require(rate > 0.0 && std::isfinite(rate), "exponential rate must be positive");
    log_rate_ = std::log(rate);
  }

  double pdf(double x) const override { return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x); }
  double log_pdf(double x) const override { return x < 0.0 ? -kInf : log_rate_ - rate_ * x; }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x); }
  double ccdf(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-rate_ * x); }
  double quantile(double p) const override {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return kInf;
    return -std::log1p(-p) / rate_;
  }
  double upper_quantile(double q) const override {
    if (q <= 0.0) return kInf;
    if (q >= 1.0) return 0.0;
    return -std::log(q) / rate_;
  }
  Interval support() const override { return {0.0, kInf}; }
  double sample(Rng& rng) const override { return -std::log(rng.uniform_open()) / rate_; }

 private:
  double rate_, log_rate_;
};

class Gamma final : public DensityImpl {
 public:
  Gamma(double shape, double rate)
      : DensityImpl(Family::gamma, {shape, rate}), shape_(shape), rate_(rate) {
    require(shape > 0.0 && std::isfinite(shape), "gamma shape must be positive");
    require(rate > 0.0 && std::isfinite(rate), "gamma rate must be positive");
    log_norm_ = shape * std::log(rate) - std::lgamma(shape);
  }

  double pdf(double x) const override {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return shape_ < 1.0 ? kInf : (shape_ == 1.0 ? rate_ : 0.0);
    return std::exp(log_pdf(x));
  }
  double log_pdf(double x) const override {
    if (x < 0.0) return -kInf;
    if (x == 0.0) return shape_ < 1.0 ? kInf : (shape_ == 1.0 ? std::log(rate_) : -kInf);
    return log_norm_ + (shape_ - 1.0) * std::log(x) - rate_ * x;
  }
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (!std::isfinite(x)) return 1.0;
    return boost::math::gamma_p(shape_, rate_ * x);
  }
  double ccdf(double x) const override {
    if (x <= 0.0) return 1.0;
    if (!std::isfinite(x)) return 0.0;
    return boost::math::gamma_q(shape_, rate_ * x);
  }
  double quantile(double p) const override {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return kInf;
    return boost::math::gamma_p_inv(shape_, p) / rate_;
  }
  double upper_quantile(double q) const override {
    if (q <= 0.0) return kInf;
    if (q >= 1.0) return 0.0;
    return boost::math::gamma_q_inv(shape_, q) / rate_;
  }
  Interval support() const override { return {0.0, kInf}; }
  double sample(Rng& rng) const override {
    // Marsaglia-Tsang; shapes below one are boosted by u^(1/shape).
    const double k = shape_ < 1.0 ? shape_ + 1.0 : shape_;
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    double g;
    for (;;) {
      double z, v;
      do {
        z = rng.normal();
        v = 1.0 + c * z;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = rng.uniform_open();
      if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
        g = d * v;
        break;
      }
    }
    if (shape_ < 1.0) g *= std::pow(rng.uniform_open(), 1.0 / shape_);
    return g / rate_;
  }

 private:
  double shape_, rate_, log_norm_;
};

class Weibull final : public DensityImpl {
 public:
  Weibull(double shape, double scale)
      : DensityImpl(Family::weibull, {shape, scale}), shape_(shape), scale_(scale) {
    require(shape > 0.0 && std::isfinite(shape), "weibull shape must be positive");
    require(scale > 0.0 && std::isfinite(scale), "weibull scale must be positive");
    log_k_over_l_ = std::log(shape / scale);
  }

  double pdf(double x) const override {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return shape_ < 1.0 ? kInf : (shape_ == 1.0 ? 1.0 / scale_ : 0.0);
    const double t = x / scale_;
    return shape_ / scale_ * std::pow(t, shape_ - 1.0) * std::exp(-std::pow(t, shape_));
  }
  double log_pdf(double x) const override {
    if (x < 0.0) return -kInf;
    if (x == 0.0) return std::log(pdf(0.0));
    const double lt = std::log(x / scale_);
    return log_k_over_l_ + (shape_ - 1.0) * lt - std::exp(shape_ * lt);
  }
  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / scale_, shape_));
  }
  double ccdf(double x) const override {
    return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / scale_, shape_));
  }
  double quantile(double p) const override {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return kInf;
    return scale_ * std::pow(-std::log1p(-p), 1.0 / shape_);
  }
  double upper_quantile(double q) const override {
    if (q <= 0.0) return kInf;
    if (q >= 1.0) return 0.0;
    return scale_ * std::pow(-std::log(q), 1.0 / shape_);
  }
  Interval support() const override { return {0.0, kInf}; }
  double sample(Rng& rng) const override {
    return scale_ * std::pow(-std::log(rng.uniform_open()), 1.0 / shape_);
  }

 private:
  double shape_, scale_, log_k_over_l_;
};

class Mixture final : public DensityImpl {
 public:
  explicit Mixture(std::vector<MixtureComponent> comps)
      : DensityImpl(Family::mixture, flatten_weights(comps)), comps_(std::move(comps)) {
    require(!comps_.empty(), "mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : comps_) {
      require(c.weight >= 0.0 && c.weight <= 1.0, "mixture weights must lie in [0,1]");
      total += c.weight;
      log_w_.push_back(std::log(c.weight));
    }
    require(std::abs(total - 1.0) <= 1e-12, "mixture weights must sum to 1");
  }

  double pdf(double x) const override {
    double s = 0.0;
    for (const auto& c : comps_) s += c.weight * c.density.pdf(x);
    return s;
  }
  double log_pdf(double x) const override {
    double m = -kInf;
    thread_local std::vector<double> terms;
    terms.resize(comps_.size());
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      terms[i] = log_w_[i] + comps_[i].density.log_pdf(x);
      m = std::max(m, terms[i]);
    }
    if (m == -kInf || m == kInf) return m;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
  }
  double cdf(double x) const override {
    double s = 0.0;
    for (const auto& c : comps_) s += c.weight * c.density.cdf(x);
    return std::min(s, 1.0);
  }
  double ccdf(double x) const override {
    double s = 0.0;
    for (const auto& c : comps_) s += c.weight * c.density.ccdf(x);
    return std::min(s, 1.0);
  }
  double quantile(double p) const override {
    if (p <= 0.0) return support().lo;
    if (p >= 1.0) return support().hi;
    return invert([&](double x) { return cdf(x) >= p; }, p, false);
  }
  double upper_quantile(double q) const override {
    if (q <= 0.0) return support().hi;
    if (q >= 1.0) return support().lo;
    return invert([&](double x) { return ccdf(x) <= q; }, q, true);
  }
  Interval support() const override {
    Interval s{kInf, -kInf};
    for (const auto& c : comps_) s = hull(s, c.density.support());
    return s;
  }
  double sample(Rng& rng) const override {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& c : comps_) {
      acc += c.weight;
      if (u < acc) return c.density.sample(rng);
    }
    return comps_.back().density.sample(rng);
  }
  const std::vector<MixtureComponent>& components() const override { return comps_; }
  std::string spec() const override {
    std::string s = "mixture:";
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (i) s += '+';
      s += format_number(comps_[i].weight) + "*" + comps_[i].density.spec();
    }
    return s;
  }

 private:
  static std::vector<double> flatten_weights(const std::vector<MixtureComponent>& comps) {
    std::vector<double> w;
    for (const auto& c : comps) w.push_back(c.weight);
    return w;
  }

  // Bisection for the smallest x with pred(x) true; pred is monotone in x.
  template <class Pred>
  double invert(Pred pred, double level, bool upper) const {
    double lo = kInf, hi = -kInf;
    for (const auto& c : comps_) {
      const double q = upper ? c.density.upper_quantile(level) : c.density.quantile(level);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    // Every component quantile brackets the mixture quantile.
    if (!(lo < hi)) return lo;
    while (!pred(hi)) hi += (hi - lo);
    while (pred(lo)) lo -= (hi - lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
      const double mid = 0.5 * (lo + hi);
      if (pred(mid)) hi = mid; else lo = mid;
    }
    return hi;
  }

  std::vector<MixtureComponent> comps_;
  std::vector<double> log_w_;
};

}  // namespace
}  // namespace detail

Density::Density(std::shared_ptr<const detail::DensityImpl> impl) : impl_(std::move(impl)) {}

double Density::pdf(double x) const { return impl_->pdf(x); }
double Density::log_pdf(double x) const { return impl_->log_pdf(x); }
double Density::cdf(double x) const { return impl_->cdf(x); }
double Density::ccdf(double x) const { return impl_->ccdf(x); }
double Density::quantile(double p) const { return impl_->quantile(p); }
double Density::upper_quantile(double q) const { return impl_->upper_quantile(q); }
Interval Density::support() const { return impl_->support(); }
double Density::sample(Rng& rng) const { return impl_->sample(rng); }
Family Density::family() const { return impl_->family(); }
const std::vector<double>& Density::params() const { return impl_->params(); }
const std::vector<MixtureComponent>& Density::components() const { return impl_->components(); }
std::optional<LogQuadratic> Density::log_quadratic() const { return impl_->log_quadratic(); }
std::string Density::spec() const { return impl_->spec(); }

Interval Density::effective_support() const {
  const Interval sup = support();
  if (sup.finite()) return sup;
  // Walk outward from the median until the log-density drops below the cutoff,
  // then bisect the crossing. Tails of every supported family are eventually
  // decreasing.
  const double mid = quantile(0.5);
  const double scale = std::max(1.0, quantile(0.75) - quantile(0.25));
  auto edge = [&](double dir, double bound) {
    if (std::isfinite(bound)) return bound;
    double inner = mid, step = scale;
    double outer = mid + dir * step;
    while (log_pdf(outer) > kLogTiny) {
      inner = outer;
      step *= 2.0;
      outer = mid + dir * step;
    }
    for (int i = 0; i < 200 && std::abs(outer - inner) > 1e-12 * std::max(1.0, std::abs(inner));
         ++i) {
      const double m = 0.5 * (inner + outer);
      if (log_pdf(m) > kLogTiny) inner = m; else outer = m;
    }
    return outer;
  };
  return {edge(-1.0, sup.lo), edge(1.0, sup.hi)};
}

Density make_density(Family family, std::span<const double> p) {
  using namespace detail;
  auto arity = [&](std::size_t n) {
    require(p.size() == n, std::string(to_string(family)) + " expects " + std::to_string(n) +
                               " parameters, got " + std::to_string(p.size()));
  };
  switch (family) {
    case Family::normal: arity(2); return Density(std::make_shared<Normal>(p[0], p[1]));
    case Family::uniform: arity(2); return Density(std::make_shared<Uniform>(p[0], p[1]));
    case Family::exponential: arity(1); return Density(std::make_shared<Exponential>(p[0]));
    case Family::gamma: arity(2); return Density(std::make_shared<Gamma>(p[0], p[1]));
    case Family::weibull: arity(2); return Density(std::make_shared<Weibull>(p[0], p[1]));
    case Family::mixture: break;
  }
  throw Error(ErrorCode::InvalidParameter, "mixtures are built with make_mixture");
}

Density make_mixture(std::vector<MixtureComponent> components) {
  return Density(std::make_shared<detail::Mixture>(std::move(components)));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidParameter, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Density parse_density(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidParameter, "density spec needs 'family:params': '" +
                                                 std::string(spec) + "'");
  }
  const Family family = parse_family(trim(spec.substr(0, colon)));
  std::string_view rest = spec.substr(colon + 1);

  if (family == Family::mixture) {
    std::vector<MixtureComponent> comps;
    // Components are separated by '+' that is not part of a number exponent
    // or sign; a component always has the form weight*family:params.
    std::size_t start = 0;
    for (std::size_t i = 0; i <= rest.size(); ++i) {
      const bool at_end = i == rest.size();
      bool split = at_end;
      if (!at_end && rest[i] == '+' && i > start) {
        const char prev = rest[i - 1];
        split = prev != 'e' && prev != 'E' && prev != ',' && prev != ':' && prev != '*';
      }
      if (!split) continue;
      const std::string_view part = trim(rest.substr(start, i - start));
      const auto star = part.find('*');
      if (star == std::string_view::npos) {
        throw Error(ErrorCode::InvalidParameter,
                    "mixture component needs 'weight*family:params': '" + std::string(part) + "'");
      }
      comps.push_back({parse_number(part.substr(0, star)), parse_density(part.substr(star + 1))});
      start = i + 1;
    }
    return make_mixture(std::move(comps));
  }

  std::vector<double> params;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= rest.size(); ++i) {
    if (i == rest.size() || rest[i] == ',') {
      params.push_back(parse_number(rest.substr(start, i - start)));
      start = i + 1;
    }
  }
  return make_density(family, params);
}

RadonNikodym radon_nikodym(const Density& mu, const Density& pi) {
  if (!pi.support().contains(mu.support())) {
    throw Error(ErrorCode::NotAbsolutelyContinuous,
                "support of " + mu.spec() + " is not contained in support of " + pi.spec());
  }
  return RadonNikodym(mu, pi);
}

}  // namespace mhtune
