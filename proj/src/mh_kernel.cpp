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

#include "mhtune/mh_kernel.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <mutex>
#include <unordered_map>

#include "mhtune/error.hpp"

namespace mhtune {

Proposal Proposal::independent(Density base) {
  Proposal p;
  p.kind_ = ProposalKind::independent;
  p.base_ = std::move(base);
  return p;
}

Proposal Proposal::random_walk(Density increment) {
  Proposal p;
  p.kind_ = ProposalKind::random_walk;
  p.base_ = std::move(increment);
  return p;
}

Proposal Proposal::general(ConditionalLogPdf log_pdf, ConditionalSampler sampler,
                           std::string label) {
  if (!log_pdf || !sampler) {
    throw Error(ErrorCode::InvalidParameter, "general proposal needs a log-density and a sampler");
  }
  Proposal p;
  p.kind_ = ProposalKind::general;
  p.log_pdf_ = std::move(log_pdf);
  p.sampler_ = std::move(sampler);
  p.label_ = std::move(label);
  return p;
}

double Proposal::log_pdf(double y, double x) const {
  switch (kind_) {
    case ProposalKind::independent: return base_->log_pdf(y);
    case ProposalKind::random_walk: return base_->log_pdf(y - x);
    case ProposalKind::general: return log_pdf_(y, x);
  }
  return -kInf;
}

double Proposal::sample(double x, Rng& rng) const {
  switch (kind_) {
    case ProposalKind::independent: return base_->sample(rng);
    case ProposalKind::random_walk: return x + base_->sample(rng);
    case ProposalKind::general: return sampler_(x, rng);
  }
  return x;
}

bool Proposal::symmetric() const {
  if (kind_ != ProposalKind::random_walk) return false;
  switch (base_->family()) {
    case Family::normal: return base_->params()[0] == 0.0;
    case Family::uniform: return base_->params()[0] == -base_->params()[1];
    default: return false;
  }
}

std::vector<double> Proposal::breakpoints(double x, double tail_mass) const {
  switch (kind_) {
    case ProposalKind::independent: return density_breakpoints(*base_, tail_mass);
    case ProposalKind::random_walk: {
      auto br = density_breakpoints(*base_, tail_mass);
      for (double& b : br) b += x;
      return br;
    }
    case ProposalKind::general: return {};
  }
  return {};
}

Interval Proposal::reach(Interval states, double tail_mass) const {
  switch (kind_) {
    case ProposalKind::independent: {
      const Density d[] = {*base_};
      return truncation_interval(d, tail_mass);
    }
    case ProposalKind::random_walk: {
      const Density d[] = {*base_};
      const Interval inc = truncation_interval(d, tail_mass);
      return {states.lo + inc.lo, states.hi + inc.hi};
    }
    case ProposalKind::general: return states;
  }
  return states;
}

std::string Proposal::spec() const {
  switch (kind_) {
    case ProposalKind::independent: return "imh:" + base_->spec();
    case ProposalKind::random_walk: return "rwm:" + base_->spec();
    case ProposalKind::general: return label_;
  }
  return label_;
}

ProposalFamily ProposalFamily::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidParameter,
                "proposal spec needs 'imh:family:params' or 'rwm:family:params'");
  }
  ProposalFamily f;
  const std::string_view kind = spec.substr(0, colon);
  if (kind == "imh") {
    f.kind_ = ProposalKind::independent;
  } else if (kind == "rwm") {
    f.kind_ = ProposalKind::random_walk;
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown proposal kind '" + std::string(kind) + "'");
  }
  const std::string_view rest = spec.substr(colon + 1);
  const auto colon2 = rest.find(':');
  if (colon2 == std::string_view::npos) {
    throw Error(ErrorCode::InvalidParameter, "proposal spec is missing density parameters");
  }
  f.base_family_ = parse_family(rest.substr(0, colon2));
  if (f.base_family_ == Family::mixture) {
    throw Error(ErrorCode::InvalidParameter, "mixture proposals are not supported");
  }
  const std::string_view params = rest.substr(colon2 + 1);
  std::size_t start = 0;
  for (std::size_t i = 0; i <= params.size(); ++i) {
    if (i != params.size() && params[i] != ',') continue;
    std::string_view tok = params.substr(start, i - start);
    start = i + 1;
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.empty()) throw Error(ErrorCode::InvalidParameter, "empty proposal parameter");
    Slot slot;
    double v = 0.0;
    std::string_view num = tok;
    if (num.front() == '+') num.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec == std::errc() && ptr == num.data() + num.size()) {
      slot.literal = v;
    } else {
      const bool ident = std::isalpha(static_cast<unsigned char>(tok.front())) &&
                         std::all_of(tok.begin(), tok.end(), [](char c) {
                           return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                         });
      if (!ident) {
        throw Error(ErrorCode::InvalidParameter,
                    "proposal parameter must be a number or a name: '" + std::string(tok) + "'");
      }
      slot.name = std::string(tok);
    }
    f.slots_.push_back(std::move(slot));
  }
  // Validate arity and literal values with placeholder bindings.
  std::map<std::string, double> probe;
  for (const auto& s : f.slots_) {
    if (!s.literal) probe[s.name] = 1.0;
  }
  (void)f.bind(probe);
  return f;
}

std::vector<std::string> ProposalFamily::hyperparameter_names() const {
  std::vector<std::string> names;
  for (const auto& s : slots_) {
    if (!s.literal && std::find(names.begin(), names.end(), s.name) == names.end()) {
      names.push_back(s.name);
    }
  }
  return names;
}

Proposal ProposalFamily::bind(const std::map<std::string, double>& values) const {
  std::vector<double> params;
  for (const auto& s : slots_) {
    if (s.literal) {
      params.push_back(*s.literal);
      continue;
    }
    const auto it = values.find(s.name);
    if (it == values.end()) {
      throw Error(ErrorCode::InvalidParameter, "hyperparameter '" + s.name + "' is not bound");
    }
    params.push_back(it->second);
  }
  Density base = make_density(base_family_, params);
  return kind_ == ProposalKind::independent ? Proposal::independent(std::move(base))
                                            : Proposal::random_walk(std::move(base));
}

std::string ProposalFamily::spec() const {
  std::string s = kind_ == ProposalKind::independent ? "imh:" : "rwm:";
  s += to_string(base_family_);
  s += ':';
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (i) s += ',';
    if (slots_[i].literal) {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *slots_[i].literal);
      s.append(buf, end);
    } else {
      s += slots_[i].name;
    }
  }
  return s;
}

struct MhKernel::Memo {
  std::mutex mutex;
  std::unordered_map<std::uint64_t, IntegralResult> rejection;
};

MhKernel::MhKernel(Density target, Proposal proposal, Interval domain, QuadratureConfig quad)
    : target_(std::move(target)),
      proposal_(std::move(proposal)),
      domain_(domain),
      quad_(quad),
      memo_(std::make_shared<Memo>()) {
  quad_.validate();
  if (!domain_.finite() || !(domain_.lo < domain_.hi)) {
    throw Error(ErrorCode::InvalidParameter, "kernel domain must be a finite nonempty interval");
  }
  const Interval ts = target_.support();
  if (std::isfinite(ts.lo)) static_breaks_.push_back(ts.lo);
  if (std::isfinite(ts.hi)) static_breaks_.push_back(ts.hi);

  const auto tq = target_.log_quadratic();
  if (tq && proposal_.kind() == ProposalKind::independent) {
    if (const auto jq = proposal_.base()->log_quadratic()) {
      weight_quadratic_ = std::pair{tq->a - jq->a, tq->b - jq->b};
    }
  } else if (tq && proposal_.symmetric()) {
    weight_quadratic_ = std::pair{tq->a, tq->b};
  }
  if (proposal_.kind() == ProposalKind::independent) {
    const auto jb = proposal_.breakpoints(0.0, quad_.tail_mass);
    static_breaks_.insert(static_breaks_.end(), jb.begin(), jb.end());
  }
}

MhKernel MhKernel::with_default_domain(Density target, Proposal proposal, QuadratureConfig quad,
                                       std::span<const Density> extra) {
  const Density t[] = {target};
  Interval dom = truncation_interval(t, quad.tail_mass);
  dom = hull(dom, proposal.reach(dom, quad.tail_mass));
  if (!extra.empty()) dom = hull(dom, truncation_interval(extra, quad.tail_mass));
  return MhKernel(std::move(target), std::move(proposal), dom, quad);
}

double MhKernel::log_acceptance_ratio(double x, double y) const {
  const double lpx = target_.log_pdf(x);
  if (lpx == -kInf) {
    throw Error(ErrorCode::TargetZeroAtCurrentState,
                "target density vanishes at x = " + std::to_string(x));
  }
  const double den = lpx + proposal_.log_pdf(y, x);
  if (den == -kInf) return 0.0;
  const double lpy = target_.log_pdf(y);
  if (lpy == -kInf) return -kInf;
  const double num = lpy + proposal_.log_pdf(x, y);
  if (num == -kInf) return -kInf;
  return std::min(0.0, num - den);
}

double MhKernel::log_acceptance_density(double x, double y) const {
  const double lj = proposal_.log_pdf(y, x);
  if (lj == -kInf) {
    // Still reject a chain started outside the target support.
    (void)log_acceptance_ratio(x, y);
    return -kInf;
  }
  return lj + log_acceptance_ratio(x, y);
}

std::vector<double> MhKernel::ratio_crossings(double x) const {
  // Sign of log pi(y)J(x|y) - log pi(x)J(y|x) on a probe grid; each change
  // is a kink of the acceptance density, bisected to machine precision.
  constexpr int kProbes = 128;
  const Interval ts = target_.support();
  const double lo = std::max(domain_.lo, ts.lo);
  const double hi = std::min(domain_.hi, ts.hi);
  std::vector<double> roots;
  if (!(lo < hi) || target_.log_pdf(x) == -kInf) return roots;
  const double base = target_.log_pdf(x);
  auto excess = [&](double y) {
    const double v = target_.log_pdf(y) + proposal_.log_pdf(x, y) - base - proposal_.log_pdf(y, x);
    return std::isnan(v) ? -kInf : v;
  };
  // y = x is itself a crossing; probing just beside it exposes a second
  // crossing in the same cell.
  const double delta = 1e-7 * std::max(1.0, std::abs(x));
  std::vector<double> probes;
  for (int i = 0; i <= kProbes; ++i) probes.push_back(lo + (hi - lo) * i / kProbes);
  if (x - delta > lo) probes.push_back(x - delta);
  if (x + delta < hi) probes.push_back(x + delta);
  std::sort(probes.begin(), probes.end());
  bool prev_pos = excess(probes.front()) > 0;
  for (std::size_t i = 1; i < probes.size(); ++i) {
    const bool pos = excess(probes[i]) > 0;
    if (pos != prev_pos && !(probes[i - 1] < x && probes[i] > x)) {
      double a = probes[i - 1], b = probes[i];
      for (int k = 0; k < 64 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++k) {
        const double m = 0.5 * (a + b);
        ((excess(m) > 0) == prev_pos ? a : b) = m;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_pos = pos;
  }
  return roots;
}

std::vector<double> MhKernel::breakpoints(double x) const {
  std::vector<double> br = static_breaks_;
  br.push_back(x);
  if (weight_quadratic_) {
    const auto [a, b] = *weight_quadratic_;
    if (std::abs(a) > 1e-12) br.push_back(-b / a - x);
  } else {
    const auto roots = ratio_crossings(x);
    br.insert(br.end(), roots.begin(), roots.end());
  }
  if (proposal_.kind() != ProposalKind::independent) {
    const auto jb = proposal_.breakpoints(x, quad_.tail_mass);
    br.insert(br.end(), jb.begin(), jb.end());
  }
  return br;
}

IntegralResult MhKernel::rejection_prob(double x) const {
  const auto key = std::bit_cast<std::uint64_t>(x);
  {
    std::lock_guard lock(memo_->mutex);
    if (auto it = memo_->rejection.find(key); it != memo_->rejection.end()) return it->second;
  }
  (void)log_acceptance_ratio(x, x);
  const auto br = breakpoints(x);
  IntegralResult r = integrate_1d(
      [&](double y) {
        const double lj = proposal_.log_pdf(y, x);
        if (lj == -kInf) return 0.0;
        return std::exp(lj) * -std::expm1(log_acceptance_ratio(x, y));
      },
      domain_, quad_, br);
  r.value = std::clamp(r.value, 0.0, 1.0);
  std::lock_guard lock(memo_->mutex);
  memo_->rejection.emplace(key, r);
  return r;
}

IntegralResult MhKernel::accepted_mass(double x) const {
  return integrate_1d([&](double y) { return acceptance_density(x, y); }, domain_, quad_,
                      breakpoints(x));
}

IntegralResult MhKernel::apply(const Integrand& u, double x) const {
  const IntegralResult r = rejection_prob(x);
  IntegralResult moved = integrate_1d(
      [&](double y) {
        const double a = acceptance_density(x, y);
        return a == 0.0 ? 0.0 : u(y) * a;
      },
      domain_, quad_, breakpoints(x));
  const double ux = u(x);
  moved.value += r.value * ux;
  moved.error_estimate += r.error_estimate * std::abs(ux);
  moved.converged = moved.converged && r.converged;
  return moved;
}

IntegralResult MhKernel::apply_ratio(const Integrand& log_u, double x,
                                     std::span<const double> extra_breakpoints) const {
  const double lux = log_u(x);
  auto br = breakpoints(x);
  br.insert(br.end(), extra_breakpoints.begin(), extra_breakpoints.end());
  return integrate_1d(
      [&](double y) {
        const double lj = proposal_.log_pdf(y, x);
        if (lj == -kInf) return 0.0;
        const double lr = log_acceptance_ratio(x, y);
        const double stay = lj + std::log(-std::expm1(lr));
        const double move = lj + lr + (log_u(y) - lux);
        return std::exp(move) + (lr == 0.0 ? 0.0 : std::exp(stay));
      },
      domain_, quad_, br);
}

}  // namespace mhtune
