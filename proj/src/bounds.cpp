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

#include "mhtune/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mhtune/error.hpp"

namespace mhtune {

namespace {

constexpr double kDivergenceWeight = 1e-300;
constexpr double kDerivativeCap = 1e12;
constexpr int kDerivativeProbes = 1001;

std::vector<double> support_ends(const Density& d) {
  std::vector<double> out;
  const Interval s = d.support();
  if (std::isfinite(s.lo)) out.push_back(s.lo);
  if (std::isfinite(s.hi)) out.push_back(s.hi);
  return out;
}

BoundEstimate make_estimate(BoundMethod method) {
  BoundEstimate e;
  e.method = method;
  e.kind = kind_of(method);
  return e;
}

void note_convergence(BoundEstimate& e, bool converged) {
  e.converged = e.converged && converged;
  if (!converged && std::find(e.warnings.begin(), e.warnings.end(), "quadrature did not converge") ==
                        e.warnings.end()) {
    e.warnings.emplace_back("quadrature did not converge");
  }
}

}  // namespace

std::string_view to_string(BoundMethod method) {
  switch (method) {
    case BoundMethod::ub_indep: return "ub-indep";
    case BoundMethod::ub_mh: return "ub-mh";
    case BoundMethod::lb_dv_phi: return "lb-dv";
    case BoundMethod::lb_variational: return "lb-var";
  }
  return "?";
}

BoundMethod parse_bound_method(std::string_view name) {
  for (auto m : {BoundMethod::ub_indep, BoundMethod::ub_mh, BoundMethod::lb_dv_phi,
                 BoundMethod::lb_variational}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidParameter,
              "unknown bound method '" + std::string(name) + "' (ub-indep, ub-mh, lb-dv, lb-var)");
}

BoundKind kind_of(BoundMethod method) {
  return (method == BoundMethod::ub_indep || method == BoundMethod::ub_mh) ? BoundKind::upper
                                                                           : BoundKind::lower;
}

void ClipConfig::validate() const {
  if (!(c_l > 0.0 && c_l < c_u && std::isfinite(c_u))) {
    throw Error(ErrorCode::InvalidParameter, "clip constants need 0 < c_l < c_u < inf");
  }
}

BoundProblem::BoundProblem(Density pi, Proposal proposal, Density mu, const BoundConfig& cfg)
    : pi_(std::move(pi)),
      mu_(std::move(mu)),
      cfg_(cfg),
      kernel_([&] {
        cfg.quad.validate();
        cfg.clip.validate();
        (void)radon_nikodym(mu_, pi_);
        const Density both[] = {pi_, mu_};
        const Interval core = truncation_interval(both, cfg.quad.tail_mass);
        const Interval dom = hull(core, proposal.reach(core, cfg.quad.tail_mass));
        return MhKernel(pi_, std::move(proposal), dom, cfg.quad);
      }()) {
  const Density m[] = {mu_};
  mu_range_ = intersect(truncation_interval(m, cfg_.quad.tail_mass), kernel_.domain());
  for (const Density& d : {pi_, mu_}) {
    const auto b = density_breakpoints(d, cfg_.quad.tail_mass);
    breaks_.insert(breaks_.end(), b.begin(), b.end());
  }
  if (kernel_.proposal().kind() == ProposalKind::independent) {
    const auto b = kernel_.proposal().breakpoints(0.0, cfg_.quad.tail_mass);
    breaks_.insert(breaks_.end(), b.begin(), b.end());
  }
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
}

BoundEstimate ub_independent(const BoundProblem& p) {
  BoundEstimate est = make_estimate(BoundMethod::ub_indep);
  const MhKernel& k = p.kernel();
  const Density& mu = p.mu();
  bool diverged = false;
  const auto mu_breaks = density_breakpoints(mu, p.config().quad.tail_mass);

  const IntegralResult r = integrate_2d(
      [&](double x, double y) {
        const double lmx = mu.log_pdf(x);
        const double lmy = mu.log_pdf(y);
        if (lmx == -kInf || lmy == -kInf) return 0.0;
        const double w = std::exp(lmx + lmy);
        const double la = k.log_acceptance_density(x, y);
        if (la == -kInf) {
          if (w > kDivergenceWeight) diverged = true;
          return 0.0;
        }
        return (lmy - la) * w;
      },
      p.mu_range(), p.mu_range(), p.config().quad, mu_breaks,
      [&](double x) {
        auto br = k.breakpoints(x);
        br.insert(br.end(), mu_breaks.begin(), mu_breaks.end());
        return br;
      });
  note_convergence(est, r.converged);
  est.error_estimate = r.error_estimate;
  if (diverged) {
    est.diverged = true;
    est.value = kInf;
  } else {
    est.value = r.value;
  }
  return est;
}

BoundEstimate ub_mh_kernel(const BoundProblem& p) {
  BoundEstimate est = make_estimate(BoundMethod::ub_mh);
  const MhKernel& k = p.kernel();
  const MhKernel k_mu(p.mu(), p.proposal(), p.domain(), p.config().quad);
  const Density& mu = p.mu();
  const Proposal& j = p.proposal();
  bool diverged = false;
  const auto mu_breaks = density_breakpoints(mu, p.config().quad.tail_mass);

  // Off-diagonal part: int int log(abar/a) abar mu(x) dy dx. abar vanishes
  // wherever mu(y) does, so both coordinates run over the range of mu.
  const IntegralResult moved = integrate_2d(
      [&](double x, double y) {
        const double lmx = mu.log_pdf(x);
        if (lmx == -kInf) return 0.0;
        const double lj = j.log_pdf(y, x);
        if (lj == -kInf) return 0.0;
        const double lrho_mu = k_mu.log_acceptance_ratio(x, y);
        if (lrho_mu == -kInf) return 0.0;
        const double lrho = k.log_acceptance_ratio(x, y);
        const double w = std::exp(lj + lrho_mu + lmx);
        if (lrho == -kInf) {
          if (w > kDivergenceWeight) diverged = true;
          return 0.0;
        }
        return w * (lrho_mu - lrho);
      },
      p.mu_range(), p.mu_range(), p.config().quad, mu_breaks,
      [&](double x) {
        auto br = k.breakpoints(x);
        const auto b2 = k_mu.breakpoints(x);
        br.insert(br.end(), b2.begin(), b2.end());
        return br;
      });
  note_convergence(est, moved.converged);

  // Diagonal part: int log(rbar/r) rbar dmu.
  double worst_inner = 0.0;
  bool inner_ok = true;
  const IntegralResult stay = integrate_1d(
      [&](double x) {
        const double mx = mu.pdf(x);
        if (mx == 0.0) return 0.0;
        const IntegralResult rb = k_mu.rejection_prob(x);
        inner_ok = inner_ok && rb.converged;
        if (rb.value == 0.0) return 0.0;
        const IntegralResult r = k.rejection_prob(x);
        inner_ok = inner_ok && r.converged;
        if (r.value == 0.0) {
          if (mx * rb.value > kDivergenceWeight) diverged = true;
          return 0.0;
        }
        const double lg = std::log(rb.value / r.value);
        worst_inner = std::max(
            worst_inner, mx * (rb.error_estimate * std::abs(lg + 1.0) +
                               r.error_estimate * rb.value / r.value));
        return mx * rb.value * lg;
      },
      p.mu_range(), p.config().quad, mu_breaks);
  note_convergence(est, stay.converged && inner_ok);

  est.error_estimate = moved.error_estimate + stay.error_estimate + worst_inner * p.mu_range().width();
  if (diverged) {
    est.diverged = true;
    est.value = kInf;
  } else {
    est.value = moved.value + stay.value;
  }
  return est;
}

BoundEstimate lb_dv_phi(const BoundProblem& p) {
  BoundEstimate est = make_estimate(BoundMethod::lb_dv_phi);
  const Density& mu = p.mu();
  const Density& pi = p.pi();
  const double log_cl = std::log(p.config().clip.c_l);
  const double log_cu = std::log(p.config().clip.c_u);
  const auto log_phi = [&](double y) {
    const double lp = pi.log_pdf(y);
    if (lp == -kInf) return log_cl;
    const double v = mu.log_pdf(y) - lp;
    return std::clamp(v, log_cl, log_cu);
  };
  const auto ends = support_ends(mu);
  auto outer_breaks = density_breakpoints(mu, p.config().quad.tail_mass);

  double worst_rel = 0.0;
  bool inner_ok = true;
  const IntegralResult outer = integrate_1d(
      [&](double x) {
        const double mx = mu.pdf(x);
        if (mx == 0.0) return 0.0;
        const IntegralResult ratio = p.kernel().apply_ratio(log_phi, x, ends);
        inner_ok = inner_ok && ratio.converged;
        worst_rel = std::max(worst_rel, ratio.error_estimate / ratio.value);
        return mx * std::log(ratio.value);
      },
      p.mu_range(), p.config().quad, outer_breaks);
  note_convergence(est, outer.converged && inner_ok);
  est.value = -outer.value;
  est.error_estimate = outer.error_estimate + worst_rel;
  return est;
}

IntegralResult variational_overlap(const BoundProblem& p, OverlapForm form) {
  const Density& mu = p.mu();
  const Density& pi = p.pi();
  const Proposal& j = p.proposal();
  const MhKernel& k = p.kernel();
  const Density both[] = {pi, mu};
  const Interval core = truncation_interval(both, p.config().quad.tail_mass);

  auto integrand = [&](double x, double y) {
    const double lpx = pi.log_pdf(x);
    const double lpy = pi.log_pdf(y);
    if (lpx == -kInf || lpy == -kInf) return 0.0;
    const double la = mu.log_pdf(x) + lpy;  // log mu(x)pi(y)
    const double lb = mu.log_pdf(y) + lpx;  // log mu(y)pi(x)
    const double lm = std::min(j.log_pdf(y, x) - lpy, j.log_pdf(x, y) - lpx);
    if (lm == -kInf) return 0.0;
    if (form == OverlapForm::symmetric) {
      const double hi = std::max(la, lb);
      const double lo = std::min(la, lb);
      if (hi == -kInf) return 0.0;
      const double d = std::expm1(0.5 * (lo - hi));
      return std::exp(lm + hi) * d * d;
    }
    if (la == -kInf) return 0.0;
    return 2.0 * (std::exp(lm + la) - std::exp(lm + 0.5 * (la + lb)));
  };
  const auto& breaks = p.breakpoints();
  return integrate_2d(integrand, core, core, p.config().quad, breaks, [&](double x) {
    auto br = k.breakpoints(x);
    br.insert(br.end(), breaks.begin(), breaks.end());
    return br;
  });
}

BoundEstimate lb_variational(const BoundProblem& p) {
  BoundEstimate est = make_estimate(BoundMethod::lb_variational);
  const Density both[] = {p.pi(), p.mu()};
  const Interval core = truncation_interval(both, p.config().quad.tail_mass);

  double max_log_phi = -kInf;
  for (int i = 0; i < kDerivativeProbes; ++i) {
    const double x = core.lo + core.width() * i / (kDerivativeProbes - 1);
    const double lp = p.pi().log_pdf(x);
    if (lp == -kInf) continue;
    max_log_phi = std::max(max_log_phi, p.mu().log_pdf(x) - lp);
  }
  if (max_log_phi >= std::log(kDerivativeCap)) {
    if (p.config().require_bounded_derivative) {
      throw Error(ErrorCode::DerivativeUnbounded,
                  "dmu/dpi exceeds 1e12 on the truncation interval for mu = " + p.mu().spec());
    }
    est.warnings.emplace_back("dmu/dpi exceeds 1e12 on the truncation interval");
  }

  const IntegralResult d = variational_overlap(p, OverlapForm::symmetric);
  note_convergence(est, d.converged);
  const double gap = 1.0 - 0.5 * d.value;
  if (gap > 0.0) {
    est.value = -std::log1p(-0.5 * d.value);
    est.error_estimate = 0.5 * d.error_estimate / gap;
  } else {
    est.diverged = true;
    est.value = -std::log(std::max(d.error_estimate, std::numeric_limits<double>::min()));
    est.error_estimate = kInf;
    est.warnings.emplace_back("1 - D/2 <= 0; value clamped");
  }
  return est;
}

BoundEstimate compute_bound(BoundMethod method, const BoundProblem& problem) {
  switch (method) {
    case BoundMethod::ub_indep: return ub_independent(problem);
    case BoundMethod::ub_mh: return ub_mh_kernel(problem);
    case BoundMethod::lb_dv_phi: return lb_dv_phi(problem);
    case BoundMethod::lb_variational: return lb_variational(problem);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown bound method");
}

BoundEstimate compute_bound(BoundMethod method, const Density& pi, const Proposal& proposal,
                            const Density& mu, const BoundConfig& cfg) {
  return compute_bound(method, BoundProblem(pi, proposal, mu, cfg));
}

}  // namespace mhtune
