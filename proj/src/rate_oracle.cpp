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


#include "mhtune/rate_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mhtune/error.hpp"

namespace mhtune {

namespace {

constexpr double kSumTol = 1e-12;
constexpr std::size_t kMaxStates = 5;

void check_probability(std::span<const double> p, std::size_t n, const char* what, double tol) {
  if (p.size() != n) {
    throw Error(ErrorCode::InvalidParameter,
                std::string(what) + " has " + std::to_string(p.size()) + " entries, expected " +
                    std::to_string(n));
  }
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParameter, std::string(what) + " has a negative entry");
    }
    s += v;
  }
  if (std::abs(s - 1.0) > tol) {
    throw Error(ErrorCode::InvalidParameter, std::string(what) + " does not sum to 1");
  }
}

void check_mu(const FiniteMhChain& chain, std::span<const double> mu) {
  check_probability(mu, chain.size(), "mu", 1e-10);
  if (!reachable(chain, mu)) {
    throw Error(ErrorCode::UnreachableSupport,
                "no kernel dominated by K leaves mu invariant; the rate is +inf");
  }
}

// f(v) = sum_x mu_x (v_x - log sum_y K_xy e^{v_y}); concave in v.
class DvObjective {
 public:
  DvObjective(const FiniteMhChain& chain, std::span<const double> mu) : k_(chain.kernel) {
    for (std::size_t x = 0; x < mu.size(); ++x) {
      if (mu[x] > 0.0) {
        rows_.push_back(x);
        weights_.push_back(mu[x]);
      }
    }
    ev_.resize(chain.size());
  }

  double operator()(const std::vector<double>& v) const {
    for (std::size_t y = 0; y < v.size(); ++y) ev_[y] = std::exp(v[y]);
    return from_exp(v);
  }

  // Same as operator() with ev_ already holding exp(v).
  double from_exp(const std::vector<double>& v) const {
    double f = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& row = k_[rows_[i]];
      double s = 0.0;
      for (std::size_t y = 0; y < row.size(); ++y) s += row[y] * ev_[y];
      f += weights_[i] * (v[rows_[i]] - std::log(s));
    }
    return f;
  }

  std::vector<double>& exp_buffer() const { return ev_; }

 private:
  const Matrix& k_;
  std::vector<std::size_t> rows_;
  std::vector<double> weights_;
  mutable std::vector<double> ev_;
};

struct Candidate {
  double value;
  std::size_t index;
};

bool better(const Candidate& a, const Candidate& b) {
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

// Maximizes t -> f(v with v[i] = t) for concave f; returns the new value.
double line_maximize(const DvObjective& f, std::vector<double>& v, std::size_t i, double fv,
                     const DvSolverConfig& cfg) {
  auto g = [&](double t) {
    const double keep = v[i];
    v[i] = t;
    const double r = f(v);
    v[i] = keep;
    return r;
  };
  auto clamp_cap = [&](double t) { return std::clamp(t, -cfg.log_cap, cfg.log_cap); };
  // Bracket the maximum; concavity lets a doubling walk stop at the first
  // decrease.
  auto walk = [&](double t0, double dir, double& lo, double& hi) {
    double h = 0.5;
    double prev = t0;
    double cur = clamp_cap(t0 + dir * h);
    double fcur = g(cur);
    while (true) {
      h *= 2.0;
      const double next = clamp_cap(cur + dir * h);
      const double fnext = next == cur ? fcur : g(next);
      if (next == cur || fnext <= fcur) {
        lo = std::min(prev, next);
        hi = std::max(prev, next);
        return;
      }
      prev = cur;
      cur = next;
      fcur = fnext;
    }
  };
  const double t0 = v[i];
  double lo = clamp_cap(t0 - 0.5);
  double hi = clamp_cap(t0 + 0.5);
  if (g(hi) > fv) {
    walk(t0, 1.0, lo, hi);
  } else if (g(lo) > fv) {
    walk(t0, -1.0, lo, hi);
  }

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = g(c);
  double fd = g(d);
  while (b - a > cfg.tolerance * std::max(1.0, std::abs(a))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = g(d);
    }
  }
  const double t = 0.5 * (a + b);
  const double ft = g(t);
  if (ft >= fv) {
    v[i] = t;
    return ft;
  }
  return fv;
}

}  // namespace

FiniteMhChain FiniteMhChain::build(std::vector<double> pi, Matrix proposal) {
  const std::size_t n = pi.size();
  if (n < 2 || n > kMaxStates) {
    throw Error(ErrorCode::InvalidParameter, "finite chains need 2 to 5 states");
  }
  check_probability(pi, n, "target", kSumTol);
  for (double p : pi) {
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidParameter, "target must be positive");
  }
  if (proposal.size() != n) {
    throw Error(ErrorCode::InvalidParameter, "proposal must be square");
  }
  for (const auto& row : proposal) check_probability(row, n, "proposal row", kSumTol);

  FiniteMhChain c;
  c.target = std::move(pi);
  c.proposal = std::move(proposal);
  c.kernel.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    double rejected = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      const double jxy = c.proposal[x][y];
      if (jxy == 0.0) continue;
      const double ratio =
          std::min(1.0, c.target[y] * c.proposal[y][x] / (c.target[x] * jxy));
      c.kernel[x][y] = ratio * jxy;
      rejected += (1.0 - ratio) * jxy;
    }
    c.kernel[x][x] = c.proposal[x][x] + rejected;
  }
  return c;
}

bool reachable(const FiniteMhChain& chain, std::span<const double> mu) {
  // Supply-demand feasibility: every subset A of supp(mu) must send its mass
  // into its K-neighbourhood within supp(mu).
  const std::size_t n = chain.size();
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < n; ++x) {
    if (mu[x] > 0.0) support.push_back(x);
  }
  const std::size_t m = support.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    double mass = 0.0;
    double reach = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask & (std::size_t{1} << j)) mass += mu[support[j]];
    }
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t y = support[k];
      for (std::size_t j = 0; j < m; ++j) {
        if ((mask & (std::size_t{1} << j)) && chain.kernel[support[j]][y] > 0.0) {
          reach += mu[y];
          break;
        }
      }
    }
    if (mass > reach * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

FiniteRateValue finite_rate_dv(const FiniteMhChain& chain, std::span<const double> mu,
                               const DvSolverConfig& cfg) {
  check_mu(chain, mu);
  if (!(cfg.grid_step > 0.0) || cfg.grid_hi < cfg.grid_lo || cfg.starts < 1) {
    throw Error(ErrorCode::InvalidParameter, "invalid DV solver grid");
  }
  const std::size_t n = chain.size();
  const std::size_t free = n - 1;
  const std::size_t levels =
      static_cast<std::size_t>(std::floor((cfg.grid_hi - cfg.grid_lo) / cfg.grid_step + 1e-9)) + 1;
  std::vector<double> level_value(levels);
  std::vector<double> level_exp(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    level_value[i] = cfg.grid_lo + static_cast<double>(i) * cfg.grid_step;
    level_exp[i] = std::exp(level_value[i]);
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < free; ++i) total *= levels;

  DvObjective f(chain, mu);
  auto& ev = f.exp_buffer();
  std::vector<double> v(n, 0.0);
  std::vector<std::size_t> digit(free, 0);
  std::vector<Candidate> top;
  const std::size_t keep = static_cast<std::size_t>(cfg.starts);
  for (std::size_t idx = 0; idx < total; ++idx) {
    // First free coordinate is the most significant digit.
    std::size_t rem = idx;
    for (std::size_t k = free; k-- > 0;) {
      digit[k] = rem % levels;
      rem /= levels;
    }
    ev[0] = 1.0;
    v[0] = 0.0;
    for (std::size_t k = 0; k < free; ++k) {
      v[k + 1] = level_value[digit[k]];
      ev[k + 1] = level_exp[digit[k]];
    }
    const Candidate cand{f.from_exp(v), idx};
    if (top.size() < keep || better(cand, top.back())) {
      auto pos = std::lower_bound(top.begin(), top.end(), cand, better);
      top.insert(pos, cand);
      if (top.size() > keep) top.pop_back();
    }
  }

  FiniteRateValue best;
  best.value = -std::numeric_limits<double>::infinity();
  best.converged = false;
  std::size_t sweeps_total = 0;
  for (const Candidate& start : top) {
    std::size_t rem = start.index;
    for (std::size_t k = free; k-- > 0;) {
      v[k + 1] = level_value[rem % levels];
      rem /= levels;
    }
    v[0] = 0.0;
    double fv = f(v);
    bool converged = false;
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      ++sweeps_total;
      double moved = 0.0;
      const double before = fv;
      for (std::size_t i = 1; i < n; ++i) {
        const double t0 = v[i];
        fv = line_maximize(f, v, i, fv, cfg);
        moved = std::max(moved, std::abs(v[i] - t0));
      }
      if (moved <= cfg.tolerance || fv - before <= 1e-16 * std::max(1.0, std::abs(fv))) {
        converged = true;
        break;
      }
    }
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::exp(v[i]);
    const bool replace =
        fv > best.value + 1e-13 ||
        (std::abs(fv - best.value) <= 1e-13 &&
         std::lexicographical_compare(u.begin(), u.end(), best.maximizer_u.begin(),
                                      best.maximizer_u.end()));
    if (best.maximizer_u.empty() || replace) {
      best.value = fv;
      best.maximizer_u = std::move(u);
      best.converged = converged;
    }
  }
  best.iterations = sweeps_total;
  return best;
}

FiniteRateValue finite_rate_entropy(const FiniteMhChain& chain, std::span<const double> mu,
                                    double tolerance) {
  check_mu(chain, mu);
  const std::size_t n = chain.size();
  std::vector<std::size_t> s;
  for (std::size_t x = 0; x < n; ++x) {
    if (mu[x] > 0.0) s.push_back(x);
  }
  const std::size_t m = s.size();
  Matrix kern(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) kern[i][j] = mu[s[i]] * chain.kernel[s[i]][s[j]];
  }
  // gamma = diag(a) M diag(b) with both marginals mu.
  std::vector<double> a(m, 1.0);
  std::vector<double> b(m, 1.0);
  FiniteRateValue out;
  out.converged = false;
  constexpr std::size_t kMaxIter = 2'000'000;
  for (std::size_t it = 0; it < kMaxIter; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      double r = 0.0;
      for (std::size_t j = 0; j < m; ++j) r += kern[i][j] * b[j];
      a[i] = mu[s[i]] / r;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i < m; ++i) c += a[i] * kern[i][j];
      b[j] = mu[s[j]] / c;
    }
    // Columns are exact after the b update; rows carry the residual.
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double r = 0.0;
      for (std::size_t j = 0; j < m; ++j) r += a[i] * kern[i][j] * b[j];
      err = std::max(err, std::abs(r - mu[s[i]]) / mu[s[i]]);
    }
    out.iterations = it + 1;
    if (err <= tolerance) {
      out.converged = true;
      break;
    }
  }
  double value = 0.0;
  out.optimal_kernel = chain.kernel;
  for (std::size_t i = 0; i < m; ++i) {
    auto& row = out.optimal_kernel[s[i]];
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double g = a[i] * kern[i][j] * b[j];
      if (g > 0.0) value += g * std::log(a[i] * b[j]);
      row[s[j]] = g / mu[s[i]];
    }
  }
  out.value = value;
  return out;
}

double FiniteBounds::lower() const { return std::max(lb_dv_phi, lb_variational); }
double FiniteBounds::upper() const { return std::min(ub_indep, ub_mh); }

FiniteBounds finite_bounds(const FiniteMhChain& chain, std::span<const double> mu,
                           const ClipConfig& clip) {
  clip.validate();
  check_probability(mu, chain.size(), "mu", 1e-10);
  const std::size_t n = chain.size();
  const auto& k = chain.kernel;
  const auto& j = chain.proposal;
  const auto& pi = chain.target;
  const double inf = std::numeric_limits<double>::infinity();
  FiniteBounds out;

  for (std::size_t x = 0; x < n; ++x) {
    if (mu[x] == 0.0) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (mu[y] == 0.0) continue;
      if (k[x][y] == 0.0) {
        out.ub_indep = inf;
        break;
      }
      out.ub_indep += mu[x] * mu[y] * std::log(mu[y] / k[x][y]);
    }
  }

  // MH kernel targeting mu with the same proposal.
  for (std::size_t x = 0; x < n && out.ub_mh < inf; ++x) {
    if (mu[x] == 0.0) continue;
    std::vector<double> row(n, 0.0);
    double rejected = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || j[x][y] == 0.0) continue;
      const double ratio = mu[y] == 0.0 ? 0.0 : std::min(1.0, mu[y] * j[y][x] / (mu[x] * j[x][y]));
      row[y] = ratio * j[x][y];
      rejected += (1.0 - ratio) * j[x][y];
    }
    row[x] = j[x][x] + rejected;
    for (std::size_t y = 0; y < n; ++y) {
      if (row[y] == 0.0) continue;
      if (k[x][y] == 0.0) {
        out.ub_mh = inf;
        break;
      }
      out.ub_mh += mu[x] * row[y] * std::log(row[y] / k[x][y]);
    }
  }

  std::vector<double> phi(n);
  for (std::size_t x = 0; x < n; ++x) phi[x] = std::clamp(mu[x] / pi[x], clip.c_l, clip.c_u);
  for (std::size_t x = 0; x < n; ++x) {
    if (mu[x] == 0.0) continue;
    double kphi = 0.0;
    for (std::size_t y = 0; y < n; ++y) kphi += k[x][y] * phi[y];
    out.lb_dv_phi -= mu[x] * std::log(kphi / phi[x]);
  }

  double d = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double w = std::min(j[x][y] / pi[y], j[y][x] / pi[x]);
      const double diff = std::sqrt(mu[x] * pi[y]) - std::sqrt(mu[y] * pi[x]);
      d += w * diff * diff;
    }
  }
  out.lb_variational = -std::log1p(-0.5 * d);
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace mhtune
