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


#include "mhtune/tuning.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <set>

#include "mhtune/error.hpp"
#include "mhtune/lp_distance.hpp"
#include "mhtune/parallel.hpp"
#include "mhtune/rng.hpp"

namespace mhtune {

namespace {

constexpr double kSnap = 1e12;

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ConfigError,
                "bad number '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

struct Evaluation {
  std::vector<double> value;
  std::vector<unsigned char> bad;
  std::vector<std::vector<std::string>> notes;
};

// Evaluates `method` at every (point, measure) pair; index = point * M + m.
Evaluation evaluate_bounds(const Density& pi, const ProposalFamily& family,
                           std::span<const Density> measures, BoundMethod method,
                           const GridSpec& grid, const BoundConfig& cfg,
                           const TuningOptions& options) {
  const auto points = grid.points();
  const auto names = grid.names();
  const std::size_t m = measures.size();
  const std::size_t n = points.size() * m;
  Evaluation ev;
  ev.bad.assign(n, 0);
  ev.notes.resize(n);
  auto one = [&](std::size_t idx) -> double {
    const auto& p = points[idx / m];
    std::map<std::string, double> bind;
    for (std::size_t a = 0; a < names.size(); ++a) bind[names[a]] = p[a];
    try {
      const Proposal proposal = family.bind(bind);
      const BoundProblem problem(pi, proposal, measures[idx % m], cfg);
      BoundEstimate est = compute_bound(method, problem);
      if (est.diverged || !std::isfinite(est.value)) ev.bad[idx] = 1;
      ev.notes[idx] = std::move(est.warnings);
      return est.value;
    } catch (const Error& e) {
      ev.bad[idx] = 1;
      ev.notes[idx] = {e.what()};
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  ev.value = options.serial ? evaluate_indexed_serial(n, one)
                            : evaluate_indexed(n, one, worker_count(options.workers));
  return ev;
}

void check_axes(const ProposalFamily& family, const GridSpec& grid) {
  grid.validate();
  const auto wanted = family.hyperparameter_names();
  const auto given = grid.names();
  const std::set<std::string> w(wanted.begin(), wanted.end());
  const std::set<std::string> g(given.begin(), given.end());
  if (w != g) {
    std::string msg = "grid axes {";
    for (const auto& s : given) msg += " " + s;
    msg += " } do not match proposal hyperparameters {";
    for (const auto& s : wanted) msg += " " + s;
    throw Error(ErrorCode::ConfigError, msg + " }");
  }
}

// Warnings in first-occurrence order with counts.
void collect_notes(const Evaluation& ev, std::vector<std::string>& out) {
  std::vector<std::string> order;
  std::map<std::string, std::size_t> count;
  for (const auto& list : ev.notes) {
    for (const auto& w : list) {
      if (count[w]++ == 0) order.push_back(w);
    }
  }
  for (const auto& w : order) {
    out.push_back(w + " (" + std::to_string(count[w]) + " evaluations)");
  }
}

void finish(TuningResult& r, double tie_tol) {
  r.diverged_count = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (r.excluded[i]) {
      ++r.diverged_count;
    } else {
      best = std::max(best, r.values[i]);
    }
  }
  if (r.diverged_count == r.values.size()) {
    throw Error(ErrorCode::AllDiverged, "no grid point has a finite objective");
  }
  r.max_value = best;
  r.ties.clear();
  bool first = true;
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (r.excluded[i] || r.values[i] < best - tie_tol) continue;
    if (first) {
      r.argmax_index = i;
      r.argmax = r.points[i];
      first = false;
    }
    r.ties.push_back(r.points[i]);
  }
}

void require_lower(BoundMethod method) {
  if (kind_of(method) != BoundKind::lower) {
    throw Error(ErrorCode::NotALowerBound,
                std::string(to_string(method)) + " is an upper bound; tune a lower bound");
  }
}

}  // namespace

std::vector<double> GridAxis::values() const {
  const std::size_t count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    // + 0.0 turns -0 into 0.
    v[i] = std::round((lo + static_cast<double>(i) * step) * kSnap) / kSnap + 0.0;
  }
  return v;
}

GridSpec GridSpec::parse(std::string_view text) {
  GridSpec g;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorCode::ConfigError, "grid axis '" + std::string(item) +
                                              "' is not name=lo:hi:step");
    }
    GridAxis a;
    a.name = std::string(item.substr(0, eq));
    std::string_view range = item.substr(eq + 1);
    const std::size_t c1 = range.find(':');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : range.find(':', c1 + 1);
    if (c2 == std::string_view::npos || range.find(':', c2 + 1) != std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "grid axis '" + std::string(item) +
                                              "' is not name=lo:hi:step");
    }
    a.lo = parse_number(range.substr(0, c1), item);
    a.hi = parse_number(range.substr(c1 + 1, c2 - c1 - 1), item);
    a.step = parse_number(range.substr(c2 + 1), item);
    g.axes.push_back(std::move(a));
    pos = comma + 1;
  }
  g.validate();
  return g;
}

std::string GridSpec::spec() const {
  std::string s;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (i) s += ',';
    s += axes[i].name + '=' + format_number(axes[i].lo) + ':' + format_number(axes[i].hi) + ':' +
         format_number(axes[i].step);
  }
  return s;
}

void GridSpec::validate() const {
  if (axes.empty()) throw Error(ErrorCode::ConfigError, "grid has no axes");
  std::set<std::string> seen;
  for (const auto& a : axes) {
    if (!seen.insert(a.name).second) {
      throw Error(ErrorCode::ConfigError, "duplicate grid axis '" + a.name + "'");
    }
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo <= a.hi) || !(a.step > 0.0) ||
        !std::isfinite(a.step)) {
      throw Error(ErrorCode::ConfigError, "grid axis '" + a.name + "' needs lo <= hi, step > 0");
    }
  }
}

std::vector<std::vector<double>> GridSpec::points() const {
  std::vector<std::vector<double>> axis_values;
  for (const auto& a : axes) axis_values.push_back(a.values());
  std::vector<std::vector<double>> out;
  out.reserve(size());
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    std::vector<double> p(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) p[k] = axis_values[k][idx[k]];
    out.push_back(std::move(p));
    std::size_t k = axes.size();
    while (k-- > 0) {
      if (++idx[k] < axis_values[k].size()) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values().size();
  return n;
}

std::vector<std::string> GridSpec::names() const {
  std::vector<std::string> out;
  for (const auto& a : axes) out.push_back(a.name);
  return out;
}

std::vector<double> evaluate_indexed(std::size_t n, const std::function<double(std::size_t)>& f,
                                     int workers) {
  std::vector<double> out(n);
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(workers, 1))
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> evaluate_indexed_serial(std::size_t n,
                                            const std::function<double(std::size_t)>& f) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

TuningResult tune_single(const Density& pi, const ProposalFamily& family, const Density& mu,
                         BoundMethod method, const GridSpec& grid, const BoundConfig& cfg,
                         const TuningOptions& options) {
  require_lower(method);
  check_axes(family, grid);
  radon_nikodym(mu, pi);
  TuningResult r;
  r.objective = method;
  r.axis_names = grid.names();
  r.points = grid.points();
  if (mu.spec() == pi.spec()) {
    r.warnings.emplace_back("test measure equals the target; every lower bound is 0");
  }
  const Density measures[] = {mu};
  const Evaluation ev = evaluate_bounds(pi, family, measures, method, grid, cfg, options);
  r.values = ev.value;
  r.excluded.assign(ev.bad.begin(), ev.bad.end());
  collect_notes(ev, r.warnings);
  finish(r, options.tie_tol);
  return r;
}

TuningResult tune_multi(const Density& pi, const ProposalFamily& family,
                        std::span<const Density> measures, BoundMethod method,
                        const GridSpec& grid, double eps, const BoundConfig& cfg,
                        const TuningOptions& options) {
  require_lower(method);
  check_axes(family, grid);
  if (measures.empty()) throw Error(ErrorCode::InvalidParameter, "no test measures");
  for (const auto& mu : measures) radon_nikodym(mu, pi);
  TuningResult r;
  r.objective = method;
  r.axis_names = grid.names();
  r.points = grid.points();
  if (eps > 0.0) {
    for (const auto& mu : measures) {
      const DistanceReport d = prokhorov_bracket(mu, pi, options.distance_resolution);
      if (d.prokhorov_lower > 1.25 * eps || d.prokhorov_upper < 0.75 * eps) {
        r.warnings.push_back("distance bracket [" + format_number(d.prokhorov_lower) + ", " +
                             format_number(d.prokhorov_upper) + "] of " + mu.spec() +
                             " is not within 25% of eps " + format_number(eps));
      }
    }
  }
  const Evaluation ev = evaluate_bounds(pi, family, measures, method, grid, cfg, options);
  const std::size_t m = measures.size();
  const std::size_t n = r.points.size();
  r.per_measure_values.assign(m, std::vector<double>(n));
  r.values.resize(n);
  r.excluded.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double lowest = std::numeric_limits<double>::infinity();
    bool bad = false;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = ev.value[i * m + k];
      r.per_measure_values[k][i] = v;
      bad = bad || ev.bad[i * m + k];
      // NaN-safe minimum.
      if (!(v >= lowest)) lowest = v;
    }
    r.values[i] = lowest;
    r.excluded[i] = bad;
  }
  collect_notes(ev, r.warnings);
  finish(r, options.tie_tol);
  return r;
}

BoundaryReductionReport check_boundary_reduction(const FiniteMhChain& chain, double eps,
                                                 std::size_t samples, std::uint64_t seed) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParameter, "eps must be positive");
  constexpr double kShellWidth = 1e-3;
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = chain.size();
  BoundaryReductionReport rep;
  rep.exterior_min = inf;
  rep.shell_min = inf;
  Rng rng(seed);
  std::vector<double> mu(n);
  std::vector<double> shell(n);
  for (std::size_t s = 0; s < samples; ++s) {
    double total = 0.0;
    for (auto& v : mu) {
      v = -std::log(rng.uniform_open());
      total += v;
    }
    for (auto& v : mu) v /= total;
    const double d = tv_distance(mu, chain.target);
    if (std::abs(d - eps) <= kShellWidth) {
      rep.shell_min = std::min(rep.shell_min, finite_rate_dv(chain, mu).value);
      ++rep.shell_count;
    }
    if (d < eps) continue;
    rep.exterior_min = std::min(rep.exterior_min, finite_rate_dv(chain, mu).value);
    ++rep.exterior_count;
    const double t = eps / d;
    for (std::size_t i = 0; i < n; ++i) shell[i] = t * mu[i] + (1.0 - t) * chain.target[i];
    rep.shell_min = std::min(rep.shell_min, finite_rate_dv(chain, shell).value);
    ++rep.shell_count;
  }
  rep.holds = rep.exterior_count == 0 || rep.exterior_min >= rep.shell_min - 1e-6;
  return rep;
}

}  // namespace mhtune
