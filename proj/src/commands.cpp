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


#include "mhtune/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mhtune/bounds.hpp"
#include "mhtune/error.hpp"
#include "mhtune/lp_distance.hpp"
#include "mhtune/rate_oracle.hpp"

namespace mhtune {

namespace {

using ojson = nlohmann::ordered_json;

ojson number_or_text(double v) {
  if (std::isfinite(v)) return v;
  return format_csv_number(v);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorCode::ConfigError, "failed writing '" + path + "'");
}

Proposal fixed_proposal(const ExperimentConfig& cfg) {
  const ProposalFamily family = ProposalFamily::parse(cfg.proposal);
  if (!family.hyperparameter_names().empty()) {
    throw Error(ErrorCode::ConfigError,
                "proposal '" + cfg.proposal + "' has unbound hyperparameters; give literals");
  }
  return family.bind();
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::AllDiverged ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<double> read_vector(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, std::string(what) + " must be an array");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorCode::ConfigError, std::string(what) + " must be numeric");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

std::string format_csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tuning_csv(const TuningResult& r) {
  std::string s;
  for (const auto& name : r.axis_names) s += name + ',';
  s += "value\n";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    for (double v : r.points[i]) s += format_csv_number(v) + ',';
    s += format_csv_number(r.values[i]) + '\n';
  }
  return s;
}

std::string tuning_measures_csv(const TuningResult& r) {
  std::string s;
  for (const auto& name : r.axis_names) s += name + ',';
  for (std::size_t k = 0; k < r.per_measure_values.size(); ++k) {
    s += (k ? ",mu" : "mu") + std::to_string(k + 1);
  }
  s += '\n';
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    for (double v : r.points[i]) s += format_csv_number(v) + ',';
    for (std::size_t k = 0; k < r.per_measure_values.size(); ++k) {
      if (k) s += ',';
      s += format_csv_number(r.per_measure_values[k][i]);
    }
    s += '\n';
  }
  return s;
}

std::string tuning_summary_json(const TuningResult& r) {
  ojson j;
  j["method"] = std::string(to_string(r.objective));
  j["axes"] = r.axis_names;
  j["argmax"] = r.argmax;
  j["max_value"] = number_or_text(r.max_value);
  j["ties"] = r.ties;
  j["diverged_count"] = r.diverged_count;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

std::string curve_csv(const ConvergenceCurve& c) {
  std::string s = "n,fraction,slope_estimate\n";
  const std::string slope = c.slope ? format_csv_number(*c.slope) : "NA";
  for (const auto& p : c.points) {
    s += std::to_string(p.n) + ',' + format_csv_number(p.fraction) + ',' + slope + '\n';
  }
  return s;
}

int cmd_bound(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.mu.size() != 1) {
      throw Error(ErrorCode::ConfigError, "bound needs exactly one --mu");
    }
    const BoundMethod method = parse_bound_method(cfg.method);
    const BoundEstimate e = compute_bound(method, parse_density(cfg.target), fixed_proposal(cfg),
                                          parse_density(cfg.mu.front()), cfg.bound_config());
    ojson j;
    j["method"] = std::string(to_string(e.method));
    j["kind"] = e.kind == BoundKind::upper ? "upper" : "lower";
    j["value"] = number_or_text(e.value);
    j["error_estimate"] = number_or_text(e.error_estimate);
    j["diverged"] = e.diverged;
    j["converged"] = e.converged;
    j["warnings"] = e.warnings;
    out << j.dump(2) << '\n';
    return e.diverged ? 2 : 0;
  });
}

int cmd_tune(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err,
             const TuningOptions& options) {
  return guarded(err, [&] {
    if (cfg.mu.empty()) throw Error(ErrorCode::ConfigError, "tune needs at least one --mu");
    const Density pi = parse_density(cfg.target);
    const ProposalFamily family = ProposalFamily::parse(cfg.proposal);
    const GridSpec grid = GridSpec::parse(cfg.grid);
    const BoundMethod method = parse_bound_method(cfg.method);
    TuningOptions opts = options;
    opts.distance_resolution = cfg.resolution;
    TuningResult r;
    if (cfg.mu.size() == 1) {
      r = tune_single(pi, family, parse_density(cfg.mu.front()), method, grid, cfg.bound_config(),
                      opts);
    } else {
      std::vector<Density> measures;
      for (const auto& m : cfg.mu) measures.push_back(parse_density(m));
      r = tune_multi(pi, family, measures, method, grid, cfg.eps.value_or(0.0),
                     cfg.bound_config(), opts);
    }
    const std::string summary = tuning_summary_json(r);
    if (!cfg.out.empty()) {
      write_file(cfg.out + ".csv", tuning_csv(r));
      write_file(cfg.out + ".json", summary);
      if (!r.per_measure_values.empty()) {
        write_file(cfg.out + ".measures.csv", tuning_measures_csv(r));
      }
    }
    out << summary;
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    return 0;
  });
}

int cmd_dist(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.mu.empty() || cfg.mu.size() > 2) {
      throw Error(ErrorCode::ConfigError,
                  "dist needs one --mu (compared with --target) or two --mu");
    }
    const Density a = parse_density(cfg.mu[0]);
    const Density b = parse_density(cfg.mu.size() == 2 ? cfg.mu[1] : cfg.target);
    const DistanceReport d = prokhorov_bracket(a, b, cfg.resolution);
    ojson j;
    j["levy"] = d.levy;
    j["prokhorov_lower"] = d.prokhorov_lower;
    j["prokhorov_upper"] = d.prokhorov_upper;
    j["grid_resolution"] = d.grid_resolution;
    j["bin_width"] = d.bin_width;
    out << j.dump(2) << '\n';
    return 0;
  });
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err,
                 const CurveOptions& options) {
  return guarded(err, [&] {
    if (!cfg.eps) throw Error(ErrorCode::ConfigError, "simulate needs --eps");
    CurveOptions opts = options;
    if (cfg.x0) opts.x0 = cfg.x0;
    const ConvergenceCurve c = convergence_curve(parse_density(cfg.target), fixed_proposal(cfg),
                                                 *cfg.eps, cfg.ns, cfg.chains, cfg.seed, opts);
    const std::string csv = curve_csv(c);
    if (cfg.out.empty()) {
      out << csv;
    } else {
      write_file(cfg.out, csv);
    }
    return 0;
  });
}

int cmd_oracle(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.fixtures.empty()) throw Error(ErrorCode::ConfigError, "oracle needs --fixtures");
    std::ifstream in(cfg.fixtures, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read '" + cfg.fixtures + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ConfigError, std::string("fixtures: ") + e.what());
    }
    if (!doc.contains("instances") || !doc["instances"].is_array()) {
      throw Error(ErrorCode::ConfigError, "fixtures need an 'instances' array");
    }
    constexpr double kSlack = 1e-6;
    ojson results = ojson::array();
    bool all_ok = true;
    std::size_t index = 0;
    for (const auto& inst : doc["instances"]) {
      const std::string name = inst.value("name", "instance" + std::to_string(index));
      ++index;
      Matrix j;
      for (const auto& row : inst.at("J")) j.push_back(read_vector(row, "J row"));
      const FiniteMhChain chain = FiniteMhChain::build(read_vector(inst.at("pi"), "pi"), j);
      for (const auto& m : inst.at("mu")) {
        const std::vector<double> mu = read_vector(m, "mu");
        const FiniteRateValue dv = finite_rate_dv(chain, mu);
        const FiniteRateValue ent = finite_rate_entropy(chain, mu);
        const FiniteBounds b = finite_bounds(chain, mu, cfg.clip);
        const double gap = std::abs(dv.value - ent.value);
        const bool sandwich = b.lower() <= dv.value + kSlack && dv.value <= b.upper() + kSlack;
        const bool duality = gap <= kSlack;
        all_ok = all_ok && sandwich && duality;
        ojson r;
        r["instance"] = name;
        r["mu"] = mu;
        r["rate_dv"] = dv.value;
        r["rate_entropy"] = ent.value;
        r["duality_gap"] = gap;
        r["ub_indep"] = number_or_text(b.ub_indep);
        r["ub_mh"] = number_or_text(b.ub_mh);
        r["lb_dv"] = b.lb_dv_phi;
        r["lb_var"] = b.lb_variational;
        r["sandwich"] = sandwich;
        r["duality"] = duality;
        results.push_back(std::move(r));
      }
    }
    out << results.dump(2) << '\n';
    return all_ok ? 0 : 2;
  });
}

}  // namespace mhtune
