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

#include <ostream>
#include <string>

#include "mhtune/config.hpp"
#include "mhtune/sampler.hpp"
#include "mhtune/tuning.hpp"

namespace mhtune {

/// Exit codes: 0 success, 1 error (message on `err`), 2 divergence.
int cmd_bound(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
/// Writes <out>.csv, <out>.json and, for several measures, <out>.measures.csv
/// when cfg.out is set; always prints the summary JSON.
int cmd_tune(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err,
             const TuningOptions& options = {});
int cmd_dist(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
/// Writes the curve CSV to cfg.out, or to `out` when cfg.out is empty.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err,
                 const CurveOptions& options = {});
/// Runs the finite-state fixtures in cfg.fixtures; exit 2 when a sandwich or
/// duality check fails.
int cmd_oracle(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// 17 significant digits; inf, -inf and nan spelled out.
std::string format_csv_number(double v);
/// Header of axis names then `value`; one row per point in grid order.
std::string tuning_csv(const TuningResult& r);
/// Axis columns then one column per measure.
std::string tuning_measures_csv(const TuningResult& r);
/// {method, axes, argmax, max_value, ties, diverged_count, warnings}.
std::string tuning_summary_json(const TuningResult& r);
/// Header `n,fraction,slope_estimate`; slope is NA when unavailable.
std::string curve_csv(const ConvergenceCurve& c);

}  // namespace mhtune
