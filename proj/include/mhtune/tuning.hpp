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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhtune/bounds.hpp"
#include "mhtune/density.hpp"
#include "mhtune/mh_kernel.hpp"
#include "mhtune/rate_oracle.hpp"

namespace mhtune {

struct GridAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  /// lo, lo+step, ... up to hi, each rounded to 12 decimals so that e.g.
  /// -3 + 30*0.1 is exactly 0.
  std::vector<double> values() const;
};

/// Cartesian grid; points enumerate in lexicographic order (first axis
/// slowest).
struct GridSpec {
  std::vector<GridAxis> axes;

  /// Parses `m=-3:3:0.1,s=0.2:3:0.1`.
  static GridSpec parse(std::string_view text);
  std::string spec() const;
  void validate() const;
  std::vector<std::vector<double>> points() const;
  std::size_t size() const;
  std::vector<std::string> names() const;
};

struct TuningOptions {
  /// 0 uses worker_count(); capped by MHTUNE_THREADS either way.
  int workers = 0;
  /// Plain loop instead of the OpenMP loop; results are identical.
  bool serial = false;
  double tie_tol = 1e-9;
  /// Resolution of the distance bracket used for the eps check.
  int distance_resolution = 1000;
};

struct TuningResult {
  BoundMethod objective = BoundMethod::lb_dv_phi;
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> points;
  /// Objective per point; for several measures the pointwise minimum.
  std::vector<double> values;
  /// Diverged, failed or non-finite points; never chosen as argmax.
  std::vector<bool> excluded;
  /// [measure][point]; filled for tune_multi only.
  std::vector<std::vector<double>> per_measure_values;
  std::size_t argmax_index = 0;
  std::vector<double> argmax;
  double max_value = 0.0;
  /// Points within tie_tol of the max, lexicographically sorted.
  std::vector<std::vector<double>> ties;
  std::size_t diverged_count = 0;
  std::vector<std::string> warnings;
};

/// out[i] = f(i) for i < n over `workers` OpenMP threads. f must be safe to
/// call concurrently for distinct i.
std::vector<double> evaluate_indexed(std::size_t n, const std::function<double(std::size_t)>& f,
                                     int workers);
std::vector<double> evaluate_indexed_serial(std::size_t n,
                                            const std::function<double(std::size_t)>& f);

/// argmax over the grid of a lower bound at mu. Throws NotALowerBound for
/// upper-bound methods and AllDiverged when no point is finite.
TuningResult tune_single(const Density& pi, const ProposalFamily& family, const Density& mu,
                         BoundMethod method, const GridSpec& grid, const BoundConfig& cfg,
                         const TuningOptions& options = {});

/// argmax over the grid of the minimum lower bound across `measures`. When
/// eps > 0, warns for measures whose distance bracket to pi is not within
/// 25% of eps.
TuningResult tune_multi(const Density& pi, const ProposalFamily& family,
                        std::span<const Density> measures, BoundMethod method,
                        const GridSpec& grid, double eps, const BoundConfig& cfg,
                        const TuningOptions& options = {});

struct BoundaryReductionReport {
  bool holds = true;
  /// Minimum rate over sampled measures at distance >= eps (+inf if none).
  double exterior_min = 0.0;
  /// Minimum rate over measures on the eps shell (+inf if none).
  double shell_min = 0.0;
  std::size_t exterior_count = 0;
  std::size_t shell_count = 0;
};

/// Samples `samples` measures uniformly on the simplex; those at total
/// variation >= eps from pi form the exterior, and their radial projections
/// toward pi onto TV = eps (plus samples already within 1e-3 of it) form the
/// shell. Holds iff exterior_min >= shell_min - 1e-6.
BoundaryReductionReport check_boundary_reduction(const FiniteMhChain& chain, double eps,
                                                 std::size_t samples = 1000,
                                                 std::uint64_t seed = 1);

}  // namespace mhtune
