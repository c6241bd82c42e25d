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
#include <span>

#include "mhtune/density.hpp"

namespace mhtune {

/// Bracket on the Levy-Prokhorov distance. `bin_width` is the slack h added
/// to the coupling bound.
struct DistanceReport {
  double levy = 0.0;
  double prokhorov_lower = 0.0;
  double prokhorov_upper = 0.0;
  int grid_resolution = 0;
  double bin_width = 0.0;
};

using Cdf = std::function<double(double)>;

/// Smallest eps with F(x-eps)-eps <= G(x) <= F(x+eps)+eps, checked in both
/// directions at every point of `grid`; bisection to `tol`. Symmetric in
/// (F, G) by construction.
double levy_distance(const Cdf& f, const Cdf& g, std::span<const double> grid, double tol = 1e-6);

/// Levy distance with the check grid at the i/resolution quantiles of both
/// measures (resolution >= 100).
double levy_distance(const Density& mu, const Density& nu, int resolution, double tol = 1e-6);

/// Levy distance between the empirical measure of `sorted_samples` and a
/// continuous density. Exact at the jumps; bisection to `tol`.
double levy_distance_empirical(std::span<const double> sorted_samples, const Density& nu,
                               double tol = 1e-9);

/// Lower end: the Levy distance. Upper end: Ky Fan bound of the quantile
/// coupling between the two measures binned on a common grid of
/// `resolution` cells of width h, plus h and the mass left outside the grid.
DistanceReport prokhorov_bracket(const Density& mu, const Density& nu, int resolution);

}  // namespace mhtune
