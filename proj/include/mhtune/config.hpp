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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhtune/bounds.hpp"
#include "mhtune/quadrature.hpp"

namespace mhtune {

/// Settings shared by all subcommands. Stored as a flat JSON object whose
/// keys are the member names, with quad.* and clip.* for the nested configs.
struct ExperimentConfig {
  std::string target = "normal:0,1";
  std::string proposal = "imh:normal:m,s";
  std::vector<std::string> mu;
  std::string method = "lb-dv";
  std::string grid = "m=-3:3:0.1,s=0.2:3:0.1";
  std::optional<double> eps;
  std::uint64_t seed = 1;
  std::string out;
  std::vector<std::size_t> ns = {100, 1000, 10000};
  std::size_t chains = 200;
  int resolution = 1000;
  std::string fixtures;
  std::optional<double> x0;
  QuadratureConfig quad;
  ClipConfig clip;

  /// Throws Error(ConfigError) on malformed JSON, wrong types or unknown keys.
  static ExperimentConfig parse(std::string_view json_text);
  static ExperimentConfig load(const std::string& path);
  /// Canonical form: every key, sorted, two-space indent, trailing newline.
  std::string serialize() const;

  BoundConfig bound_config() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Keys accepted by ExperimentConfig::parse.
const std::vector<std::string>& config_keys();

}  // namespace mhtune
