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


#include "mhtune/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mhtune/error.hpp"

namespace mhtune {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

template <class T>
T get(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail("config key '" + key + "' has the wrong type");
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) fail("config key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& key) {
  if (!j.at(key).is_number_unsigned()) {
    fail("config key '" + key + "' must be a non-negative integer");
  }
  return j.at(key).get<std::uint64_t>();
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "chains",         "clip.c_l",      "clip.c_u",      "eps",
      "fixtures",       "grid",          "method",        "mu",
      "ns",             "out",           "proposal",      "quad.abs_tol",
      "quad.max_subdivisions",          "quad.rel_tol",  "quad.tail_mass",
      "resolution",     "seed",          "target",        "x0",
  };
  return keys;
}

ExperimentConfig ExperimentConfig::parse(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");
  const auto& known = config_keys();
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail("unknown config key '" + key + "'");
  }

  ExperimentConfig c;
  if (j.contains("target")) c.target = get<std::string>(j, "target");
  if (j.contains("proposal")) c.proposal = get<std::string>(j, "proposal");
  if (j.contains("mu")) c.mu = get<std::vector<std::string>>(j, "mu");
  if (j.contains("method")) c.method = get<std::string>(j, "method");
  if (j.contains("grid")) c.grid = get<std::string>(j, "grid");
  if (j.contains("eps") && !j.at("eps").is_null()) c.eps = get_number(j, "eps");
  if (j.contains("seed")) c.seed = get_unsigned(j, "seed");
  if (j.contains("out")) c.out = get<std::string>(j, "out");
  if (j.contains("ns")) {
    if (!j.at("ns").is_array()) fail("config key 'ns' must be an array");
    c.ns.clear();
    for (const auto& v : j.at("ns")) {
      if (!v.is_number_unsigned()) fail("config key 'ns' must hold non-negative integers");
      c.ns.push_back(v.get<std::size_t>());
    }
  }
  if (j.contains("chains")) c.chains = get_unsigned(j, "chains");
  if (j.contains("resolution")) c.resolution = static_cast<int>(get_unsigned(j, "resolution"));
  if (j.contains("fixtures")) c.fixtures = get<std::string>(j, "fixtures");
  if (j.contains("x0") && !j.at("x0").is_null()) c.x0 = get_number(j, "x0");
  if (j.contains("quad.abs_tol")) c.quad.abs_tol = get_number(j, "quad.abs_tol");
  if (j.contains("quad.rel_tol")) c.quad.rel_tol = get_number(j, "quad.rel_tol");
  if (j.contains("quad.max_subdivisions")) {
    c.quad.max_subdivisions = static_cast<int>(get_unsigned(j, "quad.max_subdivisions"));
  }
  if (j.contains("quad.tail_mass")) c.quad.tail_mass = get_number(j, "quad.tail_mass");
  if (j.contains("clip.c_l")) c.clip.c_l = get_number(j, "clip.c_l");
  if (j.contains("clip.c_u")) c.clip.c_u = get_number(j, "clip.c_u");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
  json j;
  j["target"] = target;
  j["proposal"] = proposal;
  j["mu"] = mu;
  j["method"] = method;
  j["grid"] = grid;
  j["eps"] = eps ? json(*eps) : json(nullptr);
  j["seed"] = seed;
  j["out"] = out;
  j["ns"] = ns;
  j["chains"] = chains;
  j["resolution"] = resolution;
  j["fixtures"] = fixtures;
  j["x0"] = x0 ? json(*x0) : json(nullptr);
  j["quad.abs_tol"] = quad.abs_tol;
  j["quad.rel_tol"] = quad.rel_tol;
  j["quad.max_subdivisions"] = quad.max_subdivisions;
  j["quad.tail_mass"] = quad.tail_mass;
  j["clip.c_l"] = clip.c_l;
  j["clip.c_u"] = clip.c_u;
  return j.dump(2) + "\n";
}

BoundConfig ExperimentConfig::bound_config() const {
  BoundConfig b;
  b.quad = quad;
  b.clip = clip;
  b.quad.validate();
  b.clip.validate();
  return b;
}

}  // namespace mhtune
