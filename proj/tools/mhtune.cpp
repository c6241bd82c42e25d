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


#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mhtune/commands.hpp"
#include "mhtune/config.hpp"
#include "mhtune/error.hpp"

namespace {

struct Flags {
  std::string config;
  std::string target;
  std::string proposal;
  std::vector<std::string> mu;
  std::string method;
  std::string grid;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::size_t> ns;
  std::size_t chains = 0;
  int resolution = 0;
  std::string fixtures;
  double x0 = 0.0;
};

struct Bound {
  CLI::App* app;
  Flags flags;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; explicit flags take precedence");
  sub->add_option("--target", f.target, "target density, e.g. normal:0,1");
  sub->add_option("--proposal", f.proposal, "proposal family, e.g. imh:normal:m,s");
  sub->add_option("--mu", f.mu, "test measure density (repeatable)")->take_all();
  sub->add_option("--method", f.method, "ub-indep | ub-mh | lb-dv | lb-var");
  sub->add_option("--grid", f.grid, "grid, e.g. m=-3:3:0.1,s=0.2:3:0.1");
  sub->add_option("--eps", f.eps, "distance threshold");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--out", f.out, "output path (tune: file prefix)");
  sub->add_option("--ns", f.ns, "chain lengths, comma separated")->delimiter(',');
  sub->add_option("--chains", f.chains, "number of chains");
  sub->add_option("--resolution", f.resolution, "distance grid resolution");
  sub->add_option("--fixtures", f.fixtures, "finite-chain fixture file");
  sub->add_option("--x0", f.x0, "initial state (default: draw from the target)");
}

mhtune::ExperimentConfig resolve(CLI::App* sub, const Flags& f) {
  mhtune::ExperimentConfig c;
  if (!f.config.empty()) c = mhtune::ExperimentConfig::load(f.config);
  auto given = [&](const char* name) { return sub->get_option(name)->count() > 0; };
  if (given("--target")) c.target = f.target;
  if (given("--proposal")) c.proposal = f.proposal;
  if (given("--mu")) c.mu = f.mu;
  if (given("--method")) c.method = f.method;
  if (given("--grid")) c.grid = f.grid;
  if (given("--eps")) c.eps = f.eps;
  if (given("--seed")) c.seed = f.seed;
  if (given("--out")) c.out = f.out;
  if (given("--ns")) c.ns = f.ns;
  if (given("--chains")) c.chains = f.chains;
  if (given("--resolution")) c.resolution = f.resolution;
  if (given("--fixtures")) c.fixtures = f.fixtures;
  if (given("--x0")) c.x0 = f.x0;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-function bounds and proposal tuning for Metropolis-Hastings"};
  app.require_subcommand(1);
  std::vector<Bound> subs;
  subs.reserve(5);
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"bound", "evaluate one rate-function bound"},
           {"tune", "maximize a lower bound over a hyperparameter grid"},
           {"dist", "Levy distance and Levy-Prokhorov bracket"},
           {"simulate", "exceedance fractions of chain ensembles"},
           {"oracle", "exact rates on finite-state fixtures"}}) {
    subs.push_back({app.add_subcommand(name, help), {}});
  }
  for (auto& s : subs) add_flags(s.app, s.flags);
  CLI11_PARSE(app, argc, argv);

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    mhtune::ExperimentConfig cfg;
    try {
      cfg = resolve(s.app, s.flags);
    } catch (const mhtune::Error& e) {
      std::cerr << e.what() << '\n';
      return 1;
    }
    const std::string name = s.app->get_name();
    if (name == "bound") return mhtune::cmd_bound(cfg, std::cout, std::cerr);
    if (name == "tune") return mhtune::cmd_tune(cfg, std::cout, std::cerr);
    if (name == "dist") return mhtune::cmd_dist(cfg, std::cout, std::cerr);
    if (name == "simulate") return mhtune::cmd_simulate(cfg, std::cout, std::cerr);
    return mhtune::cmd_oracle(cfg, std::cout, std::cerr);
  }
  return 1;
}
