// Copyright 2026 The polarlens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: simulate, reconstruct, evaluate, stokes, align, viz.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <string>

#include "polarlens/pipeline.hpp"

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

// Shared by every subcommand; values override the --config file.
constexpr Flag kFlags[] = {
    {"--mode", "mode", "gray3 | color4"},
    {"--solver", "solver", "fista | admm"},
    {"--preset", "preset", "FISTA defaults: simulation | real | psf_mismatch"},
    {"--iters", "iters", "solver iterations"},
    {"--lambda", "lambda", "spatial TV weight"},
    {"--lambda-w", "lambda_w", "polarization-axis TV weight"},
    {"--c", "c", "FISTA step factor (step = 1/(L*c))"},
    {"--rho", "rho", "ADMM penalty"},
    {"--cg-tol", "cg_tol", "ADMM inner CG relative tolerance"},
    {"--cg-max-iter", "cg_max_iter", "ADMM inner CG iteration cap"},
    {"--log-every", "log_every", "objective logging interval"},
    {"--seed", "seed", "noise seed"},
    {"--noise-sigma", "noise_sigma", "additive Gaussian noise sigma"},
    {"--repeats", "repeats", "stripe sequence repeats of a generated mask"},
    {"--height", "height", "output height (simulate resamples the scene; align sets output size)"},
    {"--width", "width", "output width"},
    {"--peak", "peak", "metric data range"},
    {"--nonneg", "nonneg", "clamp written estimates to >= 0"},
    {"--white-balance", "white_balance", "white-balance colour PNG measurements"},
    {"--scene", "scene", "scene stack (PTF)"},
    {"--psf", "psf", "PSF (PTF)"},
    {"--mask", "mask", "polarization mask (PTF); generated from stripes when omitted"},
    {"--measurement", "measurement", "measurement (PTF or PNG)"},
    {"--pred", "pred", "predicted stack (PTF)"},
    {"--gt", "gt", "ground-truth stack (PTF)"},
    {"--stack", "stack", "polarization stack (PTF)"},
    {"--image", "image", "image to align (PNG)"},
    {"--correspondences", "correspondences", "'sx sy dx dy' text file"},
    {"--out", "out", "output directory"},
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lensless polarization imaging: simulation, reconstruction and evaluation"};
  app.require_subcommand(1);

  std::map<std::string, std::string> flag_values;
  std::string config_path;

  using Command = polarlens::CommandResult (*)(const polarlens::RunConfig&);
  const std::pair<const char*, Command> commands[] = {
      {"simulate", polarlens::cmd_simulate},   {"reconstruct", polarlens::cmd_reconstruct},
      {"evaluate", polarlens::cmd_evaluate},   {"stokes", polarlens::cmd_stokes},
      {"align", polarlens::cmd_align},         {"viz", polarlens::cmd_viz}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat 'key = value' config file");
    for (const Flag& f : kFlags) sub->add_option(f.name, flag_values[f.key], f.help);
    subs[name] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  std::string active;
  Command run = nullptr;
  for (const auto& [name, fn] : commands) {
    if (subs[name]->parsed()) {
      active = name;
      run = fn;
    }
  }

  try {
    polarlens::ConfigMap values;
    if (!config_path.empty()) values = polarlens::read_config_file(config_path);
    for (const Flag& f : kFlags) {
      if (subs[active]->count(f.name) > 0) values[f.key] = flag_values[f.key];
    }
    const polarlens::RunConfig cfg = polarlens::make_run_config(values);
    const polarlens::CommandResult result = run(cfg);
    for (const auto& path : result.outputs) std::cout << "wrote " << path.string() << '\n';
    std::cout << result.summary << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error command=" << active << " message=\"" << one_line(e.what()) << "\"\n";
    return 1;
  }
  return 0;
}
