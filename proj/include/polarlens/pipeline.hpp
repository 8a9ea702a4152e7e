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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polarlens/scene_sim.hpp"
#include "polarlens/solvers.hpp"

namespace polarlens {

enum class AcquisitionMode { kGray3, kColor4 };

/// Flat key -> value settings, from a config file and/or command-line flags.
using ConfigMap = std::map<std::string, std::string>;

/// Everything one CLI command needs. Unset paths are empty.
struct RunConfig {
  AcquisitionMode mode = AcquisitionMode::kGray3;
  std::filesystem::path scene;
  std::filesystem::path psf;
  std::filesystem::path mask;
  std::filesystem::path measurement;
  std::filesystem::path pred;
  std::filesystem::path gt;
  std::filesystem::path stack;
  std::filesystem::path image;
  std::filesystem::path correspondences;
  std::filesystem::path out = ".";

  SolverConfig solver = SolverConfig::fista_simulation();
  SimConfig sim;
  /// Stripe repeats when the mask is generated rather than loaded.
  std::size_t mask_repeats = 4;
  /// Resample the scene to this size before simulating; 0 keeps the scene size.
  std::size_t height = 0;
  std::size_t width = 0;
  /// Clamp written estimates to >= 0.
  bool nonneg = true;
  /// White-balance colour PNG measurements on import.
  bool white_balance = true;
  double peak = 1.0;
};

/// Parses `key = value` lines. '#' starts a comment; keys use snake_case.
/// Errors carry "path:line".
ConfigMap read_config_file(const std::filesystem::path& path);

/// Keys understood by `make_run_config`.
const std::vector<std::string>& known_config_keys();

/// Builds a RunConfig. `preset` (simulation | real | psf_mismatch) and
/// `solver` pick the starting hyperparameters; individual keys then override.
/// Unknown keys and malformed values throw.
RunConfig make_run_config(const ConfigMap& values);

std::string to_string(AcquisitionMode mode);

/// Files written and a one-line summary for standard output.
struct CommandResult {
  std::vector<std::filesystem::path> outputs;
  std::string summary;
};

/// Scene + PSF (+ mask) -> measurement.ptf, mask.ptf, ground_truth.ptf and,
/// for four angles, guide.ptf. The summary carries the mask checksum.
CommandResult cmd_simulate(const RunConfig& cfg);
/// Measurement (PTF or PNG) + PSF (+ mask) -> estimate.ptf and trace.csv.
CommandResult cmd_reconstruct(const RunConfig& cfg);
/// pred + gt -> metrics.csv.
CommandResult cmd_evaluate(const RunConfig& cfg);
/// stack -> s0/s1/s2/dolp/aolp/degenerate PTFs.
CommandResult cmd_stokes(const RunConfig& cfg);
/// PNG + correspondences -> aligned.png and coverage.png.
CommandResult cmd_align(const RunConfig& cfg);
/// stack -> composite.png.
CommandResult cmd_viz(const RunConfig& cfg);

/// Bilinear resampling of every plane onto a height x width grid with pixel
/// centres aligned.
PolarizationStack resize_stack(const PolarizationStack& x, std::size_t height, std::size_t width);

}  // namespace polarlens
