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

#include "polarlens/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <cmath>
#include <sstream>

#include "polarlens/homography.hpp"
#include "polarlens/metrics.hpp"
#include "polarlens/png_io.hpp"
#include "polarlens/polarimetry.hpp"
#include "polarlens/ptf.hpp"

namespace polarlens {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  unsigned long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error("config key '" + key + "': expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error("config key '" + key + "': expected a boolean, got '" + text + "'");
}

AcquisitionMode parse_mode(const std::string& text) {
  if (text == "gray3") return AcquisitionMode::kGray3;
  if (text == "color4") return AcquisitionMode::kColor4;
  throw Error("mode must be gray3 or color4, got '" + text + "'");
}

std::size_t mode_angles(AcquisitionMode mode) { return mode == AcquisitionMode::kGray3 ? 3 : 4; }
std::size_t mode_channels(AcquisitionMode mode) { return mode == AcquisitionMode::kGray3 ? 1 : 3; }

void require_path(const std::filesystem::path& p, const char* key) {
  if (p.empty()) throw Error(std::string("missing required setting '") + key + "'");
  if (!std::filesystem::exists(p)) throw Error(p.string() + ": file not found");
}

std::filesystem::path output_path(const RunConfig& cfg, const char* name) {
  std::filesystem::create_directories(cfg.out);
  return cfg.out / name;
}

/// Brings a stack into the configured acquisition mode.
PolarizationStack conform_stack(PolarizationStack x, AcquisitionMode mode, const std::string& what) {
  if (mode == AcquisitionMode::kGray3) {
    if (x.channels() == 1 && x.angles() == 3) return x;
    if (x.angle_index(0) >= 0 && x.angle_index(45) >= 0 && x.angle_index(90) >= 0) return to_gray3(x);
  } else if (x.channels() == 3 && x.angles() == 4) {
    return x;
  }
  throw Error(what + " with " + std::to_string(x.channels()) + " channels and " +
              std::to_string(x.angles()) + " angles does not fit mode " + to_string(mode));
}

Psf load_psf(const RunConfig& cfg) {
  require_path(cfg.psf, "psf");
  Psf psf = psf_from_tensor(load_tensor(cfg.psf));
  if (cfg.mode == AcquisitionMode::kGray3) {
    psf = psf_to_grayscale(psf);
  } else if (psf.channels() != 3) {
    throw Error(cfg.psf.string() + ": color4 mode needs a 3-channel PSF");
  }
  return normalize_psf(psf);
}

PolarizationMask load_or_generate_mask(const RunConfig& cfg, std::size_t height, std::size_t width) {
  const std::size_t angles = mode_angles(cfg.mode);
  if (!cfg.mask.empty()) {
    require_path(cfg.mask, "mask");
    PolarizationMask mask = mask_from_tensor(load_tensor(cfg.mask));
    if (mask.height() != height || mask.width() != width || mask.angles() != angles) {
      throw Error(cfg.mask.string() + ": mask dims do not match the data and mode");
    }
    return mask;
  }
  return generate_stripe_mask({height, width, default_angle_labels(angles), cfg.mask_repeats});
}

Measurement load_measurement(const RunConfig& cfg) {
  require_path(cfg.measurement, "measurement");
  Measurement y;
  std::string ext = cfg.measurement.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == ".png") {
    const RawImage raw = read_png_raw(cfg.measurement);
    y = preprocess_raw(raw, raw.bit_depth, cfg.white_balance);
  } else {
    y.image = image_from_tensor(load_tensor(cfg.measurement));
  }
  const std::size_t channels = mode_channels(cfg.mode);
  if (y.image.channels() == 3 && channels == 1) {
    Image gray(y.image.height(), y.image.width(), 1);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto src = y.image.plane(c);
      auto dst = gray.plane(0);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] / 3.0;
    }
    y.image = std::move(gray);
  }
  if (y.image.channels() != channels) {
    throw Error(cfg.measurement.string() + ": measurement channel count does not fit mode " +
                to_string(cfg.mode));
  }
  return y;
}

PolarizationStack load_stack(const std::filesystem::path& path, const char* key) {
  require_path(path, key);
  return stack_from_tensor(load_tensor(path));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(AcquisitionMode mode) {
  return mode == AcquisitionMode::kGray3 ? "gray3" : "color4";
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open config file");
  ConfigMap values;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const auto& keys = known_config_keys();
    if (key.empty() || std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error(where + ": unknown key '" + key + "'");
    }
    values[key] = value;
  }
  return values;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "mode",     "scene",      "psf",         "mask",        "measurement", "pred",
      "gt",       "stack",      "image",       "correspondences", "out",     "preset",
      "solver",   "iters",      "lambda",      "lambda_w",    "c",           "rho",
      "cg_tol",   "cg_max_iter", "noise_scale", "log_every",  "lipschitz_iters",
      "lipschitz_seed", "seed", "noise_sigma", "repeats",     "height",      "width",
      "nonneg",   "white_balance", "peak"};
  return keys;
}

RunConfig make_run_config(const ConfigMap& values) {
  const auto& keys = known_config_keys();
  for (const auto& [key, value] : values) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error("unknown config key '" + key + "'");
    }
  }
  auto get = [&values](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };

  RunConfig cfg;
  if (auto v = get("mode")) cfg.mode = parse_mode(*v);

  const std::string solver = get("solver").value_or("fista");
  const std::string preset = get("preset").value_or("simulation");
  if (solver == "fista") {
    if (preset == "simulation") {
      cfg.solver = SolverConfig::fista_simulation();
    } else if (preset == "real") {
      cfg.solver = SolverConfig::fista_real();
    } else if (preset == "psf_mismatch") {
      cfg.solver = SolverConfig::fista_psf_mismatch();
    } else {
      throw Error("preset must be simulation, real or psf_mismatch, got '" + preset + "'");
    }
  } else if (solver == "admm") {
    if (preset != "simulation") throw Error("the ADMM solver only has the simulation preset");
    cfg.solver = SolverConfig::admm_simulation();
  } else {
    throw Error("solver must be fista or admm, got '" + solver + "'");
  }

  const std::pair<const char*, std::filesystem::path RunConfig::*> paths[] = {
      {"scene", &RunConfig::scene},     {"psf", &RunConfig::psf},
      {"mask", &RunConfig::mask},       {"measurement", &RunConfig::measurement},
      {"pred", &RunConfig::pred},       {"gt", &RunConfig::gt},
      {"stack", &RunConfig::stack},     {"image", &RunConfig::image},
      {"correspondences", &RunConfig::correspondences}, {"out", &RunConfig::out}};
  for (const auto& [key, member] : paths) {
    if (auto v = get(key)) cfg.*member = *v;
  }

  SolverConfig& s = cfg.solver;
  if (auto v = get("iters")) s.iterations = parse_count("iters", *v);
  if (auto v = get("lambda")) s.lambda = parse_double("lambda", *v);
  if (auto v = get("lambda_w")) s.lambda_w = parse_double("lambda_w", *v);
  if (auto v = get("c")) s.step_factor = parse_double("c", *v);
  if (auto v = get("rho")) s.rho = parse_double("rho", *v);
  if (auto v = get("cg_tol")) s.cg_tol = parse_double("cg_tol", *v);
  if (auto v = get("cg_max_iter")) s.cg_max_iter = parse_count("cg_max_iter", *v);
  if (auto v = get("noise_scale")) s.noise_scale = parse_double("noise_scale", *v);
  if (auto v = get("log_every")) s.log_every = parse_count("log_every", *v);
  if (auto v = get("lipschitz_iters")) s.lipschitz_iters = parse_count("lipschitz_iters", *v);
  if (auto v = get("lipschitz_seed")) s.lipschitz_seed = parse_count("lipschitz_seed", *v);
  s.validate();

  if (auto v = get("seed")) cfg.sim.seed = parse_count("seed", *v);
  if (auto v = get("noise_sigma")) cfg.sim.noise_sigma = parse_double("noise_sigma", *v);
  if (!(cfg.sim.noise_sigma >= 0.0)) throw Error("noise_sigma must be >= 0");
  if (auto v = get("repeats")) cfg.mask_repeats = parse_count("repeats", *v);
  if (auto v = get("height")) cfg.height = parse_count("height", *v);
  if (auto v = get("width")) cfg.width = parse_count("width", *v);
  if ((cfg.height == 0) != (cfg.width == 0)) throw Error("height and width must be set together");
  if (auto v = get("nonneg")) cfg.nonneg = parse_bool("nonneg", *v);
  if (auto v = get("white_balance")) cfg.white_balance = parse_bool("white_balance", *v);
  if (auto v = get("peak")) cfg.peak = parse_double("peak", *v);
  if (!(cfg.peak > 0.0)) throw Error("peak must be > 0");
  return cfg;
}

PolarizationStack resize_stack(const PolarizationStack& x, std::size_t height, std::size_t width) {
  if (height == x.height() && width == x.width()) return x;
  const double sy = static_cast<double>(height) / static_cast<double>(x.height());
  const double sx = static_cast<double>(width) / static_cast<double>(x.width());
  // Maps source pixel centres onto destination pixel centres.
  Eigen::Matrix3d m;
  m << sx, 0, 0.5 * (sx - 1.0), 0, sy, 0.5 * (sy - 1.0), 0, 0, 1;
  const Homography h(m);
  PolarizationStack out(height, width, x.channels(), x.angle_labels());
  for (std::size_t p = 0; p < x.angles(); ++p) {
    for (std::size_t c = 0; c < x.channels(); ++c) {
      const auto src = x.plane(p, c);
      Image plane(x.height(), x.width(), 1, {src.begin(), src.end()});
      const WarpResult warped = warp_image(plane, h, height, width);
      auto dst = out.plane(p, c);
      const auto vals = warped.image.values();
      const Homography inv = h.inverse();
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t col = 0; col < width; ++col) {
          const std::size_t i = r * width + col;
          if (warped.coverage[i]) {
            dst[i] = vals[i];
          } else {
            // Upsampled border pixels land just outside the source grid.
            const Point2 s = inv.apply({static_cast<double>(col), static_cast<double>(r)});
            const auto sr = static_cast<std::size_t>(
                std::clamp(std::lround(s.y), 0L, static_cast<long>(x.height() - 1)));
            const auto sc = static_cast<std::size_t>(
                std::clamp(std::lround(s.x), 0L, static_cast<long>(x.width() - 1)));
            dst[i] = src[sr * x.width() + sc];
          }
        }
      }
    }
  }
  return out;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  PolarizationStack scene = conform_stack(load_stack(cfg.scene, "scene"), cfg.mode, "scene");
  scene.require_finite("scene");
  if (cfg.height != 0) scene = resize_stack(scene, cfg.height, cfg.width);
  const Psf psf = load_psf(cfg);
  const PolarizationMask mask = load_or_generate_mask(cfg, scene.height(), scene.width());
  if (!mask.is_partition()) throw Error("mask violates the per-pixel partition property");

  const ForwardOperator op(psf, mask);
  const Measurement y = simulate_measurement(op, scene, cfg.sim);

  CommandResult result;
  const auto measurement_path = output_path(cfg, "measurement.ptf");
  save_tensor(y.image, measurement_path);
  result.outputs.push_back(measurement_path);
  const auto mask_path = output_path(cfg, "mask.ptf");
  save_tensor(mask, mask_path);
  result.outputs.push_back(mask_path);
  const auto gt_path = output_path(cfg, "ground_truth.ptf");
  save_tensor(scene, gt_path);
  result.outputs.push_back(gt_path);
  if (scene.angles() == 4) {
    const auto guide_path = output_path(cfg, "guide.ptf");
    save_tensor(compute_rgb_guide(scene), guide_path);
    result.outputs.push_back(guide_path);
  }
  result.summary = "mask_checksum=" + hex64(mask.checksum()) + " measurement=" +
                   std::to_string(y.image.height()) + "x" + std::to_string(y.image.width()) + "x" +
                   std::to_string(y.image.channels()) + " noise_sigma=" + fmt(y.noise_sigma);
  return result;
}

CommandResult cmd_reconstruct(const RunConfig& cfg) {
  const Measurement y = load_measurement(cfg);
  const Psf psf = load_psf(cfg);
  const PolarizationMask mask = load_or_generate_mask(cfg, y.image.height(), y.image.width());
  const ForwardOperator op(psf, mask);

  SolveReport report = reconstruct(y, op, cfg.solver);
  if (cfg.nonneg) report.estimate.clamp_nonnegative();

  CommandResult result;
  const auto estimate_path = output_path(cfg, "estimate.ptf");
  save_tensor(report.estimate, estimate_path);
  result.outputs.push_back(estimate_path);
  const auto trace_path = output_path(cfg, "trace.csv");
  write_trace_csv(report, trace_path);
  result.outputs.push_back(trace_path);
  result.summary = std::string("solver=") +
                   (cfg.solver.kind == SolverKind::kFista ? "fista" : "admm") +
                   " iterations=" + std::to_string(report.iterations) +
                   " final_objective=" + fmt(report.final_objective);
  if (cfg.solver.kind == SolverKind::kFista) result.summary += " lipschitz=" + fmt(report.lipschitz);
  return result;
}

CommandResult cmd_evaluate(const RunConfig& cfg) {
  const PolarizationStack pred = conform_stack(load_stack(cfg.pred, "pred"), cfg.mode, "prediction");
  const PolarizationStack gt = conform_stack(load_stack(cfg.gt, "gt"), cfg.mode, "ground truth");
  const MetricReport report = evaluate_stack(pred, gt, cfg.peak);
  CommandResult result;
  const auto path = output_path(cfg, "metrics.csv");
  write_metric_csv(report, path);
  result.outputs.push_back(path);
  result.summary = "psnr_db=" + fmt(report.psnr_db) + " ssim=" + fmt(report.ssim) +
                   " planes=" + std::to_string(report.planes.size());
  return result;
}

CommandResult cmd_stokes(const RunConfig& cfg) {
  const PolarizationStack x = load_stack(cfg.stack, "stack");
  const StokesMap m = stokes_from_intensities(x);
  CommandResult result;
  const std::pair<const char*, const Image*> planes[] = {
      {"s0.ptf", &m.s0}, {"s1.ptf", &m.s1}, {"s2.ptf", &m.s2}, {"dolp.ptf", &m.dolp}, {"aolp.ptf", &m.aolp}};
  for (const auto& [name, image] : planes) {
    const auto path = output_path(cfg, name);
    save_tensor(*image, path);
    result.outputs.push_back(path);
  }
  Image flags(x.height(), x.width(), x.channels(), {m.degenerate.begin(), m.degenerate.end()});
  const auto flag_path = output_path(cfg, "degenerate.ptf");
  save_tensor(flags, flag_path);
  result.outputs.push_back(flag_path);
  const auto degenerate = std::count(m.degenerate.begin(), m.degenerate.end(), std::uint8_t{1});
  result.summary = "degenerate_pixels=" + std::to_string(degenerate);
  return result;
}

CommandResult cmd_align(const RunConfig& cfg) {
  require_path(cfg.image, "image");
  require_path(cfg.correspondences, "correspondences");
  const RawImage raw = read_png_raw(cfg.image);
  const Image img = read_png(cfg.image);
  const Homography h = estimate_homography(read_correspondences(cfg.correspondences));
  const std::size_t out_h = cfg.height != 0 ? cfg.height : img.height();
  const std::size_t out_w = cfg.width != 0 ? cfg.width : img.width();
  const WarpResult warped = warp_image(img, h, out_h, out_w);

  CommandResult result;
  const auto path = output_path(cfg, "aligned.png");
  write_png(warped.image, path, raw.bit_depth);
  result.outputs.push_back(path);
  Image coverage(out_h, out_w, 1, {warped.coverage.begin(), warped.coverage.end()});
  const auto coverage_path = output_path(cfg, "coverage.png");
  write_png(coverage, coverage_path, 8);
  result.outputs.push_back(coverage_path);

  std::ostringstream summary;
  summary.imbue(std::locale::classic());
  summary.precision(17);
  const auto& m = h.matrix();
  summary << "homography=";
  for (int i = 0; i < 9; ++i) summary << (i ? "," : "") << m(i / 3, i % 3);
  result.summary = summary.str();
  return result;
}

CommandResult cmd_viz(const RunConfig& cfg) {
  PolarizationStack x = load_stack(cfg.stack, "stack");
  if (x.channels() == 3) x = to_gray3(x);
  CommandResult result;
  const auto path = output_path(cfg, "composite.png");
  composite_rgb_viz(x, path);
  result.outputs.push_back(path);
  result.summary = "composite=" + std::to_string(x.height()) + "x" + std::to_string(x.width());
  return result;
}

}  // namespace polarlens
