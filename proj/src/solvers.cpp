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

#include "polarlens/solvers.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string>

namespace polarlens {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool should_log(std::size_t iteration, std::size_t log_every) {
  return log_every > 0 && iteration % log_every == 0;
}

double data_misfit(const ForwardOperator& op, const Measurement& y, const PolarizationStack& x) {
  const Image ax = op.apply(x);
  const auto a = ax.values();
  const auto b = y.image.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return 0.5 * s;
}

void check_measurement(const Measurement& y, const ForwardOperator& op) {
  const SceneDims& d = op.scene_dims();
  if (y.image.height() != d.height || y.image.width() != d.width ||
      y.image.channels() != d.channels) {
    throw Error("measurement dims do not match the operator");
  }
  if (!y.image.all_finite()) throw Error("measurement contains non-finite values");
}

double lipschitz_for(const ForwardOperator& op, const SolverConfig& cfg) {
  const double L = cfg.lipschitz ? *cfg.lipschitz
                                 : estimate_lipschitz(op, cfg.lipschitz_iters, cfg.lipschitz_seed);
  if (!(L > 0.0) || !std::isfinite(L)) throw SolverError("fista: Lipschitz estimate is not positive");
  return L;
}

}  // namespace

SolverConfig SolverConfig::fista_simulation() { return {}; }

SolverConfig SolverConfig::fista_real() {
  SolverConfig cfg;
  cfg.step_factor = 1000.0;
  cfg.lambda = 5e-3;
  cfg.lambda_w = 5e-3;
  cfg.iterations = 500;
  return cfg;
}

SolverConfig SolverConfig::fista_psf_mismatch() {
  SolverConfig cfg;
  cfg.step_factor = 100.0;
  return cfg;
}

SolverConfig SolverConfig::admm_simulation() {
  SolverConfig cfg;
  cfg.kind = SolverKind::kAdmm;
  cfg.rho = 0.15;
  cfg.lambda = 3e-5;
  cfg.lambda_w = 6e-5;
  cfg.iterations = 200;
  cfg.cg_tol = 1e-3;
  cfg.cg_max_iter = 30;
  return cfg;
}

TvWeights SolverConfig::tv_weights() const {
  const double scale = noise_scale * noise_scale;
  return {lambda * scale, lambda_w * scale};
}

void SolverConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!nonneg(lambda) || !nonneg(lambda_w)) throw Error("lambda and lambda_w must be >= 0");
  if (!positive(step_factor)) throw Error("step factor c must be > 0");
  if (iterations < 1) throw Error("iterations must be >= 1");
  if (!positive(noise_scale)) throw Error("noise scale must be > 0");
  if (lipschitz_iters < 1) throw Error("lipschitz iterations must be >= 1");
  if (kind == SolverKind::kAdmm) {
    if (!positive(rho)) throw Error("rho must be > 0");
    if (!positive(cg_tol)) throw Error("CG tolerance must be > 0");
    if (cg_max_iter < 1) throw Error("CG iteration cap must be >= 1");
  }
}

double reconstruction_objective(const ForwardOperator& op, const Measurement& y,
                                const PolarizationStack& x, const SolverConfig& cfg) {
  const TvWeights w = cfg.tv_weights();
  return data_misfit(op, y, x) + w.lambda * weighted_total_variation(x, w);
}

SolveReport fista_reconstruct(const Measurement& y, const ForwardOperator& op,
                              const SolverConfig& cfg) {
  if (cfg.kind != SolverKind::kFista) throw Error("fista_reconstruct called with a non-FISTA config");
  cfg.validate();
  check_measurement(y, op);
  const auto started = std::chrono::steady_clock::now();

  SolveReport report;
  report.lipschitz = lipschitz_for(op, cfg);
  const TvWeights weights = cfg.tv_weights();
  const double step = 1.0 / (report.lipschitz * cfg.step_factor);
  const double tau = weights.lambda * step;

  PolarizationStack x = op.make_scene();
  PolarizationStack v = x;
  report.initial_objective = reconstruction_objective(op, y, x, cfg);
  double t = 1.0;

  for (std::size_t k = 1; k <= cfg.iterations; ++k) {
    // Gradient step on 0.5 * ||A v - y||^2.
    Image residual = op.apply(v);
    {
      auto r = residual.values();
      const auto b = y.image.values();
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    }
    const PolarizationStack grad = op.adjoint(residual);
    {
      auto vv = v.values();
      const auto g = grad.values();
      for (std::size_t i = 0; i < vv.size(); ++i) vv[i] -= step * g[i];
    }
    PolarizationStack next = fista_prox(v, tau, weights);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    {
      auto vv = v.values();
      const auto xn = next.values();
      const auto xo = x.values();
      for (std::size_t i = 0; i < vv.size(); ++i) vv[i] = xn[i] + momentum * (xn[i] - xo[i]);
    }
    x = std::move(next);
    t = t_next;

    if (should_log(k, cfg.log_every) || k == cfg.iterations) {
      const double objective = reconstruction_objective(op, y, x, cfg);
      if (!std::isfinite(objective) || !x.all_finite()) {
        throw SolverError("fista: objective diverged at iteration " + std::to_string(k) +
                          " (step 1/(L*c) with L=" + format_double(report.lipschitz) +
                          ", c=" + format_double(cfg.step_factor) + ")");
      }
      if (should_log(k, cfg.log_every)) report.trace.push_back({k, objective, std::nullopt});
      report.final_objective = objective;
    }
  }

  report.estimate = std::move(x);
  report.iterations = cfg.iterations;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

SolveReport admm_reconstruct(const Measurement& y, const ForwardOperator& op,
                             const SolverConfig& cfg) {
  if (cfg.kind != SolverKind::kAdmm) throw Error("admm_reconstruct called with a non-ADMM config");
  cfg.validate();
  check_measurement(y, op);
  const auto started = std::chrono::steady_clock::now();

  SolveReport report;
  const TvWeights weights = cfg.tv_weights();
  const double rho = cfg.rho;
  const double tau = weights.lambda / rho;

  const PolarizationStack aty = op.adjoint(y.image);
  PolarizationStack v = op.make_scene();
  PolarizationStack z = v;
  PolarizationStack u = v;
  PolarizationStack rhs = v;
  report.initial_objective = reconstruction_objective(op, y, z, cfg);

  const LinearMap normal_plus_rho = [&](std::span<const double> in, std::span<double> out) {
    PolarizationStack s = op.make_scene();
    std::copy(in.begin(), in.end(), s.values().begin());
    const PolarizationStack m = op.normal(s);
    const auto mv = m.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mv[i] + rho * in[i];
  };

  for (std::size_t k = 1; k <= cfg.iterations; ++k) {
    {
      auto r = rhs.values();
      const auto a = aty.values();
      const auto zz = z.values();
      const auto uu = u.values();
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + rho * (zz[i] - uu[i]);
    }
    CgResult cg;
    try {
      cg = conjugate_gradient(normal_plus_rho, rhs.values(), v.values(), cfg.cg_tol, cfg.cg_max_iter);
    } catch (const SolverError& e) {
      throw SolverError("admm: v-update failed at iteration " + std::to_string(k) + ": " + e.what());
    }
    std::copy(cg.x.begin(), cg.x.end(), v.values().begin());

    PolarizationStack shifted = v;
    {
      auto s = shifted.values();
      const auto uu = u.values();
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += uu[i];
    }
    z = haar_tv_prox(shifted, tau, weights);
    z.clamp_nonnegative();

    double gap = 0.0;
    {
      auto uu = u.values();
      const auto vv = v.values();
      const auto zz = z.values();
      for (std::size_t i = 0; i < uu.size(); ++i) {
        const double d = vv[i] - zz[i];
        uu[i] += d;
        gap += d * d;
      }
    }
    gap = std::sqrt(gap);
    if (!std::isfinite(gap)) {
      throw SolverError("admm: non-finite iterate at iteration " + std::to_string(k));
    }
    report.residual_trace.push_back(gap);

    if (should_log(k, cfg.log_every) || k == cfg.iterations) {
      const double objective = reconstruction_objective(op, y, z, cfg);
      if (!std::isfinite(objective)) {
        throw SolverError("admm: objective diverged at iteration " + std::to_string(k));
      }
      if (should_log(k, cfg.log_every)) report.trace.push_back({k, objective, gap});
      report.final_objective = objective;
    }
  }

  report.estimate = std::move(z);
  report.iterations = cfg.iterations;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

SolveReport reconstruct(const Measurement& y, const ForwardOperator& op, const SolverConfig& cfg) {
  return cfg.kind == SolverKind::kFista ? fista_reconstruct(y, op, cfg) : admm_reconstruct(y, op, cfg);
}

CgResult conjugate_gradient(const LinearMap& apply_m, std::span<const double> b,
                            std::span<const double> x0, double tol, std::size_t max_iter) {
  if (x0.size() != b.size()) throw Error("conjugate_gradient: x0 and b differ in length");
  const std::size_t n = b.size();
  CgResult result;
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    result.x.assign(n, 0.0);
    result.residual_norms.push_back(0.0);
    result.converged = true;
    return result;
  }

  result.x.assign(x0.begin(), x0.end());
  std::vector<double> r(n);
  std::vector<double> mp(n);
  apply_m(result.x, mp);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - mp[i];
  double rr = dot(r, r);
  result.residual_norms.push_back(std::sqrt(rr));
  if (std::sqrt(rr) <= tol * b_norm) {
    result.converged = true;
    return result;
  }

  std::vector<double> p = r;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    apply_m(p, mp);
    const double curvature = dot(p, mp);
    if (!(curvature > 0.0)) {
      throw SolverError("conjugate_gradient: non-positive curvature " + format_double(curvature) +
                        " at iteration " + std::to_string(k) + " (operator not SPD)");
    }
    const double alpha = rr / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] += alpha * p[i];
      r[i] -= alpha * mp[i];
    }
    const double rr_next = dot(r, r);
    result.iterations = k;
    result.residual_norms.push_back(std::sqrt(rr_next));
    if (std::sqrt(rr_next) <= tol * b_norm) {
      result.converged = true;
      break;
    }
    const double beta = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_next;
  }
  return result;
}

void write_trace_csv(const SolveReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << "iteration,objective,residual\n";
  for (const TracePoint& p : report.trace) {
    out << p.iteration << ',' << format_double(p.objective) << ',';
    if (p.residual) out << format_double(*p.residual);
    out << '\n';
  }
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace polarlens
