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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "polarlens/forward_operator.hpp"
#include "polarlens/prox_tv.hpp"
#include "polarlens/tensor.hpp"

namespace polarlens {

/// Raised when an iterative solver cannot continue (non-finite objective, CG
/// breakdown). The message names the solver and the iteration.
class SolverError : public Error {
 public:
  using Error::Error;
};

enum class SolverKind { kFista, kAdmm };

struct SolverConfig {
  SolverKind kind = SolverKind::kFista;
  double lambda = 5e-5;
  double lambda_w = 5e-5;
  /// c in the FISTA step 1 / (L * c).
  double step_factor = 45.0;
  std::size_t iterations = 10000;
  double rho = 0.15;
  double cg_tol = 1e-3;
  std::size_t cg_max_iter = 30;
  /// sigma_e of the data term. Dividing the data term by sigma_e^2 is the same
  /// as multiplying lambda and lambda_w by sigma_e^2, which is what the solvers do.
  double noise_scale = 1.0;
  std::size_t log_every = 50;
  std::size_t lipschitz_iters = 50;
  std::uint64_t lipschitz_seed = 0;
  /// Precomputed Lipschitz constant; estimated from the operator when empty.
  std::optional<double> lipschitz;

  /// Synthetic-data FISTA: c = 45, lambda = lambda_w = 5e-5, 10k iterations.
  static SolverConfig fista_simulation();
  /// Real captures: c = 1000, lambda = lambda_w = 5e-3, 500 iterations.
  static SolverConfig fista_real();
  /// PSF-mismatch studies: simulation settings with c = 100.
  static SolverConfig fista_psf_mismatch();
  /// rho = 0.15, lambda = 3e-5, lambda_w = 6e-5, 200 iterations, CG 1e-3 / 30.
  static SolverConfig admm_simulation();

  TvWeights tv_weights() const;
  void validate() const;
};

struct TracePoint {
  std::size_t iteration = 0;
  double objective = 0.0;
  /// ADMM primal residual ||v - z|| at this iteration.
  std::optional<double> residual;
};

struct SolveReport {
  PolarizationStack estimate;
  /// One entry every `log_every` iterations.
  std::vector<TracePoint> trace;
  /// ADMM only: ||v - z|| after every outer iteration.
  std::vector<double> residual_trace;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double lipschitz = 0.0;
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
};

/// 0.5 * ||A x - y||^2 + lambda * TV_w(x) with the solver's effective weights.
double reconstruction_objective(const ForwardOperator& op, const Measurement& y,
                                const PolarizationStack& x, const SolverConfig& cfg);

/// Plain FISTA from zero with fixed step 1/(L*c) and the combined
/// non-negativity/TV prox at threshold lambda/(L*c).
SolveReport fista_reconstruct(const Measurement& y, const ForwardOperator& op,
                              const SolverConfig& cfg);

/// Scaled ADMM from zero v, z, u:
///   (A^T A + rho I) v = A^T y + rho (z - u)     (CG, warm-started)
///   z = max(haar_tv_prox(v + u, lambda / rho), 0)
///   u = u + v - z
/// The returned estimate is z.
SolveReport admm_reconstruct(const Measurement& y, const ForwardOperator& op,
                             const SolverConfig& cfg);

/// Dispatches on cfg.kind.
SolveReport reconstruct(const Measurement& y, const ForwardOperator& op, const SolverConfig& cfg);

using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct CgResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  /// ||b - M x_k|| for k = 0..iterations.
  std::vector<double> residual_norms;
  bool converged = false;
};

/// Conjugate gradient for symmetric positive-definite `apply_m`. Stops once
/// ||M x - b|| / ||b|| <= tol or after max_iter iterations. b = 0 returns zero
/// immediately; non-positive curvature throws SolverError.
CgResult conjugate_gradient(const LinearMap& apply_m, std::span<const double> b,
                            std::span<const double> x0, double tol, std::size_t max_iter);

/// Writes "iteration,objective,residual"; residual is empty for FISTA rows.
void write_trace_csv(const SolveReport& report, const std::filesystem::path& path);

}  // namespace polarlens
