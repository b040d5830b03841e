#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "affinehjm/affine_params.hpp"
#include "affinehjm/rng.hpp"
#include "affinehjm/sym_matrix.hpp"

namespace affinehjm {

enum class Scheme { euler_project, wishart_exact };

/// One realized jump: xi = gamma * v v^T along the given ray.
struct JumpEvent {
  double time = 0.0;
  int ray_index = 0;
  double gamma = 0.0;
};

SymMatrix jump_matrix(const JumpRay& ray, double gamma);

/// Time-gridded sample path of the state process.  dw holds the d x d
/// Brownian increment block per step (entry variance dt); it stays empty for
/// the exact Wishart scheme, which does not expose driving increments.
struct SamplePath {
  std::vector<double> t;
  std::vector<PsdMatrix> states;
  std::vector<Matrix> dw;
  std::vector<JumpEvent> jumps;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

struct PathEnsemble {
  AdmissibleParams params;
  Scheme scheme = Scheme::euler_project;
  std::vector<SamplePath> paths;
};

/// Uniform grid 0, dt, 2dt, ..., t_end (last node exactly t_end).
std::vector<double> uniform_grid(double t_end, double dt);

/// One full-truncation Euler step:
///   x + (b + B(x)) dt + sqrt(x) dW Q + Q^T dW^T sqrt(x) + jumps,
/// projected back onto the cone.  Jump counts are Poisson with the intensity
/// lambda_const + Tr[x L] frozen at the left endpoint; sizes are exponential.
/// Realized jumps are appended to jump_log when given.
PsdMatrix euler_step(const AdmissibleParams& params, const PsdMatrix& x, const Matrix& dw,
                     double dt, double t_left, RngStream& rng,
                     std::vector<JumpEvent>* jump_log = nullptr);

/// Simulates one path on the grid with the per-path stream (seed, path_index).
SamplePath simulate_path(const AdmissibleParams& params, const PsdMatrix& x0,
                         const std::vector<double>& t_grid, std::uint64_t seed,
                         std::uint64_t path_index, Scheme scheme, bool keep_dw = true);

/// n_paths independent paths; validates the parameters first and rejects
/// invalid input before any work.  Deterministic given (seed, config),
/// independent of thread count.
PathEnsemble simulate(const AdmissibleParams& params, const PsdMatrix& x0,
                      const std::vector<double>& t_grid, std::size_t n_paths, std::uint64_t seed,
                      Scheme scheme, int n_threads = 1);

/// Streaming variant: each path is handed to the visitor and then discarded,
/// so ensembles of 10^5 paths never reside in memory.  The visitor is invoked
/// from worker threads; (index, path) pairs are the same for any thread
/// count.  The path reference is valid only during the call.
void for_each_path(const AdmissibleParams& params, const PsdMatrix& x0,
                   const std::vector<double>& t_grid, std::size_t n_paths, std::uint64_t seed,
                   Scheme scheme, int n_threads,
                   const std::function<void(std::size_t, const SamplePath&)>& visit);

/// Exact-transition Wishart sampler: X_t = Y_t^T Y_t with Y a delta x d
/// matrix Ornstein-Uhlenbeck process dY = Y M^T dt + dW Q.  Requires integer
/// delta >= d so that x0 factors as S^2 with S embedded in the first d rows.
/// States are positive semidefinite by construction.
PathEnsemble simulate_wishart_exact(int delta, const Matrix& m, const Matrix& q,
                                    const PsdMatrix& x0, const std::vector<double>& t_grid,
                                    std::size_t n_paths, std::uint64_t seed, int n_threads = 1);

}  // namespace affinehjm
