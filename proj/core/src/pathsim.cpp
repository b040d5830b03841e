#include "affinehjm/pathsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "affinehjm/errors.hpp"

namespace affinehjm {

namespace {

// Scratch buffers reused across steps of one path.
struct EulerWorkspace {
  SymMatrix sqrt_x;
  SymMatrix increment;
  Matrix sdw;   // sqrt(x) dW
  Matrix sdwq;  // sqrt(x) dW Q
  EigenDecomposition eig;

  explicit EulerWorkspace(int d) : sqrt_x(d), increment(d), sdw(d), sdwq(d) {}
};

void spectral_sqrt_into(const SymMatrix& x, EigenDecomposition& eig, SymMatrix& out) {
  jacobi_eigen(x, eig);
  const int d = x.dim();
  thread_local std::vector<double> roots;
  roots.resize(d);
  for (int k = 0; k < d; ++k) {
    roots[k] = eig.eigenvalues[k] > 0.0 ? std::sqrt(eig.eigenvalues[k]) : 0.0;
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += eig.eigenvectors(i, k) * roots[k] * eig.eigenvectors(j, k);
      out.set(i, j, acc);
    }
  }
}

// increment = (b + B(x)) dt + sqrt(x) dW Q + Q^T dW^T sqrt(x) [+ jumps below]
void deterministic_and_diffusion(const AdmissibleParams& p, const SymMatrix& x, const Matrix& dw,
                                 double dt, EulerWorkspace& ws) {
  const int d = p.dim;
  spectral_sqrt_into(x, ws.eig, ws.sqrt_x);

  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += ws.sqrt_x(i, k) * dw(k, j);
      ws.sdw(i, j) = acc;
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += ws.sdw(i, k) * p.q(k, j);
      ws.sdwq(i, j) = acc;
    }
  }

  const Matrix& m = p.drift.m();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double mx = 0.0;
      double xm = 0.0;
      for (int k = 0; k < d; ++k) {
        mx += m(i, k) * x(k, j);
        xm += x(i, k) * m(j, k);
      }
      ws.increment.set(i, j, (p.b.sym()(i, j) + mx + xm) * dt + ws.sdwq(i, j) + ws.sdwq(j, i));
    }
  }
  for (const GTerm& g : p.drift.g_terms()) {
    const double w = trace_inner(g.l.sym(), x) * dt;
    ws.increment += w * g.p.sym();
  }
}

void sample_jumps(const AdmissibleParams& p, const SymMatrix& x, double dt, double t_right,
                  RngStream& rng, SymMatrix& increment, std::vector<JumpEvent>* jump_log) {
  const std::vector<JumpRay>& rays = p.jumps.rays();
  for (std::size_t r = 0; r < rays.size(); ++r) {
    const JumpRay& ray = rays[r];
    double intensity = ray.lambda_const;
    if (!ray.l_state.empty()) intensity += std::max(0.0, trace_inner(x, ray.l_state.sym()));
    if (intensity <= 0.0) continue;
    const int count = rng.poisson(intensity * dt);
    for (int c = 0; c < count; ++c) {
      const double gamma = rng.exponential(ray.theta);
      const int d = static_cast<int>(ray.v.size());
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          increment.set(i, j, increment(i, j) + gamma * ray.v[i] * ray.v[j]);
        }
      if (jump_log != nullptr) {
        jump_log->push_back({t_right, static_cast<int>(r), gamma});
      }
    }
  }
}

PsdMatrix euler_step_ws(const AdmissibleParams& p, const PsdMatrix& x, const Matrix& dw, double dt,
                        double t_left, RngStream& rng, std::vector<JumpEvent>* jump_log,
                        EulerWorkspace& ws) {
  deterministic_and_diffusion(p, x.sym(), dw, dt, ws);
  if (!p.jumps.empty()) {
    sample_jumps(p, x.sym(), dt, t_left + dt, rng, ws.increment, jump_log);
  }
  ws.increment += x.sym();
  return project_psd(ws.increment);
}

void fill_normal_block(RngStream& rng, double scale, Matrix& dw) {
  double* a = dw.raw();
  const std::size_t n = static_cast<std::size_t>(dw.dim()) * dw.dim();
  for (std::size_t k = 0; k < n; ++k) a[k] = scale * rng.normal();
}

SamplePath simulate_euler_path(const AdmissibleParams& params, const PsdMatrix& x0,
                               const std::vector<double>& grid, std::uint64_t seed,
                               std::uint64_t path_index, bool keep_dw) {
  const int d = params.dim;
  SamplePath path;
  path.t = grid;
  path.seed = seed;
  path.path_index = path_index;
  path.states.clear();
  path.states.reserve(grid.size());
  path.states.push_back(x0);
  path.dw.clear();
  if (keep_dw) path.dw.reserve(grid.size() - 1);
  path.jumps.clear();

  RngStream rng(seed, path_index);
  EulerWorkspace ws(d);
  Matrix dw(d);
  PsdMatrix x = x0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double dt = grid[i + 1] - grid[i];
    fill_normal_block(rng, std::sqrt(dt), dw);
    x = euler_step_ws(params, x, dw, dt, grid[i], rng, &path.jumps, ws);
    path.states.push_back(x);
    if (keep_dw) path.dw.push_back(dw);
  }
  return path;
}

struct WishartExactPlan {
  int delta = 0;
  int d = 0;
  Matrix propagator;   // e^{M h}
  SymMatrix shock;     // symmetric sqrt of the step covariance
  bool identity_propagator = false;
};

WishartExactPlan make_exact_plan(int delta, const Matrix& m, const Matrix& q, double h) {
  const int d = m.dim();
  WishartExactPlan plan;
  plan.delta = delta;
  plan.d = d;

  bool m_zero = true;
  for (double v : m.values()) {
    if (v != 0.0) m_zero = false;
  }
  // alpha = Q^T Q; the product is symmetric up to roundoff.
  const Matrix qtq = q.transposed() * q;
  SymMatrix alpha(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) alpha.set(i, j, 0.5 * (qtq(i, j) + qtq(j, i)));

  if (m_zero) {
    plan.identity_propagator = true;
    plan.propagator = Matrix::identity(d);
    plan.shock = sqrt_psd_clipped(h * alpha);
    return plan;
  }

  // Van Loan block: exp(h [[-M, alpha], [0, M^T]]) = [[.., F12], [0, F22]]
  // with E = F22^T = e^{M h} and V = F22^T F12 the step covariance.
  Matrix block(2 * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      block(i, j) = -m(i, j) * h;
      block(i, d + j) = alpha(i, j) * h;
      block(d + i, d + j) = m(j, i) * h;
    }
  }
  const Matrix f = expm(block);
  Matrix f12(d), f22(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      f12(i, j) = f(i, d + j);
      f22(i, j) = f(d + i, d + j);
    }
  }
  plan.propagator = f22.transposed();
  const Matrix v = f22.transposed() * f12;
  SymMatrix v_sym(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) v_sym.set(i, j, 0.5 * (v(i, j) + v(j, i)));
  plan.shock = sqrt_psd_clipped(v_sym);
  return plan;
}

SamplePath simulate_exact_path(const WishartExactPlan& plan, const std::vector<double>& y0,
                               const std::vector<double>& grid, std::uint64_t seed,
                               std::uint64_t path_index) {
  const int d = plan.d;
  const int delta = plan.delta;
  SamplePath path;
  path.t = grid;
  path.seed = seed;
  path.path_index = path_index;
  path.states.reserve(grid.size());

  std::vector<double> y = y0;  // delta x d, row-major
  std::vector<double> ynew(y.size());
  std::vector<double> z(static_cast<std::size_t>(delta) * d);
  RngStream rng(seed, path_index);

  auto states_push = [&]() {
    SymMatrix x(d);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double acc = 0.0;
        for (int r = 0; r < delta; ++r) {
          acc += y[static_cast<std::size_t>(r) * d + i] * y[static_cast<std::size_t>(r) * d + j];
        }
        x.set(i, j, acc);
      }
    }
    path.states.push_back(project_psd(x));
  };

  states_push();
  for (std::size_t step = 0; step + 1 < grid.size(); ++step) {
    for (double& v : z) v = rng.normal();
    // Row r: y_r <- E y_r + S z_r, in row form y_r E^T + z_r S.
    for (int r = 0; r < delta; ++r) {
      const double* yr = &y[static_cast<std::size_t>(r) * d];
      const double* zr = &z[static_cast<std::size_t>(r) * d];
      double* out = &ynew[static_cast<std::size_t>(r) * d];
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        if (plan.identity_propagator) {
          acc = yr[j];
        } else {
          for (int k = 0; k < d; ++k) acc += yr[k] * plan.propagator(j, k);
        }
        for (int k = 0; k < d; ++k) acc += zr[k] * plan.shock(k, j);
        out[j] = acc;
      }
    }
    y.swap(ynew);
    states_push();
  }
  return path;
}

void check_uniform(const std::vector<double>& grid, const char* who) {
  if (grid.size() < 2) throw DomainError(std::string(who) + ": grid needs at least two nodes");
  const double h = grid[1] - grid[0];
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (std::abs((grid[i + 1] - grid[i]) - h) > 1e-9 * (1.0 + std::abs(h))) {
      throw DomainError(std::string(who) + ": exact scheme requires a uniform grid");
    }
  }
}

void run_over_paths(std::size_t n_paths, int n_threads,
                    const std::function<void(std::size_t)>& body) {
  if (n_threads <= 1 || n_paths <= 1) {
    for (std::size_t i = 0; i < n_paths; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_paths) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min<int>(n_threads, static_cast<int>(n_paths));
  pool.reserve(k);
  for (int w = 0; w < k; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
}

struct WishartSpec {
  int delta = 0;
  Matrix m;
  Matrix q;
};

// The exact scheme needs b = delta * alpha with integer delta >= d, no jumps
// and no G part.
WishartSpec derive_wishart_spec(const AdmissibleParams& params) {
  if (!params.jumps.empty()) {
    throw DomainError("wishart_exact: jump specifications are not supported");
  }
  if (!params.drift.g_terms().empty()) {
    throw DomainError("wishart_exact: G terms are not supported");
  }
  const double tr_alpha = trace(params.alpha.sym());
  if (tr_alpha <= 0.0) throw DomainError("wishart_exact: alpha must be nonzero");
  const double delta_real = trace(params.b.sym()) / tr_alpha;
  const double delta_round = std::round(delta_real);
  const SymMatrix residual = params.b.sym() - delta_round * params.alpha.sym();
  if (std::abs(delta_real - delta_round) > 1e-9 ||
      frobenius_norm(residual) > 1e-9 * (1.0 + frobenius_norm(params.b.sym()))) {
    throw DomainError("wishart_exact: b must equal delta * alpha with integer delta");
  }
  if (delta_round < params.dim) {
    throw DomainError("wishart_exact: integer delta must be >= d");
  }
  return {static_cast<int>(delta_round), params.drift.m(), params.q};
}

std::vector<double> factor_initial_state(const PsdMatrix& x0, int delta) {
  const int d = x0.dim();
  const SymMatrix s = sqrt_psd_clipped(x0.sym());
  std::vector<double> y0(static_cast<std::size_t>(delta) * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) y0[static_cast<std::size_t>(i) * d + j] = s(i, j);
  return y0;
}

}  // namespace

SymMatrix jump_matrix(const JumpRay& ray, double gamma) {
  const int d = static_cast<int>(ray.v.size());
  SymMatrix xi(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) xi.set(i, j, gamma * ray.v[i] * ray.v[j]);
  return xi;
}

std::vector<double> uniform_grid(double t_end, double dt) {
  if (!(t_end > 0.0) || !(dt > 0.0)) throw DomainError("uniform_grid: t_end and dt must be > 0");
  std::size_t n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  if (n == 0) n = 1;
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * dt;
  grid[n] = t_end;
  return grid;
}

PsdMatrix euler_step(const AdmissibleParams& params, const PsdMatrix& x, const Matrix& dw,
                     double dt, double t_left, RngStream& rng, std::vector<JumpEvent>* jump_log) {
  if (x.dim() != params.dim || dw.dim() != params.dim) {
    throw DimensionError("euler_step: dimension mismatch");
  }
  EulerWorkspace ws(params.dim);
  return euler_step_ws(params, x, dw, dt, t_left, rng, jump_log, ws);
}

SamplePath simulate_path(const AdmissibleParams& params, const PsdMatrix& x0,
                         const std::vector<double>& t_grid, std::uint64_t seed,
                         std::uint64_t path_index, Scheme scheme, bool keep_dw) {
  if (x0.dim() != params.dim) throw DimensionError("simulate_path: x0 dimension mismatch");
  if (t_grid.size() < 2 || t_grid.front() != 0.0) {
    throw DomainError("simulate_path: grid must start at 0 with at least two nodes");
  }
  if (scheme == Scheme::euler_project) {
    return simulate_euler_path(params, x0, t_grid, seed, path_index, keep_dw);
  }
  const WishartSpec spec = derive_wishart_spec(params);
  check_uniform(t_grid, "simulate_path");
  const WishartExactPlan plan =
      make_exact_plan(spec.delta, spec.m, spec.q, t_grid[1] - t_grid[0]);
  return simulate_exact_path(plan, factor_initial_state(x0, spec.delta), t_grid, seed, path_index);
}

PathEnsemble simulate(const AdmissibleParams& params, const PsdMatrix& x0,
                      const std::vector<double>& t_grid, std::size_t n_paths, std::uint64_t seed,
                      Scheme scheme, int n_threads) {
  const ValidationReport report = validate(params);
  if (!report.all_passed()) {
    throw ValidationError("simulate: parameters rejected:\n" + report.summary());
  }
  PathEnsemble ensemble;
  ensemble.params = params;
  ensemble.scheme = scheme;
  ensemble.paths.resize(n_paths);
  run_over_paths(n_paths, n_threads, [&](std::size_t i) {
    ensemble.paths[i] = simulate_path(params, x0, t_grid, seed, i, scheme, true);
  });
  return ensemble;
}

void for_each_path(const AdmissibleParams& params, const PsdMatrix& x0,
                   const std::vector<double>& t_grid, std::size_t n_paths, std::uint64_t seed,
                   Scheme scheme, int n_threads,
                   const std::function<void(std::size_t, const SamplePath&)>& visit) {
  const ValidationReport report = validate(params);
  if (!report.all_passed()) {
    throw ValidationError("for_each_path: parameters rejected:\n" + report.summary());
  }
  run_over_paths(n_paths, n_threads, [&](std::size_t i) {
    const SamplePath path = simulate_path(params, x0, t_grid, seed, i, scheme, true);
    visit(i, path);
  });
}

PathEnsemble simulate_wishart_exact(int delta, const Matrix& m, const Matrix& q,
                                    const PsdMatrix& x0, const std::vector<double>& t_grid,
                                    std::size_t n_paths, std::uint64_t seed, int n_threads) {
  const int d = x0.dim();
  if (m.dim() != d || q.dim() != d) {
    throw DimensionError("simulate_wishart_exact: dimension mismatch");
  }
  if (delta < d) throw DomainError("simulate_wishart_exact: integer delta must be >= d");
  check_uniform(t_grid, "simulate_wishart_exact");
  if (t_grid.front() != 0.0) throw DomainError("simulate_wishart_exact: grid must start at 0");

  const WishartExactPlan plan = make_exact_plan(delta, m, q, t_grid[1] - t_grid[0]);
  const std::vector<double> y0 = factor_initial_state(x0, delta);

  PathEnsemble ensemble;
  const SymMatrix alpha_sym = [&] {
    const Matrix qtq = q.transposed() * q;
    SymMatrix a(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) a.set(i, j, 0.5 * (qtq(i, j) + qtq(j, i)));
    return a;
  }();
  ensemble.params = make_admissible_params(project_psd(alpha_sym),
                                           project_psd(static_cast<double>(delta) * alpha_sym),
                                           LinearDriftMap(m, {}), {}, q);
  ensemble.scheme = Scheme::wishart_exact;
  ensemble.paths.resize(n_paths);
  run_over_paths(n_paths, n_threads, [&](std::size_t i) {
    ensemble.paths[i] = simulate_exact_path(plan, y0, t_grid, seed, i);
  });
  return ensemble;
}

}  // namespace affinehjm
