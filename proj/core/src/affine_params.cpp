#include "affinehjm/affine_params.hpp"

#include <cmath>
#include <sstream>

#include "affinehjm/errors.hpp"
#include "affinehjm/rng.hpp"

namespace affinehjm {

LinearDriftMap::LinearDriftMap(Matrix m, std::vector<GTerm> g_terms)
    : m_(std::move(m)), g_terms_(std::move(g_terms)) {
  for (const GTerm& g : g_terms_) {
    if (g.p.dim() != m_.dim() || g.l.dim() != m_.dim()) {
      throw DimensionError("LinearDriftMap: G term dimension mismatch");
    }
  }
}

SymMatrix LinearDriftMap::apply(const SymMatrix& z) const {
  if (z.dim() != m_.dim()) throw DimensionError("LinearDriftMap::apply: dimension mismatch");
  const int d = z.dim();
  Matrix mz(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += m_(i, k) * z(k, j);
      mz(i, j) = acc;
    }
  SymMatrix out = SymMatrix::plus_transpose(mz);  // M z + (M z)^T = M z + z M^T
  for (const GTerm& g : g_terms_) {
    const double w = trace_inner(g.l.sym(), z);
    out += w * g.p.sym();
  }
  return out;
}

SymMatrix LinearDriftMap::adjoint(const SymMatrix& u) const {
  if (u.dim() != m_.dim()) throw DimensionError("LinearDriftMap::adjoint: dimension mismatch");
  const int d = u.dim();
  Matrix um(d);  // u M
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += u(i, k) * m_(k, j);
      um(i, j) = acc;
    }
  SymMatrix out = SymMatrix::plus_transpose(um);  // u M + M^T u
  for (const GTerm& g : g_terms_) {
    const double w = trace_inner(g.p.sym(), u);
    out += w * g.l.sym();
  }
  return out;
}

JumpRayFamily::JumpRayFamily(std::vector<JumpRay> rays) : rays_(std::move(rays)) {
  for (const JumpRay& r : rays_) {
    double norm2 = 0.0;
    for (double x : r.v) norm2 += x * x;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
      throw DomainError("JumpRayFamily: ray direction is not a unit vector");
    }
    if (!(r.theta > 0.0)) throw DomainError("JumpRayFamily: theta must be positive");
    if (r.lambda_const < 0.0) throw DomainError("JumpRayFamily: lambda_const must be >= 0");
    if (!r.l_state.empty() && r.l_state.dim() != static_cast<int>(r.v.size())) {
      throw DimensionError("JumpRayFamily: l_state dimension mismatch");
    }
  }
}

AdmissibleParams make_admissible_params(PsdMatrix alpha, PsdMatrix b, LinearDriftMap drift,
                                        JumpRayFamily jumps, std::optional<Matrix> q) {
  AdmissibleParams p;
  p.dim = alpha.dim();
  if (p.dim < 2) throw DimensionError("make_admissible_params: dim must be >= 2");
  if (b.dim() != p.dim) throw DimensionError("make_admissible_params: b dimension mismatch");
  if (drift.dim() == 0) {
    drift = LinearDriftMap(Matrix(p.dim), {});
  }
  if (drift.dim() != p.dim) {
    throw DimensionError("make_admissible_params: drift dimension mismatch");
  }
  for (const JumpRay& r : jumps.rays()) {
    if (static_cast<int>(r.v.size()) != p.dim) {
      throw DimensionError("make_admissible_params: jump ray dimension mismatch");
    }
  }
  p.alpha = std::move(alpha);
  p.b = std::move(b);
  p.drift = std::move(drift);
  p.jumps = std::move(jumps);
  if (q.has_value()) {
    if (q->dim() != p.dim) throw DimensionError("make_admissible_params: Q dimension mismatch");
    p.q = std::move(*q);
  } else {
    p.q = sqrt_psd(p.alpha).sym().to_matrix();  // symmetric choice, Q^T Q = alpha
  }
  return p;
}

bool ValidationReport::all_passed() const {
  for (const ValidationCheck& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const ValidationCheck& c : checks) {
    os << (c.passed ? "[pass] " : "[FAIL] ") << c.name << "  witness=" << c.witness;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << '\n';
  }
  return os.str();
}

namespace {

constexpr int kConeSamplePairs = 2000;
constexpr std::uint64_t kValidationSeed = 0xA11CE5EEDull;

void random_unit_vector(RngStream& rng, std::vector<double>& v) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
}

}  // namespace

ValidationReport validate(const AdmissibleParams& params) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, double witness, std::string detail = "") {
    report.checks.push_back({std::move(name), passed, witness, std::move(detail)});
  };

  const int d = params.dim;
  const bool dims_ok = d >= 2 && params.alpha.dim() == d && params.b.dim() == d &&
                       params.drift.dim() == d && params.q.dim() == d;
  add("dimensions", dims_ok, static_cast<double>(d), "d >= 2 and all blocks d x d");
  if (!dims_ok) return report;

  add("alpha_psd", params.alpha.min_eig() >= -kPsdTolerance, params.alpha.min_eig(),
      "min eigenvalue of alpha");
  add("b_psd", params.b.min_eig() >= -kPsdTolerance, params.b.min_eig(), "min eigenvalue of b");

  // b >= (d-1) alpha in the Loewner order.
  const SymMatrix gap = params.b.sym() - static_cast<double>(d - 1) * params.alpha.sym();
  const double gap_eig = min_eigenvalue(gap);
  add("drift_dominates_diffusion", gap_eig >= -kPsdTolerance, gap_eig,
      "min eigenvalue of b - (d-1) alpha");

  const Matrix qtq = params.q.transposed() * params.q;
  double err = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double diff = qtq(i, j) - params.alpha.sym()(i, j);
      err += diff * diff;
    }
  err = std::sqrt(err);
  add("q_factorizes_alpha", err <= 1e-10, err, "||Q^T Q - alpha||_F");

  bool g_ok = true;
  double g_witness = 0.0;
  for (const GTerm& g : params.drift.g_terms()) {
    g_witness = std::min({g_witness, g.p.min_eig(), g.l.min_eig()});
    if (g.p.min_eig() < -kPsdTolerance || g.l.min_eig() < -kPsdTolerance) g_ok = false;
  }
  add("g_terms_in_cone", g_ok, g_witness, "min eigenvalue over all P_k, L_k");

  bool rays_ok = true;
  double ray_witness = 0.0;
  for (const JumpRay& r : params.jumps.rays()) {
    double norm2 = 0.0;
    for (double x : r.v) norm2 += x * x;
    const double unit_err = std::abs(std::sqrt(norm2) - 1.0);
    ray_witness = std::max(ray_witness, unit_err);
    if (unit_err > 1e-12 || !(r.theta > 0.0) || r.lambda_const < 0.0) rays_ok = false;
    if (!r.l_state.empty() && r.l_state.min_eig() < -kPsdTolerance) rays_ok = false;
  }
  add("jump_rays", rays_ok, ray_witness, "max | ||v|| - 1 |; theta > 0, lambda >= 0, L PSD");

  // Cone condition Tr[B(x) u] >= 0 on Tr[xu] = 0, sampled at extreme points
  // x = v v^T, u = w w^T with v orthogonal to w.  A sampling check, not a
  // proof.
  {
    RngStream rng(kValidationSeed, 0);
    std::vector<double> v(d), w(d);
    double min_value = 0.0;
    SymMatrix x(d);
    for (int n = 0; n < kConeSamplePairs; ++n) {
      random_unit_vector(rng, v);
      random_unit_vector(rng, w);
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += v[i] * w[i];
      double norm2 = 0.0;
      for (int i = 0; i < d; ++i) {
        w[i] -= dot * v[i];
        norm2 += w[i] * w[i];
      }
      if (norm2 < 1e-12) {
        --n;
        continue;
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& wi : w) wi *= inv;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) x.set(i, j, v[i] * v[j]);
      const double value = quad_form(params.drift.apply(x), w);
      min_value = std::min(min_value, value);
    }
    add("drift_cone_condition", min_value >= -1e-10, min_value,
        "min Tr[B(vv^T) ww^T] over sampled orthogonal pairs");
  }

  return report;
}

namespace detail {

double jump_exp_integral_constant_raw(const JumpRayFamily& jumps, const SymMatrix& u) {
  double total = 0.0;
  for (const JumpRay& r : jumps.rays()) {
    if (r.lambda_const == 0.0) continue;
    const double q = quad_form(u, r.v);
    total -= r.lambda_const * q / (r.theta + q);
  }
  return total;
}

SymMatrix jump_exp_integral_linear_raw(const JumpRayFamily& jumps, const SymMatrix& u, int dim) {
  SymMatrix total(dim);
  for (const JumpRay& r : jumps.rays()) {
    if (r.l_state.empty()) continue;
    const double q = quad_form(u, r.v);
    total += (-q / (r.theta + q)) * r.l_state.sym();
  }
  return total;
}

}  // namespace detail

double jump_exp_integral_constant(const JumpRayFamily& jumps, const PsdMatrix& u) {
  if (u.min_eig() < -kPsdTolerance) {
    throw DomainError("jump_exp_integral_constant: u outside the cone");
  }
  return detail::jump_exp_integral_constant_raw(jumps, u.sym());
}

SymMatrix jump_exp_integral_linear(const JumpRayFamily& jumps, const PsdMatrix& u, int dim) {
  if (u.min_eig() < -kPsdTolerance) {
    throw DomainError("jump_exp_integral_linear: u outside the cone");
  }
  return detail::jump_exp_integral_linear_raw(jumps, u.sym(), dim);
}

}  // namespace affinehjm
