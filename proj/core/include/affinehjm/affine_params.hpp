#pragma once

#include <optional>
#include <string>
#include <vector>

#include "affinehjm/sym_matrix.hpp"

namespace affinehjm {

/// One term of the cone-preserving linear map G(z) = sum_k Tr[l_k z] * p_k.
/// With p_k, l_k in the cone, G maps the cone into itself by construction.
struct GTerm {
  PsdMatrix p;  // output direction
  PsdMatrix l;  // input functional weight
};

/// Linear drift map B(z) = M z + z M^T + G(z).
class LinearDriftMap {
 public:
  LinearDriftMap() = default;
  LinearDriftMap(Matrix m, std::vector<GTerm> g_terms);

  const Matrix& m() const { return m_; }
  const std::vector<GTerm>& g_terms() const { return g_terms_; }
  int dim() const { return m_.dim(); }

  /// B(z) = M z + z M^T + sum_k Tr[l_k z] p_k.
  SymMatrix apply(const SymMatrix& z) const;
  /// Adjoint in the trace pairing: B^T(u) = M^T u + u M + sum_k Tr[p_k u] l_k,
  /// so that Tr[B^T(u) y] = Tr[B(y) u].
  SymMatrix adjoint(const SymMatrix& u) const;

 private:
  Matrix m_;
  std::vector<GTerm> g_terms_;
};

/// Rank-one exponential jump ray: jump sizes xi = gamma v v^T with
/// gamma ~ Exp(theta), arriving with intensity lambda_const + Tr[X_t l_state].
/// The family realizes both the constant jump measure m (via lambda_const)
/// and the linear jump coefficient mu (via l_state) with closed-form Laplace
/// integrals and exact compound-Poisson sampling.
struct JumpRay {
  std::vector<double> v;      // unit direction
  double theta = 1.0;         // exponential rate of the jump size law
  double lambda_const = 0.0;  // constant intensity
  PsdMatrix l_state;          // state-intensity weight
};

class JumpRayFamily {
 public:
  JumpRayFamily() = default;
  explicit JumpRayFamily(std::vector<JumpRay> rays);

  bool empty() const { return rays_.empty(); }
  std::size_t size() const { return rays_.size(); }
  const std::vector<JumpRay>& rays() const { return rays_; }
  const JumpRay& ray(std::size_t k) const { return rays_[k]; }

 private:
  std::vector<JumpRay> rays_;
};

/// Admissible parameter set (alpha, b, B, m, mu) of a conservative affine
/// process on S_d^+, plus the factor Q with Q^T Q = alpha used by the
/// pathwise representation.
struct AdmissibleParams {
  int dim = 0;
  PsdMatrix alpha;        // diffusion
  PsdMatrix b;            // constant drift
  LinearDriftMap drift;   // linear drift B
  JumpRayFamily jumps;    // m and mu
  Matrix q;               // Q^T Q = alpha
};

/// Assembles the parameter struct, checking dimensional consistency and
/// computing Q as the spectral square root of alpha when not supplied.
AdmissibleParams make_admissible_params(PsdMatrix alpha, PsdMatrix b, LinearDriftMap drift,
                                        JumpRayFamily jumps = {},
                                        std::optional<Matrix> q = std::nullopt);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double witness = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
  std::string summary() const;
};

/// Checks every admissibility condition and reports pass/fail with the
/// witnessing quantity.  Never throws: structural defects become failed
/// checks.  The drift cone condition is sampled on 2000 deterministically
/// seeded orthogonal rank-one pairs (the extreme points of {Tr[xu] = 0}).
ValidationReport validate(const AdmissibleParams& params);

/// Closed form of the constant jump integral
///   int (e^{-Tr[u xi]} - 1) m(dxi) = sum_r -lambda_r q_r / (theta_r + q_r),
/// q_r = v_r^T u v_r.  Requires u in the cone (else the integral may
/// diverge).
double jump_exp_integral_constant(const JumpRayFamily& jumps, const PsdMatrix& u);

/// Matrix-valued linear counterpart: sum_r -(q_r / (theta_r + q_r)) l_r, so
/// that the trace pairing with a state X gives
/// int (e^{-Tr[u xi]} - 1) Tr[X mu(dxi)].
SymMatrix jump_exp_integral_linear(const JumpRayFamily& jumps, const PsdMatrix& u, int dim);

namespace detail {
// Unchecked variants used inside ODE stages where iterates may sit a
// roundoff-distance outside the cone.
double jump_exp_integral_constant_raw(const JumpRayFamily& jumps, const SymMatrix& u);
SymMatrix jump_exp_integral_linear_raw(const JumpRayFamily& jumps, const SymMatrix& u, int dim);
}  // namespace detail

}  // namespace affinehjm
