#pragma once

#include <cstddef>
#include <vector>

#include "affinehjm/affine_params.hpp"
#include "affinehjm/sym_matrix.hpp"

namespace affinehjm {

/// F(u) = Tr[b u] - int (e^{-Tr[u xi]} - 1) m(dxi).
double eval_F(const AdmissibleParams& params, const PsdMatrix& u);

/// R(u) = -2 u alpha u + B^T(u) - int (e^{-Tr[u xi]} - 1) mu(dxi).
SymMatrix eval_R(const AdmissibleParams& params, const PsdMatrix& u);

struct RiccatiOptions {
  double dt = 0.0;                  // 0 selects 1e-3 * t_end
  std::size_t max_steps = 100000;   // dt is coarsened if the cap would be hit
  double escape_tolerance = 1e-6;   // abort when min eig psi drops below -this
};

/// Forward solution of d/dt phi = F(psi), d/dt psi = R(psi) with phi(0) = 0
/// and psi(0) = u, on a fixed grid.  psi is nudged back onto the cone when
/// roundoff pushes an eigenvalue slightly negative; leaving the cone beyond
/// the escape tolerance aborts with a diagnostic.
class RiccatiSolution {
 public:
  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<SymMatrix>& psi() const { return psi_; }
  const SymMatrix& u0() const { return u0_; }
  double t_end() const { return t_.back(); }

  /// Linear interpolation between grid nodes.
  double phi_at(double t) const;
  /// Entrywise linear interpolation between grid nodes.
  SymMatrix psi_at(double t) const;

 private:
  friend RiccatiSolution solve_riccati(const AdmissibleParams&, const PsdMatrix&, double,
                                       const RiccatiOptions&);
  std::size_t locate(double t, double& weight) const;

  std::vector<double> t_;
  std::vector<double> phi_;
  std::vector<SymMatrix> psi_;
  SymMatrix u0_;
};

/// Classical 4th-order one-step integration; global error O(dt^4).
RiccatiSolution solve_riccati(const AdmissibleParams& params, const PsdMatrix& u, double t_end,
                              const RiccatiOptions& options = {});

/// e^{-phi(t,u) - Tr[psi(t,u) x]}, the exponential-affine transform of the
/// process started at x.  Lies in (0, 1] for x, u in the cone.
double laplace_transform(const RiccatiSolution& sol, const PsdMatrix& x, double t);

}  // namespace affinehjm
