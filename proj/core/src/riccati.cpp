#include "affinehjm/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affinehjm/errors.hpp"

namespace affinehjm {

namespace {

double eval_F_raw(const AdmissibleParams& p, const SymMatrix& u) {
  return trace_inner(p.b.sym(), u) - detail::jump_exp_integral_constant_raw(p.jumps, u);
}

SymMatrix eval_R_raw(const AdmissibleParams& p, const SymMatrix& u) {
  const int d = p.dim;
  // -2 u alpha u
  SymMatrix out = sandwich(u, p.alpha.sym());
  out *= -2.0;
  out += p.drift.adjoint(u);
  if (!p.jumps.empty()) {
    out -= detail::jump_exp_integral_linear_raw(p.jumps, u, d);
  }
  return out;
}

}  // namespace

double eval_F(const AdmissibleParams& params, const PsdMatrix& u) {
  if (u.dim() != params.dim) throw DimensionError("eval_F: dimension mismatch");
  if (u.min_eig() < -kPsdTolerance) throw DomainError("eval_F: u outside the cone");
  return eval_F_raw(params, u.sym());
}

SymMatrix eval_R(const AdmissibleParams& params, const PsdMatrix& u) {
  if (u.dim() != params.dim) throw DimensionError("eval_R: dimension mismatch");
  if (u.min_eig() < -kPsdTolerance) throw DomainError("eval_R: u outside the cone");
  return eval_R_raw(params, u.sym());
}

RiccatiSolution solve_riccati(const AdmissibleParams& params, const PsdMatrix& u, double t_end,
                              const RiccatiOptions& options) {
  if (u.dim() != params.dim) throw DimensionError("solve_riccati: dimension mismatch");
  if (t_end < 0.0) throw DomainError("solve_riccati: t_end must be >= 0");

  RiccatiSolution sol;
  sol.u0_ = u.sym();
  sol.t_.push_back(0.0);
  sol.phi_.push_back(0.0);
  sol.psi_.push_back(u.sym());
  if (t_end == 0.0) return sol;

  double dt = options.dt > 0.0 ? options.dt : 1e-3 * t_end;
  std::size_t n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
  if (n_steps > options.max_steps) {
    n_steps = options.max_steps;
  }
  if (n_steps == 0) n_steps = 1;
  const double h = t_end / static_cast<double>(n_steps);

  sol.t_.reserve(n_steps + 1);
  sol.phi_.reserve(n_steps + 1);
  sol.psi_.reserve(n_steps + 1);

  SymMatrix psi = u.sym();
  double phi = 0.0;
  for (std::size_t step = 0; step < n_steps; ++step) {
    const SymMatrix k1 = eval_R_raw(params, psi);
    const double f1 = eval_F_raw(params, psi);
    const SymMatrix s2 = psi + (0.5 * h) * k1;
    const SymMatrix k2 = eval_R_raw(params, s2);
    const double f2 = eval_F_raw(params, s2);
    const SymMatrix s3 = psi + (0.5 * h) * k2;
    const SymMatrix k3 = eval_R_raw(params, s3);
    const double f3 = eval_F_raw(params, s3);
    const SymMatrix s4 = psi + h * k3;
    const SymMatrix k4 = eval_R_raw(params, s4);
    const double f4 = eval_F_raw(params, s4);

    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    phi += (h / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4);

    const double lo = min_eigenvalue(psi);
    if (lo < -options.escape_tolerance) {
      throw NumericalError("solve_riccati: psi left the cone at t = " +
                           std::to_string(h * static_cast<double>(step + 1)) +
                           " (min eigenvalue " + std::to_string(lo) +
                           "); inadmissible input or step too coarse");
    }
    if (lo < 0.0) {
      psi = project_psd(psi).sym();
    }

    sol.t_.push_back(step + 1 == n_steps ? t_end : h * static_cast<double>(step + 1));
    sol.phi_.push_back(phi);
    sol.psi_.push_back(psi);
  }
  return sol;
}

std::size_t RiccatiSolution::locate(double t, double& weight) const {
  const double end = t_.back();
  if (t < -1e-12 || t > end + 1e-9 * (1.0 + std::abs(end))) {
    throw RangeError("RiccatiSolution: t = " + std::to_string(t) + " outside horizon [0, " +
                     std::to_string(end) + "]");
  }
  t = std::clamp(t, 0.0, end);
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - t_.begin());
  if (hi == 0) {
    weight = 0.0;
    return 0;
  }
  if (hi >= t_.size()) hi = t_.size() - 1;
  const std::size_t lo = hi - 1;
  const double span = t_[hi] - t_[lo];
  weight = span > 0.0 ? (t - t_[lo]) / span : 0.0;
  return lo;
}

double RiccatiSolution::phi_at(double t) const {
  double w = 0.0;
  const std::size_t lo = locate(t, w);
  if (w == 0.0) return phi_[lo];
  return (1.0 - w) * phi_[lo] + w * phi_[lo + 1];
}

SymMatrix RiccatiSolution::psi_at(double t) const {
  double w = 0.0;
  const std::size_t lo = locate(t, w);
  if (w == 0.0) return psi_[lo];
  return (1.0 - w) * psi_[lo] + w * psi_[lo + 1];
}

double laplace_transform(const RiccatiSolution& sol, const PsdMatrix& x, double t) {
  if (x.dim() != sol.u0().dim()) throw DimensionError("laplace_transform: dimension mismatch");
  const double phi = sol.phi_at(t);
  const SymMatrix psi = sol.psi_at(t);
  return std::exp(-phi - trace_inner(psi, x.sym()));
}

}  // namespace affinehjm
