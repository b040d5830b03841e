#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "affinehjm/affine_params.hpp"
#include "affinehjm/pathsim.hpp"
#include "affinehjm/sym_matrix.hpp"

namespace affinehjm {

enum class VolKind { exponential_decay, inverse_sqrt, tabulated };

/// Forward-rate volatility sigma(t, T) = scale(t, T) * sigma0 with sigma0 in
/// the cone, so sigma(t, T) is positive semidefinite for every t <= T.
///
///   exponential_decay: scale = e^{-beta (T-t)} for T >= t, 0 for T < t
///   inverse_sqrt:      scale = 1/sqrt(T-t) for T > t, 0 for T <= t
///   tabulated:         scale = piecewise-linear profile of T-t, flat beyond
///                      the last node
///
/// The T-bond volatility Sigma(t, T) = -int_t^T sigma(t, u) du is available
/// in closed form for the first two kinds and by composite Simpson quadrature
/// for tabulated profiles.
class VolatilitySpec {
 public:
  VolatilitySpec() = default;
  static VolatilitySpec exponential(PsdMatrix sigma0, double beta);
  static VolatilitySpec inverse_sqrt(PsdMatrix sigma0);
  static VolatilitySpec tabulated(PsdMatrix sigma0,
                                  std::vector<std::pair<double, double>> profile);

  VolKind kind() const { return kind_; }
  const PsdMatrix& sigma0() const { return sigma0_; }
  double beta() const { return beta_; }
  const std::vector<std::pair<double, double>>& profile() const { return profile_; }
  bool closed_sigma_available() const { return kind_ != VolKind::tabulated; }
  int dim() const { return sigma0_.dim(); }

  double scale(double s, double T) const;
  /// Antiderivative scale: Sigma(s, T) = big_scale(s, T) * sigma0, <= 0.
  /// Throws DomainError for s > T.
  double big_scale(double s, double T) const;

  SymMatrix sigma(double s, double T) const;
  SymMatrix big_sigma(double s, double T) const;

 private:
  VolKind kind_ = VolKind::exponential_decay;
  PsdMatrix sigma0_;
  double beta_ = 1.0;
  std::vector<std::pair<double, double>> profile_;  // (tau, scale), tau increasing
};

/// Initial forward curve f(0, .): piecewise-linear in maturity with flat
/// extrapolation, or a flat shorthand.
class InitialCurve {
 public:
  InitialCurve() = default;
  static InitialCurve flat(double rate);
  static InitialCurve from_nodes(std::vector<std::pair<double, double>> nodes);

  double forward(double T) const;
  /// Exact integral of the piecewise-linear curve over [a, b].
  double integral(double a, double b) const;
  /// Y(0; t, T) = (1/(T-t)) int_t^T f(0,u) du.
  double yield0(double t, double T) const;
  /// Default long-horizon rate when the true limit is unavailable from a
  /// finite table: the average rate to the last node.
  double ell0_default() const;
  bool is_flat() const { return flat_; }
  const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }

 private:
  bool flat_ = true;
  double rate_ = 0.0;
  std::vector<std::pair<double, double>> nodes_;
  std::vector<double> cumulative_;  // integral from first node
};

/// Equivalent-measure inputs: constant market price of risk gamma and a
/// constant per-ray jump density multiplier K (defaults: gamma = 0, K = 1).
/// These enter drifts and compensators only; the Radon-Nikodym density itself
/// is never simulated.
struct MeasureChange {
  Matrix gamma;
  std::vector<double> k_per_ray;

  static MeasureChange none(int dim);
  double k(std::size_t ray) const {
    return ray < k_per_ray.size() ? k_per_ray[ray] : 1.0;
  }
  bool is_trivial() const;
};

/// No-arbitrage drift alpha(t, T) of the forward rate under the measure
/// change: minus Tr[sigma (b + B(x) + 2 sqrt(x) gamma Q)], minus
/// 4 Tr[Q sigma x Sigma Q^T], minus the jump integral, which is closed-form
/// for exponential rays: lambda_eff * a * theta / (theta - c)^2 per ray with
/// a = v^T sigma v and c = v^T Sigma v <= 0.
double hjm_drift(const AdmissibleParams& params, const VolatilitySpec& vol,
                 const MeasureChange& mc, const PsdMatrix& x, double t, double T);

namespace detail {

// Per-step scalar state extracted from a path once and reused by every curve
// observable.  All volatility kinds factor as scale(s,T) * sigma0, so the
// curve dynamics reduce to these scalars.
struct StepScalars {
  double s = 0.0;   // left endpoint
  double dt = 0.0;
  double g = 0.0;   // Tr[Q sigma0 X sigma0 Q^T]
  double h = 0.0;   // Tr[sigma0 sqrt(X) dW Q]
  std::vector<double> lam;  // per ray: K * (lambda_const + Tr[X L])
};

struct JumpScalar {
  double time = 0.0;
  int ray = 0;
  double gamma = 0.0;
};

struct PathScalars {
  std::vector<StepScalars> steps;
  std::vector<JumpScalar> jumps;
  std::vector<double> ray_a0;     // v^T sigma0 v per ray
  std::vector<double> ray_theta;
  std::vector<double> ray_k;
};

PathScalars compute_path_scalars(const AdmissibleParams& params, const VolatilitySpec& vol,
                                 const MeasureChange& mc, const SamplePath& path);

// int_t^U f(t, u) du with the maturity integral in closed form (discrete in
// time only).  Shared by the bond quadrature's first cell and the discounted
// bond estimator.
double integrated_forward(const VolatilitySpec& vol, const InitialCurve& curve,
                          const PathScalars& scalars, std::size_t t_index, double t, double u);

// f(t_index, T) evaluated directly from the scalars (used for the diagonal).
double forward_value(const VolatilitySpec& vol, const InitialCurve& curve,
                     const PathScalars& scalars, std::size_t t_index, double t, double T);

}  // namespace detail

/// Forward surface f(t_i, T_j) along one path, evolved under the
/// no-arbitrage dynamics with left-endpoint (caglad) integrand evaluation.
/// Rows share the path's time grid.
class ForwardSurface {
 public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& maturities() const { return maturities_; }
  double forward_at(std::size_t i, std::size_t j) const {
    return f_[i * maturities_.size() + j];
  }
  /// Grid lookup with node matching (RangeError off the grid).
  double forward(double t, double T) const;

  /// P(t, T) = exp(-int_t^T f(t,u) du): trapezoidal in maturity on the
  /// stored grid, with the first (possibly singular) cell integrated via the
  /// closed-form Sigma increment when available.  P(T, T) = 1 exactly.
  double bond_price(double t, double T) const;
  /// r_t = f(t, t), evaluated directly from the cached path scalars.
  double short_rate(double t) const;
  /// Y(t, T) = -log P(t, T) / (T - t); use short_rate at t = T.
  double yield(double t, double T) const;

 private:
  friend ForwardSurface evolve_forward(const AdmissibleParams&, const VolatilitySpec&,
                                       const MeasureChange&, const InitialCurve&,
                                       const SamplePath&, std::vector<double>);
  std::size_t time_index(double t) const;

  std::vector<double> times_;
  std::vector<double> maturities_;
  std::vector<double> f_;  // row-major: time x maturity
  VolatilitySpec vol_;
  InitialCurve curve_;
  detail::PathScalars scalars_;
};

ForwardSurface evolve_forward(const AdmissibleParams& params, const VolatilitySpec& vol,
                              const MeasureChange& mc, const InitialCurve& curve,
                              const SamplePath& path, std::vector<double> maturities);

/// The four-term compact yield decomposition plus its compensated
/// regrouping; the two totals agree identically (same compensator, split
/// differently).
struct YieldTerms {
  double y0 = 0.0;                // Y(0; t, T)
  double gamma_term = 0.0;        // 2 int Tr[Q (Gamma(s,T)-Gamma(s,t))/(T-t) Q^T] ds
  double jump_compensator = 0.0;  // int (e^{Tr[Sigma(s,T)xi]} - e^{Tr[Sigma(s,t)xi]})/(T-t) nu*
  double jump_path = 0.0;         // -int Tr[(Sigma(s,T)-Sigma(s,t)) xi]/(T-t) mu^X
  double brownian = 0.0;          // -2 int Tr[(Sigma(s,T)-Sigma(s,t))/(T-t) sqrt(X) dW Q]
  double m_compensator = 0.0;     // M(s,t,T,xi) grouping
  double compensated_jump = 0.0;  // -int Tr[(..) xi]/(T-t) (mu^X - nu*)
  std::vector<double> m_values;   // M(s,t,T,xi) per realized jump

  double total() const { return y0 + gamma_term + jump_compensator + jump_path + brownian; }
  double total_compensated() const {
    return y0 + gamma_term + m_compensator + compensated_jump + brownian;
  }
};

YieldTerms yield_compact(const AdmissibleParams& params, const VolatilitySpec& vol,
                         const MeasureChange& mc, const InitialCurve& curve,
                         const SamplePath& path, double t, double T);

struct DiscountedBondTerms {
  double log_bond = 0.0;              // log P(t, T)
  double integrated_short_rate = 0.0; // int_0^t r_s ds, left-rule quadrature
  double value() const;               // P(t,T) * exp(-int r)
};

/// Per-path discounted bond P(t,T)/beta_t.  Exponentially decaying
/// volatility without jumps admits an O(n) running-sum evaluation (the
/// finite-dimensional realization of the curve); other specs fall back to
/// direct per-node short-rate evaluation.
DiscountedBondTerms discounted_bond_terms(const AdmissibleParams& params,
                                          const VolatilitySpec& vol, const MeasureChange& mc,
                                          const InitialCurve& curve, const SamplePath& path,
                                          double t, double T);

}  // namespace affinehjm
