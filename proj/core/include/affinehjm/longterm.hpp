#pragma once

#include <vector>

#include "affinehjm/affine_params.hpp"
#include "affinehjm/hjm_curve.hpp"
#include "affinehjm/pathsim.hpp"
#include "affinehjm/sym_matrix.hpp"

namespace affinehjm {

/// Default long-maturity ladder, in years.
std::vector<double> default_maturity_ladder();

/// Limit extraction from a maturity ladder.  The primary estimate
/// interpolates the last three points exactly in the basis {1, 1/sqrt(T),
/// 1/T}, which recovers both O(1/sqrt(T)) and O(1/T) tails without bias; the
/// least-squares a + c/sqrt(T) fit is kept as a diagnostic, and the residual
/// reports how far the model strays from the earlier ladder points.
struct LadderFit {
  double limit = 0.0;       // interpolated value at T = infinity
  double ls_limit = 0.0;    // least-squares a + c/sqrt(T) intercept (last 3 points)
  double coef_sqrt = 0.0;   // fitted coefficient of 1/sqrt(T)
  double coef_inv = 0.0;    // fitted coefficient of 1/T
  double residual = 0.0;    // max |model - data| over the remaining points
};
LadderFit extrapolate_ladder(const std::vector<double>& maturities,
                             const std::vector<double>& values);

/// Closed-form long-term drift mu_inf(t) = lim Gamma(t,T)/(T-t):
/// 0 for exponentially decaying volatility, 4 sigma0 x sigma0 for the
/// inverse-sqrt kind.  Tabulated kinds must use the numeric ladder.
SymMatrix mu_inf_closed(const VolatilitySpec& vol, const PsdMatrix& x, double t);

struct MatrixLadderResult {
  SymMatrix limit;
  SymMatrix residual;   // entrywise extrapolation residual
  std::vector<SymMatrix> ladder_values;
};

/// Gamma(t,T)/(T-t) on the ladder, extrapolated entrywise.
MatrixLadderResult mu_inf_numeric(const VolatilitySpec& vol, const PsdMatrix& x, double t,
                                  const std::vector<double>& ladder);
/// Sigma(t,T)/(T-t) on the ladder, extrapolated entrywise.
MatrixLadderResult sigma_inf_numeric(const VolatilitySpec& vol, double t,
                                     const std::vector<double>& ladder);

/// ell_t = ell_0 + 2 int_0^t Tr[Q mu_inf(s) Q^T] ds along the path, with
/// left-point quadrature.  The integrand is assembled as a squared Frobenius
/// norm, so the output is non-decreasing without tolerance games.  The
/// result depends only on (Q, mu_inf); measure-change inputs never enter.
std::vector<double> ell_trajectory(const AdmissibleParams& params, const VolatilitySpec& vol,
                                   const SamplePath& path, double ell0);

enum class DecayClass { infinite, constant, non_decreasing };

const char* to_string(DecayClass c);

struct DecayReport {
  DecayClass classification = DecayClass::constant;
  double slope = 0.0;               // log-log slope of ||sigma(t,T)|| in T - t
  bool indeterminate_warning = false;
};

/// Classifies the long-maturity behaviour of the volatility curve by the
/// log-log slope rho of ||sigma(probe_t, T)|| against T - probe_t:
/// rho >= -0.25 -> infinite, rho in (-0.75, -0.25) -> non-decreasing
/// (~ -1/2), rho <= -0.75 -> constant (~ -1 or faster).  Closed-form kinds
/// short-circuit to their known class; zero volatility is constant by
/// convention.  Slopes within 0.1 of a boundary are flagged.
DecayReport classify_decay(const VolatilitySpec& vol, double probe_t,
                           const std::vector<double>& ladder);

struct VolBoundReport {
  SymMatrix empirical;      // sup over t of |Sigma(s,t)_ij| / sqrt(t), maximized over s
  SymMatrix closed_form;    // (2/beta)|sigma0_ij| or 2|sigma0_ij|; zero if unavailable
  bool has_closed_form = false;
  bool dominated = false;   // closed form dominates the empirical bound
};

/// Empirical check of the square-root bound |Sigma(s,t)_ij| <= sqrt(t) w_ij(s)
/// against the closed-form w of the two analytic volatility kinds.
VolBoundReport verify_vol_bound(const VolatilitySpec& vol, const std::vector<double>& s_grid,
                                const std::vector<double>& t_grid);

}  // namespace affinehjm
