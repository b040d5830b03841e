#include "affinehjm/longterm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affinehjm/errors.hpp"

namespace affinehjm {

std::vector<double> default_maturity_ladder() { return {25.0, 50.0, 100.0, 200.0, 400.0}; }

LadderFit extrapolate_ladder(const std::vector<double>& maturities,
                             const std::vector<double>& values) {
  const std::size_t n = maturities.size();
  if (n < 3 || values.size() != n) {
    throw DomainError("extrapolate_ladder: needs >= 3 ladder points");
  }
  if (!std::is_sorted(maturities.begin(), maturities.end())) {
    throw DomainError("extrapolate_ladder: maturities must be increasing");
  }

  LadderFit fit;
  // Exact interpolation of the last three points in {1, u, u^2}, u = 1/sqrt(T);
  // the value at u = 0 is the limit.
  const double u1 = 1.0 / std::sqrt(maturities[n - 3]);
  const double u2 = 1.0 / std::sqrt(maturities[n - 2]);
  const double u3 = 1.0 / std::sqrt(maturities[n - 1]);
  const double y1 = values[n - 3];
  const double y2 = values[n - 2];
  const double y3 = values[n - 1];
  const double w1 = (u2 * u3) / ((u1 - u2) * (u1 - u3));
  const double w2 = (u1 * u3) / ((u2 - u1) * (u2 - u3));
  const double w3 = (u1 * u2) / ((u3 - u1) * (u3 - u2));
  fit.limit = w1 * y1 + w2 * y2 + w3 * y3;

  // Quadratic coefficients in u for the residual report.
  // y(u) = limit + coef_sqrt * u + coef_inv * u^2.
  {
    const double c1 = y1 - fit.limit;
    const double c2 = y2 - fit.limit;
    const double det = u1 * u2 * u2 - u2 * u1 * u1;
    fit.coef_sqrt = (c1 * u2 * u2 - c2 * u1 * u1) / det;
    fit.coef_inv = (c2 * u1 - c1 * u2) / det;
  }

  // Least-squares a + c/sqrt(T) on the last three points (diagnostic).
  {
    double su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
    const double us[3] = {u1, u2, u3};
    const double ys[3] = {y1, y2, y3};
    for (int i = 0; i < 3; ++i) {
      su += us[i];
      sy += ys[i];
      suu += us[i] * us[i];
      suy += us[i] * ys[i];
    }
    const double var = suu - su * su / 3.0;
    const double cov = suy - su * sy / 3.0;
    const double slope = var > 0.0 ? cov / var : 0.0;
    fit.ls_limit = sy / 3.0 - slope * su / 3.0;
  }

  for (std::size_t i = 0; i + 3 < n; ++i) {
    const double u = 1.0 / std::sqrt(maturities[i]);
    const double model = fit.limit + fit.coef_sqrt * u + fit.coef_inv * u * u;
    fit.residual = std::max(fit.residual, std::abs(model - values[i]));
  }
  return fit;
}

SymMatrix mu_inf_closed(const VolatilitySpec& vol, const PsdMatrix& x, double /*t*/) {
  switch (vol.kind()) {
    case VolKind::exponential_decay:
      return SymMatrix(vol.dim());
    case VolKind::inverse_sqrt:
      return 4.0 * sandwich(vol.sigma0().sym(), x.sym());
    case VolKind::tabulated:
      throw DomainError("mu_inf_closed: tabulated volatility has no closed form; use the ladder");
  }
  return SymMatrix(vol.dim());
}

namespace {

void check_ladder(const std::vector<double>& ladder, double t) {
  if (ladder.size() < 3) throw DomainError("ladder needs >= 3 maturities");
  if (!std::is_sorted(ladder.begin(), ladder.end())) {
    throw DomainError("ladder maturities must be increasing");
  }
  if (ladder.back() < 100.0 * (1.0 + t)) {
    throw DomainError("ladder too short: max maturity must be >= 100 * (1 + t)");
  }
}

MatrixLadderResult extrapolate_matrix_ladder(const std::vector<double>& ladder,
                                             const std::vector<SymMatrix>& values, int d) {
  MatrixLadderResult out;
  out.limit = SymMatrix(d);
  out.residual = SymMatrix(d);
  out.ladder_values = values;
  std::vector<double> scalar(ladder.size());
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      for (std::size_t k = 0; k < ladder.size(); ++k) scalar[k] = values[k](i, j);
      const LadderFit fit = extrapolate_ladder(ladder, scalar);
      out.limit.set(i, j, fit.limit);
      out.residual.set(i, j, fit.residual);
    }
  }
  return out;
}

}  // namespace

MatrixLadderResult mu_inf_numeric(const VolatilitySpec& vol, const PsdMatrix& x, double t,
                                  const std::vector<double>& ladder) {
  check_ladder(ladder, t);
  const int d = vol.dim();
  std::vector<SymMatrix> values;
  values.reserve(ladder.size());
  for (double T : ladder) {
    const double cb = vol.big_scale(t, T);
    SymMatrix gamma = sandwich(vol.sigma0().sym(), x.sym());
    gamma *= cb * cb / (T - t);
    values.push_back(gamma);
  }
  return extrapolate_matrix_ladder(ladder, values, d);
}

MatrixLadderResult sigma_inf_numeric(const VolatilitySpec& vol, double t,
                                     const std::vector<double>& ladder) {
  check_ladder(ladder, t);
  const int d = vol.dim();
  std::vector<SymMatrix> values;
  values.reserve(ladder.size());
  for (double T : ladder) {
    values.push_back((vol.big_scale(t, T) / (T - t)) * vol.sigma0().sym());
  }
  return extrapolate_matrix_ladder(ladder, values, d);
}

std::vector<double> ell_trajectory(const AdmissibleParams& params, const VolatilitySpec& vol,
                                   const SamplePath& path, double ell0) {
  if (vol.dim() != params.dim) throw DimensionError("ell_trajectory: dimension mismatch");
  const std::size_t n = path.t.size();
  std::vector<double> ell(n, ell0);
  if (vol.kind() == VolKind::exponential_decay) {
    return ell;  // mu_inf = 0: constant long-term yield
  }
  if (vol.kind() == VolKind::tabulated) {
    const DecayReport report = classify_decay(vol, path.t.front(), default_maturity_ladder());
    if (report.classification == DecayClass::infinite) {
      throw NumericalError(
          "ell_trajectory: volatility decays too slowly; the long-term yield does not exist in "
          "finite form");
    }
    if (report.classification == DecayClass::constant) return ell;
    throw DomainError(
        "ell_trajectory: tabulated volatility with non-decreasing class has no closed mu_inf; "
        "unsupported");
  }

  // inverse-sqrt kind: mu_inf(s) = 4 sigma0 X_s sigma0, and
  // 2 Tr[Q mu_inf Q^T] = 8 ||sqrt(X) sigma0 Q^T||_F^2, a sum of squares, so
  // increments are non-negative in exact floating point.
  const int d = params.dim;
  Matrix sq(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += vol.sigma0().sym()(i, k) * params.q(j, k);
      sq(i, j) = acc;  // (sigma0 Q^T)_{ij}
    }
  double acc = ell0;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    const double dt = path.t[step + 1] - path.t[step];
    const SymMatrix root = sqrt_psd_clipped(path.states[step].sym());
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        double entry = 0.0;
        for (int k = 0; k < d; ++k) entry += root(i, k) * sq(k, j);
        norm2 += entry * entry;
      }
    }
    acc += 8.0 * norm2 * dt;
    ell[step + 1] = acc;
  }
  return ell;
}

const char* to_string(DecayClass c) {
  switch (c) {
    case DecayClass::infinite:
      return "infinite";
    case DecayClass::constant:
      return "constant";
    case DecayClass::non_decreasing:
      return "non_decreasing";
  }
  return "?";
}

DecayReport classify_decay(const VolatilitySpec& vol, double probe_t,
                           const std::vector<double>& ladder) {
  if (ladder.size() < 3) throw DomainError("classify_decay: ladder needs >= 3 maturities");
  if (ladder.back() / ladder.front() < 100.0) {
    throw DomainError("classify_decay: ladder must span at least two decades");
  }

  DecayReport report;
  const double sigma_norm = frobenius_norm(vol.sigma0().sym());
  if (sigma_norm == 0.0) {
    report.classification = DecayClass::constant;  // degenerate: sigma_inf = mu_inf = 0
    return report;
  }

  // Log-log slope of ||sigma(probe_t, T)|| in (T - probe_t).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (double T : ladder) {
    const double span = T - probe_t;
    if (span <= 0.0) continue;
    const double value = vol.scale(probe_t, T) * sigma_norm;
    if (value <= 0.0) {
      // Exponential tails underflow on long ladders; treat as a very steep slope.
      report.slope = -50.0;
      continue;
    }
    const double lx = std::log(span);
    const double ly = std::log(value);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count >= 2) {
    const double var = sxx - sx * sx / static_cast<double>(count);
    report.slope = var > 0.0 ? (sxy - sx * sy / static_cast<double>(count)) / var : 0.0;
  }

  switch (vol.kind()) {
    case VolKind::exponential_decay:
      report.classification = DecayClass::constant;
      return report;
    case VolKind::inverse_sqrt:
      report.classification = DecayClass::non_decreasing;
      return report;
    case VolKind::tabulated:
      break;
  }

  const double rho = report.slope;
  if (rho >= -0.25) {
    report.classification = DecayClass::infinite;
  } else if (rho > -0.75) {
    report.classification = DecayClass::non_decreasing;
  } else {
    report.classification = DecayClass::constant;
  }
  if (std::abs(rho + 0.25) <= 0.1 || std::abs(rho + 0.75) <= 0.1) {
    report.indeterminate_warning = true;
  }
  return report;
}

VolBoundReport verify_vol_bound(const VolatilitySpec& vol, const std::vector<double>& s_grid,
                                const std::vector<double>& t_grid) {
  const int d = vol.dim();
  VolBoundReport report;
  report.empirical = SymMatrix(d);
  report.closed_form = SymMatrix(d);

  for (double s : s_grid) {
    for (double t : t_grid) {
      if (t <= s || t <= 0.0) continue;
      const double ratio = std::abs(vol.big_scale(s, t)) / std::sqrt(t);
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          const double v = ratio * std::abs(vol.sigma0().sym()(i, j));
          if (v > report.empirical(i, j)) report.empirical.set(i, j, v);
        }
    }
  }

  switch (vol.kind()) {
    case VolKind::exponential_decay:
      report.has_closed_form = true;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          report.closed_form.set(i, j, (2.0 / vol.beta()) * std::abs(vol.sigma0().sym()(i, j)));
        }
      break;
    case VolKind::inverse_sqrt:
      report.has_closed_form = true;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          report.closed_form.set(i, j, 2.0 * std::abs(vol.sigma0().sym()(i, j)));
        }
      break;
    case VolKind::tabulated:
      report.has_closed_form = false;
      break;
  }
  if (report.has_closed_form) {
    report.dominated = true;
    for (int i = 0; i < d && report.dominated; ++i)
      for (int j = i; j < d; ++j) {
        if (report.empirical(i, j) > report.closed_form(i, j) + 1e-12) {
          report.dominated = false;
          break;
        }
      }
  }
  return report;
}

}  // namespace affinehjm
