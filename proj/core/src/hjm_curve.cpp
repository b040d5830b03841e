#include "affinehjm/hjm_curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affinehjm/errors.hpp"

namespace affinehjm {

namespace {

constexpr double kNodeTolerance = 1e-9;

std::size_t find_node(const std::vector<double>& grid, double t, const char* who) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t - kNodeTolerance);
  if (it == grid.end() || std::abs(*it - t) > kNodeTolerance * (1.0 + std::abs(t))) {
    throw RangeError(std::string(who) + ": t = " + std::to_string(t) + " is not a grid node");
  }
  return static_cast<std::size_t>(it - grid.begin());
}

double piecewise_linear(const std::vector<std::pair<double, double>>& nodes, double x) {
  if (x <= nodes.front().first) return nodes.front().second;
  if (x >= nodes.back().first) return nodes.back().second;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x,
                                   [](double v, const auto& n) { return v < n.first; });
  const auto hi = it;
  const auto lo = it - 1;
  const double w = (x - lo->first) / (hi->first - lo->first);
  return (1.0 - w) * lo->second + w * hi->second;
}

}  // namespace

VolatilitySpec VolatilitySpec::exponential(PsdMatrix sigma0, double beta) {
  if (!(beta > 0.0)) throw DomainError("VolatilitySpec::exponential: beta must be > 0");
  VolatilitySpec v;
  v.kind_ = VolKind::exponential_decay;
  v.sigma0_ = std::move(sigma0);
  v.beta_ = beta;
  return v;
}

VolatilitySpec VolatilitySpec::inverse_sqrt(PsdMatrix sigma0) {
  VolatilitySpec v;
  v.kind_ = VolKind::inverse_sqrt;
  v.sigma0_ = std::move(sigma0);
  return v;
}

VolatilitySpec VolatilitySpec::tabulated(PsdMatrix sigma0,
                                         std::vector<std::pair<double, double>> profile) {
  if (profile.empty()) throw DomainError("VolatilitySpec::tabulated: empty profile");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].first < 0.0 || profile[i].second < 0.0) {
      throw DomainError("VolatilitySpec::tabulated: taus and scales must be non-negative");
    }
    if (i > 0 && profile[i].first <= profile[i - 1].first) {
      throw DomainError("VolatilitySpec::tabulated: taus must be strictly increasing");
    }
  }
  VolatilitySpec v;
  v.kind_ = VolKind::tabulated;
  v.sigma0_ = std::move(sigma0);
  v.profile_ = std::move(profile);
  return v;
}

double VolatilitySpec::scale(double s, double T) const {
  switch (kind_) {
    case VolKind::exponential_decay:
      return T >= s ? std::exp(-beta_ * (T - s)) : 0.0;
    case VolKind::inverse_sqrt:
      return T > s ? 1.0 / std::sqrt(T - s) : 0.0;
    case VolKind::tabulated:
      return T >= s ? piecewise_linear(profile_, T - s) : 0.0;
  }
  return 0.0;
}

double VolatilitySpec::big_scale(double s, double T) const {
  if (s > T) throw DomainError("VolatilitySpec::big_scale: requires s <= T");
  switch (kind_) {
    case VolKind::exponential_decay:
      return -(1.0 - std::exp(-beta_ * (T - s))) / beta_;
    case VolKind::inverse_sqrt:
      return -2.0 * std::sqrt(T - s);
    case VolKind::tabulated: {
      // Composite Simpson over tau in [0, T-s].
      const double len = T - s;
      if (len == 0.0) return 0.0;
      const int n = 256;  // even
      const double h = len / n;
      double acc = piecewise_linear(profile_, 0.0) + piecewise_linear(profile_, len);
      for (int k = 1; k < n; ++k) {
        acc += (k % 2 == 1 ? 4.0 : 2.0) * piecewise_linear(profile_, k * h);
      }
      return -acc * h / 3.0;
    }
  }
  return 0.0;
}

SymMatrix VolatilitySpec::sigma(double s, double T) const {
  return scale(s, T) * sigma0_.sym();
}

SymMatrix VolatilitySpec::big_sigma(double s, double T) const {
  return big_scale(s, T) * sigma0_.sym();
}

InitialCurve InitialCurve::flat(double rate) {
  InitialCurve c;
  c.flat_ = true;
  c.rate_ = rate;
  return c;
}

InitialCurve InitialCurve::from_nodes(std::vector<std::pair<double, double>> nodes) {
  if (nodes.empty()) throw DomainError("InitialCurve: needs at least one node");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].first) || !std::isfinite(nodes[i].second)) {
      throw DomainError("InitialCurve: non-finite node");
    }
    if (i > 0 && nodes[i].first <= nodes[i - 1].first) {
      throw DomainError("InitialCurve: maturities must be strictly increasing");
    }
  }
  InitialCurve c;
  c.flat_ = false;
  c.nodes_ = std::move(nodes);
  c.cumulative_.resize(c.nodes_.size(), 0.0);
  for (std::size_t i = 1; i < c.nodes_.size(); ++i) {
    const double width = c.nodes_[i].first - c.nodes_[i - 1].first;
    c.cumulative_[i] =
        c.cumulative_[i - 1] + 0.5 * (c.nodes_[i].second + c.nodes_[i - 1].second) * width;
  }
  return c;
}

double InitialCurve::forward(double T) const {
  if (flat_) return rate_;
  return piecewise_linear(nodes_, T);
}

double InitialCurve::integral(double a, double b) const {
  if (flat_) return rate_ * (b - a);
  // Antiderivative from the first node, exact for the piecewise-linear curve
  // with flat extrapolation on both sides.
  auto cum = [&](double x) {
    const double t0 = nodes_.front().first;
    const double t1 = nodes_.back().first;
    if (x <= t0) return nodes_.front().second * (x - t0);
    if (x >= t1) return cumulative_.back() + nodes_.back().second * (x - t1);
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                                     [](double v, const auto& n) { return v < n.first; });
    const std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
    const std::size_t lo = hi - 1;
    const double dx = x - nodes_[lo].first;
    const double f_at_x = piecewise_linear(nodes_, x);
    return cumulative_[lo] + 0.5 * (nodes_[lo].second + f_at_x) * dx;
  };
  return cum(b) - cum(a);
}

double InitialCurve::yield0(double t, double T) const {
  if (!(T > t)) throw DomainError("InitialCurve::yield0: requires t < T");
  return integral(t, T) / (T - t);
}

double InitialCurve::ell0_default() const {
  if (flat_) return rate_;
  const double t1 = nodes_.back().first;
  if (t1 <= 0.0) return nodes_.back().second;
  return integral(0.0, t1) / t1;
}

MeasureChange MeasureChange::none(int dim) {
  MeasureChange mc;
  mc.gamma = Matrix(dim);
  return mc;
}

bool MeasureChange::is_trivial() const {
  for (double v : gamma.values()) {
    if (v != 0.0) return false;
  }
  for (double k : k_per_ray) {
    if (k != 1.0) return false;
  }
  return true;
}

double hjm_drift(const AdmissibleParams& params, const VolatilitySpec& vol,
                 const MeasureChange& mc, const PsdMatrix& x, double t, double T) {
  if (x.dim() != params.dim || vol.dim() != params.dim) {
    throw DimensionError("hjm_drift: dimension mismatch");
  }
  const double c_sig = vol.scale(t, T);
  const double c_big = vol.big_scale(t, T);
  const SymMatrix& sigma0 = vol.sigma0().sym();

  // -Tr[sigma (b + B(x) + 2 sqrt(x) gamma Q)]
  SymMatrix inner = params.b.sym() + params.drift.apply(x.sym());
  double term1 = trace_inner(sigma0, inner);
  if (!mc.gamma.empty()) {
    const SymMatrix s = sqrt_psd_clipped(x.sym());
    const Matrix sgq = s.to_matrix() * (mc.gamma * params.q);
    term1 += 2.0 * trace_product(sigma0, sgq);
  }
  term1 *= -c_sig;

  // -4 Tr[Q sigma x Sigma Q^T]
  const SymMatrix core = sandwich(sigma0, x.sym());
  const Matrix qtq = params.q.transposed() * params.q;
  const double term2 = -4.0 * c_sig * c_big * trace_product(core, qtq);

  // jump part: per ray lambda_eff * K * a * theta / (theta - c)^2
  double term3 = 0.0;
  const auto& rays = params.jumps.rays();
  for (std::size_t r = 0; r < rays.size(); ++r) {
    const JumpRay& ray = rays[r];
    double lam = ray.lambda_const;
    if (!ray.l_state.empty()) lam += std::max(0.0, trace_inner(x.sym(), ray.l_state.sym()));
    if (lam <= 0.0) continue;
    const double a0 = quad_form(sigma0, ray.v);
    const double a = c_sig * a0;
    const double c = c_big * a0;  // <= 0, so theta - c >= theta > 0
    term3 -= mc.k(r) * lam * a * ray.theta / ((ray.theta - c) * (ray.theta - c));
  }
  return term1 + term2 + term3;
}

namespace detail {

PathScalars compute_path_scalars(const AdmissibleParams& params, const VolatilitySpec& vol,
                                 const MeasureChange& mc, const SamplePath& path) {
  if (vol.dim() != params.dim) throw DimensionError("compute_path_scalars: dimension mismatch");
  if (path.t.size() < 2) throw DomainError("compute_path_scalars: path has no steps");
  if (path.dw.size() + 1 != path.t.size()) {
    throw DomainError(
        "compute_path_scalars: path has no Brownian increments (exact-scheme paths cannot drive "
        "the curve)");
  }

  const int d = params.dim;
  const SymMatrix& sigma0 = vol.sigma0().sym();
  const Matrix qtq_m = params.q.transposed() * params.q;
  SymMatrix qtq(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) qtq.set(i, j, 0.5 * (qtq_m(i, j) + qtq_m(j, i)));

  PathScalars ps;
  const auto& rays = params.jumps.rays();
  ps.ray_a0.reserve(rays.size());
  ps.ray_theta.reserve(rays.size());
  ps.ray_k.reserve(rays.size());
  for (std::size_t r = 0; r < rays.size(); ++r) {
    ps.ray_a0.push_back(quad_form(sigma0, rays[r].v));
    ps.ray_theta.push_back(rays[r].theta);
    ps.ray_k.push_back(mc.k(r));
  }

  const std::size_t n_steps = path.t.size() - 1;
  ps.steps.resize(n_steps);
  Matrix tmp(d), tmp2(d);
  for (std::size_t i = 0; i < n_steps; ++i) {
    StepScalars& st = ps.steps[i];
    st.s = path.t[i];
    st.dt = path.t[i + 1] - path.t[i];
    const SymMatrix& x = path.states[i].sym();

    st.g = trace_inner(sandwich(sigma0, x), qtq);

    // h = Tr[sigma0 sqrt(x) dW Q]
    const SymMatrix s = sqrt_psd_clipped(x);
    const Matrix& dw = path.dw[i];
    for (int a = 0; a < d; ++a)
      for (int b2 = 0; b2 < d; ++b2) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) acc += s(a, k) * dw(k, b2);
        tmp(a, b2) = acc;
      }
    for (int a = 0; a < d; ++a)
      for (int b2 = 0; b2 < d; ++b2) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) acc += tmp(a, k) * params.q(k, b2);
        tmp2(a, b2) = acc;
      }
    st.h = trace_product(sigma0, tmp2);

    st.lam.resize(rays.size());
    for (std::size_t r = 0; r < rays.size(); ++r) {
      double lam = rays[r].lambda_const;
      if (!rays[r].l_state.empty()) {
        lam += std::max(0.0, trace_inner(x, rays[r].l_state.sym()));
      }
      st.lam[r] = mc.k(r) * lam;
    }
  }

  ps.jumps.reserve(path.jumps.size());
  for (const JumpEvent& j : path.jumps) {
    ps.jumps.push_back({j.time, j.ray_index, j.gamma});
  }
  return ps;
}

double integrated_forward(const VolatilitySpec& vol, const InitialCurve& curve,
                          const PathScalars& scalars, std::size_t t_index, double t, double u) {
  double total = curve.integral(t, u);
  for (std::size_t i = 0; i < t_index && i < scalars.steps.size(); ++i) {
    const StepScalars& st = scalars.steps[i];
    const double cb_t = vol.big_scale(st.s, t);
    const double cb_u = vol.big_scale(st.s, u);
    // drift: 2 g (c_Sigma(s,u)^2 - c_Sigma(s,t)^2)
    double det = 2.0 * st.g * (cb_u * cb_u - cb_t * cb_t);
    for (std::size_t r = 0; r < st.lam.size(); ++r) {
      if (st.lam[r] == 0.0) continue;
      const double theta = scalars.ray_theta[r];
      const double ct = scalars.ray_a0[r] * cb_t;
      const double cu = scalars.ray_a0[r] * cb_u;
      det -= st.lam[r] * (theta / (theta - ct) - theta / (theta - cu));
    }
    total += det * st.dt;
    total += 2.0 * st.h * (cb_t - cb_u);
  }
  for (const JumpScalar& j : scalars.jumps) {
    if (j.time > t + kNodeTolerance) continue;
    const double a0 = scalars.ray_a0[static_cast<std::size_t>(j.ray)];
    total += j.gamma * a0 * (vol.big_scale(j.time, t) - vol.big_scale(j.time, u));
  }
  return total;
}

double forward_value(const VolatilitySpec& vol, const InitialCurve& curve,
                     const PathScalars& scalars, std::size_t t_index, double t, double T) {
  double f = curve.forward(T);
  for (std::size_t i = 0; i < t_index && i < scalars.steps.size(); ++i) {
    const StepScalars& st = scalars.steps[i];
    const double cs = vol.scale(st.s, T);
    const double cb = vol.big_scale(st.s, T);
    double det = -4.0 * cs * cb * st.g;
    for (std::size_t r = 0; r < st.lam.size(); ++r) {
      if (st.lam[r] == 0.0) continue;
      const double theta = scalars.ray_theta[r];
      const double a = scalars.ray_a0[r] * cs;
      const double c = scalars.ray_a0[r] * cb;
      det -= st.lam[r] * a * theta / ((theta - c) * (theta - c));
    }
    f += det * st.dt + 2.0 * cs * st.h;
  }
  for (const JumpScalar& j : scalars.jumps) {
    if (j.time > t + kNodeTolerance) continue;
    const double a0 = scalars.ray_a0[static_cast<std::size_t>(j.ray)];
    f += j.gamma * a0 * vol.scale(j.time, T);
  }
  return f;
}

}  // namespace detail

ForwardSurface evolve_forward(const AdmissibleParams& params, const VolatilitySpec& vol,
                              const MeasureChange& mc, const InitialCurve& curve,
                              const SamplePath& path, std::vector<double> maturities) {
  if (maturities.empty()) throw DomainError("evolve_forward: empty maturity grid");
  if (!std::is_sorted(maturities.begin(), maturities.end())) {
    throw DomainError("evolve_forward: maturities must be increasing");
  }

  ForwardSurface surf;
  surf.vol_ = vol;
  surf.curve_ = curve;
  surf.scalars_ = detail::compute_path_scalars(params, vol, mc, path);
  surf.times_ = path.t;
  surf.maturities_ = std::move(maturities);

  const std::size_t n = surf.times_.size();
  const std::size_t m = surf.maturities_.size();
  surf.f_.assign(n * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) surf.f_[j] = curve.forward(surf.maturities_[j]);

  std::size_t jump_cursor = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const detail::StepScalars& st = surf.scalars_.steps[i];
    const double* row = &surf.f_[i * m];
    double* next = &surf.f_[(i + 1) * m];
    for (std::size_t j = 0; j < m; ++j) {
      const double T = surf.maturities_[j];
      if (T <= st.s) {
        next[j] = row[j];
        continue;
      }
      const double cs = vol.scale(st.s, T);
      const double cb = vol.big_scale(st.s, T);
      double det = -4.0 * cs * cb * st.g;
      for (std::size_t r = 0; r < st.lam.size(); ++r) {
        if (st.lam[r] == 0.0) continue;
        const double theta = surf.scalars_.ray_theta[r];
        const double a = surf.scalars_.ray_a0[r] * cs;
        const double c = surf.scalars_.ray_a0[r] * cb;
        det -= st.lam[r] * a * theta / ((theta - c) * (theta - c));
      }
      next[j] = row[j] + det * st.dt + 2.0 * cs * st.h;
    }
    // realized jumps recorded at the right endpoint of this step
    while (jump_cursor < surf.scalars_.jumps.size() &&
           surf.scalars_.jumps[jump_cursor].time <= surf.times_[i + 1] + kNodeTolerance) {
      const detail::JumpScalar& jp = surf.scalars_.jumps[jump_cursor];
      const double a0 = surf.scalars_.ray_a0[static_cast<std::size_t>(jp.ray)];
      for (std::size_t j = 0; j < m; ++j) {
        next[j] += jp.gamma * a0 * vol.scale(jp.time, surf.maturities_[j]);
      }
      ++jump_cursor;
    }
  }
  return surf;
}

std::size_t ForwardSurface::time_index(double t) const {
  return find_node(times_, t, "ForwardSurface");
}

double ForwardSurface::forward(double t, double T) const {
  const std::size_t i = time_index(t);
  const std::size_t j = find_node(maturities_, T, "ForwardSurface maturity");
  return forward_at(i, j);
}

double ForwardSurface::bond_price(double t, double T) const {
  if (T < t - kNodeTolerance) throw DomainError("bond_price: requires t <= T");
  const std::size_t k = time_index(t);
  if (std::abs(T - t) <= kNodeTolerance) return 1.0;

  const std::size_t m = maturities_.size();
  const std::size_t jT = find_node(maturities_, T, "bond_price maturity");
  std::size_t j1 = static_cast<std::size_t>(
      std::upper_bound(maturities_.begin(), maturities_.end(), t + kNodeTolerance) -
      maturities_.begin());
  if (j1 >= m || j1 > jT) j1 = jT;

  double integral = 0.0;
  const double u1 = maturities_[j1];
  if (vol_.closed_sigma_available()) {
    // First cell by the closed-form Sigma increment; handles the singular
    // inverse-sqrt diagonal without evaluating sigma there.
    integral += detail::integrated_forward(vol_, curve_, scalars_, k, t, u1);
  } else {
    const double f_diag = detail::forward_value(vol_, curve_, scalars_, k, t, t);
    integral += 0.5 * (f_diag + forward_at(k, j1)) * (u1 - t);
  }
  for (std::size_t j = j1; j < jT; ++j) {
    integral += 0.5 * (forward_at(k, j) + forward_at(k, j + 1)) *
                (maturities_[j + 1] - maturities_[j]);
  }
  return std::exp(-integral);
}

double ForwardSurface::short_rate(double t) const {
  const std::size_t k = time_index(t);
  return detail::forward_value(vol_, curve_, scalars_, k, t, t);
}

double ForwardSurface::yield(double t, double T) const {
  if (!(T > t + kNodeTolerance)) {
    throw DomainError("yield: requires t < T (use short_rate at t = T)");
  }
  return -std::log(bond_price(t, T)) / (T - t);
}

YieldTerms yield_compact(const AdmissibleParams& params, const VolatilitySpec& vol,
                         const MeasureChange& mc, const InitialCurve& curve,
                         const SamplePath& path, double t, double T) {
  if (!(T > t)) throw DomainError("yield_compact: requires t < T");
  const std::size_t k = find_node(path.t, t, "yield_compact");
  const detail::PathScalars scalars = detail::compute_path_scalars(params, vol, mc, path);

  YieldTerms out;
  out.y0 = curve.yield0(t, T);
  const double span = T - t;

  for (std::size_t i = 0; i < k; ++i) {
    const detail::StepScalars& st = scalars.steps[i];
    const double cb_t = vol.big_scale(st.s, t);
    const double cb_T = vol.big_scale(st.s, T);
    out.gamma_term += 2.0 * st.dt * (cb_T * cb_T - cb_t * cb_t) * st.g / span;
    out.brownian -= 2.0 * (cb_T - cb_t) * st.h / span;
    for (std::size_t r = 0; r < st.lam.size(); ++r) {
      if (st.lam[r] == 0.0) continue;
      const double theta = scalars.ray_theta[r];
      const double ct = scalars.ray_a0[r] * cb_t;
      const double cT = scalars.ray_a0[r] * cb_T;
      const double nu_exp = theta / (theta - cT) - theta / (theta - ct);
      out.jump_compensator += st.dt * st.lam[r] * nu_exp / span;
      out.m_compensator += st.dt * st.lam[r] * (nu_exp - (cT - ct) / theta) / span;
      out.compensated_jump += st.dt * st.lam[r] * (cT - ct) / (theta * span);
    }
  }
  for (const detail::JumpScalar& j : scalars.jumps) {
    if (j.time > t + kNodeTolerance) continue;
    const double a0 = scalars.ray_a0[static_cast<std::size_t>(j.ray)];
    const double ct = a0 * vol.big_scale(j.time, t);
    const double cT = a0 * vol.big_scale(j.time, T);
    out.jump_path -= j.gamma * (cT - ct) / span;
    out.m_values.push_back(std::exp(j.gamma * cT) - std::exp(j.gamma * ct) -
                           j.gamma * (cT - ct));
  }
  out.compensated_jump += out.jump_path;
  return out;
}

double DiscountedBondTerms::value() const {
  return std::exp(log_bond - integrated_short_rate);
}

DiscountedBondTerms discounted_bond_terms(const AdmissibleParams& params,
                                          const VolatilitySpec& vol, const MeasureChange& mc,
                                          const InitialCurve& curve, const SamplePath& path,
                                          double t, double T) {
  if (T < t) throw DomainError("discounted_bond_terms: requires t <= T");
  const std::size_t k = find_node(path.t, t, "discounted_bond_terms");

  DiscountedBondTerms out;
  const bool fast = vol.kind() == VolKind::exponential_decay && params.jumps.empty();
  if (fast) {
    // Running-sum realization: f(t,T) = f(0,T)
    //   + (4/beta)(e^{-beta T} A1 - e^{-2 beta T} A2) + 2 e^{-beta T} B
    // with A1 = sum e^{beta s} g dt, A2 = sum e^{2 beta s} g dt,
    // B = sum e^{beta s} h over steps before t.
    const double beta = vol.beta();
    const int d = params.dim;
    const SymMatrix& sigma0 = vol.sigma0().sym();
    const Matrix qtq_m = params.q.transposed() * params.q;
    SymMatrix qtq(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) qtq.set(i, j, 0.5 * (qtq_m(i, j) + qtq_m(j, i)));

    double a1 = 0.0, a2 = 0.0, bsum = 0.0;
    Matrix tmp(d), tmp2(d);
    for (std::size_t i = 0; i < k; ++i) {
      const double s = path.t[i];
      const double dt = path.t[i + 1] - path.t[i];
      const double es = std::exp(beta * s);
      const double r_here = curve.forward(s) +
                            (4.0 / beta) * (a1 / es - a2 / (es * es)) + 2.0 * bsum / es;
      out.integrated_short_rate += r_here * dt;

      const SymMatrix& x = path.states[i].sym();
      const double g = trace_inner(sandwich(sigma0, x), qtq);
      const SymMatrix sq = sqrt_psd_clipped(x);
      const Matrix& dw = path.dw[i];
      for (int a = 0; a < d; ++a)
        for (int b2 = 0; b2 < d; ++b2) {
          double acc = 0.0;
          for (int kk = 0; kk < d; ++kk) acc += sq(a, kk) * dw(kk, b2);
          tmp(a, b2) = acc;
        }
      for (int a = 0; a < d; ++a)
        for (int b2 = 0; b2 < d; ++b2) {
          double acc = 0.0;
          for (int kk = 0; kk < d; ++kk) acc += tmp(a, kk) * params.q(kk, b2);
          tmp2(a, b2) = acc;
        }
      const double h = trace_product(sigma0, tmp2);

      a1 += es * g * dt;
      a2 += es * es * g * dt;
      bsum += es * h;
    }
    const double et = std::exp(-beta * t);
    const double eT = std::exp(-beta * T);
    const double maturity_integral =
        curve.integral(t, T) + (4.0 / beta) * (a1 * (et - eT) / beta -
                                               a2 * (et * et - eT * eT) / (2.0 * beta)) +
        2.0 * bsum * (et - eT) / beta;
    out.log_bond = -maturity_integral;
    return out;
  }

  const detail::PathScalars scalars = detail::compute_path_scalars(params, vol, mc, path);
  for (std::size_t i = 0; i < k; ++i) {
    const double s = path.t[i];
    const double dt = path.t[i + 1] - path.t[i];
    out.integrated_short_rate += detail::forward_value(vol, curve, scalars, i, s, s) * dt;
  }
  out.log_bond = -detail::integrated_forward(vol, curve, scalars, k, t, T);
  return out;
}

}  // namespace affinehjm
