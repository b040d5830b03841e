#include "affinehjm/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "affinehjm/errors.hpp"

namespace affinehjm {

namespace {

void check_same_dim(int a, int b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Matrix::Matrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
  if (dim < 1) throw DimensionError("Matrix: dim must be >= 1");
}

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int d = static_cast<int>(rows.size());
  Matrix m(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) {
      throw DimensionError("Matrix::from_rows: input is not square");
    }
    for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  check_same_dim(dim_, o.dim_, "Matrix::operator+=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  check_same_dim(a.dim(), b.dim(), "Matrix::operator*");
  const int d = a.dim();
  Matrix c(d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  c *= s;
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  c += b;
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  c += -1.0 * b;
  return c;
}

Matrix expm(const Matrix& a) {
  const int d = a.dim();
  const double norm = frobenius_norm(a);
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    squarings = std::min(squarings, 60);
  }
  const double scale = std::ldexp(1.0, -squarings);
  Matrix t = scale * a;

  Matrix result = Matrix::identity(d);
  Matrix term = Matrix::identity(d);
  for (int k = 1; k <= 20; ++k) {
    term = (1.0 / k) * (term * t);
    result += term;
    if (frobenius_norm(term) < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

SymMatrix::SymMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
  if (dim < 2) throw DimensionError("SymMatrix: dim must be >= 2");
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows, double tol) {
  const int d = static_cast<int>(rows.size());
  if (d < 2) throw DimensionError("SymMatrix::from_rows: dim must be >= 2");
  SymMatrix m(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) {
      throw DimensionError("SymMatrix::from_rows: input is not square");
    }
  }
  // Copy the upper triangle to both halves; reject asymmetric input.
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (std::abs(rows[i][j] - rows[j][i]) > tol) {
        throw DomainError("SymMatrix::from_rows: entries (" + std::to_string(i) + "," +
                          std::to_string(j) + ") violate symmetry tolerance");
      }
      m.set(i, j, rows[i][j]);
    }
  }
  return m;
}

SymMatrix SymMatrix::plus_transpose(const Matrix& a) {
  SymMatrix m(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = i; j < a.dim(); ++j) m.set(i, j, a(i, j) + a(j, i));
  return m;
}

void SymMatrix::set(int i, int j, double v) {
  a_[static_cast<std::size_t>(i) * dim_ + j] = v;
  a_[static_cast<std::size_t>(j) * dim_ + i] = v;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  check_same_dim(dim_, o.dim_, "SymMatrix::operator+=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  check_same_dim(dim_, o.dim_, "SymMatrix::operator-=");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Matrix SymMatrix::to_matrix() const {
  Matrix m(dim_);
  std::copy(a_.begin(), a_.end(), m.raw());
  return m;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix c = a;
  c += b;
  return c;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix c = a;
  c -= b;
  return c;
}

SymMatrix operator*(double s, const SymMatrix& a) {
  SymMatrix c = a;
  c *= s;
  return c;
}

double trace(const SymMatrix& a) {
  double t = 0.0;
  for (int i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

double trace(const Matrix& a) {
  double t = 0.0;
  for (int i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

double trace_inner(const SymMatrix& a, const SymMatrix& b) {
  check_same_dim(a.dim(), b.dim(), "trace_inner");
  const double* pa = a.raw();
  const double* pb = b.raw();
  const std::size_t n = a.values().size();
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += pa[k] * pb[k];
  return s;
}

double trace_product(const SymMatrix& a, const Matrix& b) {
  check_same_dim(a.dim(), b.dim(), "trace_product");
  const int d = a.dim();
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += a(i, j) * b(j, i);
  return s;
}

double frobenius_norm(const SymMatrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double quad_form(const SymMatrix& a, const std::vector<double>& v) {
  check_same_dim(a.dim(), static_cast<int>(v.size()), "quad_form");
  const int d = a.dim();
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) row += a(i, j) * v[j];
    s += v[i] * row;
  }
  return s;
}

SymMatrix sandwich(const SymMatrix& s, const SymMatrix& x) {
  check_same_dim(s.dim(), x.dim(), "sandwich");
  const int d = s.dim();
  Matrix sx(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += s(i, k) * x(k, j);
      sx(i, j) = acc;
    }
  SymMatrix out(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += sx(i, k) * s(k, j);
      out.set(i, j, acc);
    }
  return out;
}

SymMatrix congruence(const Matrix& q, const SymMatrix& x) {
  check_same_dim(q.dim(), x.dim(), "congruence");
  const int d = q.dim();
  Matrix qx(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += q(i, k) * x(k, j);
      qx(i, j) = acc;
    }
  SymMatrix out(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += qx(i, k) * q(j, k);
      out.set(i, j, acc);
    }
  return out;
}

void jacobi_eigen(const SymMatrix& a, EigenDecomposition& out) {
  const int d = a.dim();
  if (d < 2) throw DimensionError("jacobi_eigen: empty matrix");

  thread_local std::vector<double> work;
  work.assign(a.values().begin(), a.values().end());
  auto at = [&](int i, int j) -> double& { return work[static_cast<std::size_t>(i) * d + j]; };

  if (out.eigenvectors.dim() != d) out.eigenvectors = Matrix(d);
  Matrix& v = out.eigenvectors;
  std::fill(v.raw(), v.raw() + static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) v(i, i) = 1.0;

  const double norm = frobenius_norm(a);
  const double target = 1e-12 * norm;

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) s += 2.0 * at(i, j) * at(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 64;
  int sweep = 0;
  while (norm > 0.0 && off_norm() > target) {
    if (++sweep > kMaxSweeps) {
      throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(kMaxSweeps) +
                           " sweeps");
    }
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = at(p, p);
        const double aqq = at(q, q);
        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (int r = 0; r < d; ++r) {
          if (r != p && r != q) {
            const double arp = at(r, p);
            const double arq = at(r, q);
            at(r, p) = arp - s * (arq + tau * arp);
            at(p, r) = at(r, p);
            at(r, q) = arq + s * (arp - tau * arq);
            at(q, r) = at(r, q);
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  out.eigenvalues.resize(d);
  for (int i = 0; i < d; ++i) out.eigenvalues[i] = at(i, i);

  // Sort eigenvalues ascending, permuting eigenvector columns to match.
  thread_local std::vector<int> order;
  order.resize(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return out.eigenvalues[i] < out.eigenvalues[j]; });
  std::vector<double> sorted_w(d);
  Matrix sorted_v(d);
  for (int c = 0; c < d; ++c) {
    sorted_w[c] = out.eigenvalues[order[c]];
    for (int r = 0; r < d; ++r) sorted_v(r, c) = v(r, order[c]);
  }
  out.eigenvalues = std::move(sorted_w);
  out.eigenvectors = std::move(sorted_v);
}

EigenDecomposition jacobi_eigen(const SymMatrix& a) {
  EigenDecomposition out;
  jacobi_eigen(a, out);
  return out;
}

double min_eigenvalue(const SymMatrix& a) {
  thread_local EigenDecomposition eig;
  jacobi_eigen(a, eig);
  return eig.eigenvalues.front();
}

bool is_psd(const SymMatrix& a, double tol) { return min_eigenvalue(a) >= -tol; }

bool psd_order_leq(const SymMatrix& x, const SymMatrix& y) {
  check_same_dim(x.dim(), y.dim(), "psd_order_leq");
  return min_eigenvalue(y - x) >= -kPsdTolerance;
}

namespace {

// V diag(f(w)) V^T assembled symmetric by construction.
SymMatrix assemble_spectral(const EigenDecomposition& eig, const std::vector<double>& fw) {
  const int d = eig.eigenvectors.dim();
  SymMatrix out(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += eig.eigenvectors(i, k) * fw[k] * eig.eigenvectors(j, k);
      out.set(i, j, acc);
    }
  }
  return out;
}

}  // namespace

PsdMatrix project_psd(const SymMatrix& x) {
  thread_local EigenDecomposition eig;
  jacobi_eigen(x, eig);
  if (eig.eigenvalues.front() >= 0.0) {
    return PsdMatrix(x, eig.eigenvalues.front());
  }
  std::vector<double> clipped(eig.eigenvalues.size());
  for (std::size_t k = 0; k < clipped.size(); ++k) clipped[k] = std::max(0.0, eig.eigenvalues[k]);
  return PsdMatrix(assemble_spectral(eig, clipped), 0.0);
}

PsdMatrix PsdMatrix::certify(SymMatrix m) {
  const double lo = min_eigenvalue(m);
  if (lo < -kPsdTolerance) {
    throw DomainError("PsdMatrix::certify: smallest eigenvalue " + std::to_string(lo) +
                      " below cone tolerance");
  }
  return PsdMatrix(std::move(m), lo);
}

PsdMatrix PsdMatrix::zero(int dim) { return PsdMatrix(SymMatrix(dim), 0.0); }

PsdMatrix PsdMatrix::identity(int dim) { return PsdMatrix(SymMatrix::identity(dim), 1.0); }

SymMatrix sqrt_psd_clipped(const SymMatrix& x) {
  thread_local EigenDecomposition eig;
  jacobi_eigen(x, eig);
  std::vector<double> roots(eig.eigenvalues.size());
  for (std::size_t k = 0; k < roots.size(); ++k) {
    roots[k] = eig.eigenvalues[k] > 0.0 ? std::sqrt(eig.eigenvalues[k]) : 0.0;
  }
  return assemble_spectral(eig, roots);
}

PsdMatrix sqrt_psd(const PsdMatrix& x) {
  if (x.min_eig() < -kPsdTolerance) {
    throw DomainError("sqrt_psd: input outside the cone");
  }
  return project_psd(sqrt_psd_clipped(x.sym()));
}

}  // namespace affinehjm
