#pragma once

#include <cstddef>
#include <vector>

namespace affinehjm {

/// Absolute eigenvalue slack for membership in the positive semidefinite cone.
inline constexpr double kPsdTolerance = 1e-10;
/// Relative Frobenius tolerance for the matrix square root round trip.
inline constexpr double kSqrtTolerance = 1e-10;
/// Absolute entry tolerance when validating symmetry of matrix literals.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Dense square real matrix, row-major.  Used for the non-symmetric
/// coefficients (M, Q, gamma) and for Brownian increment blocks.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int dim);
  static Matrix identity(int dim);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return dim_; }
  bool empty() const { return dim_ == 0; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

  Matrix transposed() const;
  Matrix& operator+=(const Matrix& o);
  Matrix& operator*=(double s);

  const std::vector<double>& values() const { return a_; }
  double* raw() { return a_.data(); }
  const double* raw() const { return a_.data(); }

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// Matrix exponential by scaling and squaring; dimensions are tiny here.
Matrix expm(const Matrix& a);

/// Dense symmetric d x d real matrix, d >= 2.  Symmetry holds by
/// construction: set() writes both (i,j) and (j,i), and from_rows validates
/// its input against kSymmetryTolerance.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim);                       // zero matrix
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const std::vector<double>& d);
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows,
                             double tol = kSymmetryTolerance);
  /// a + a^T (exactly symmetric regardless of a).
  static SymMatrix plus_transpose(const Matrix& a);

  int dim() const { return dim_; }
  bool empty() const { return dim_ == 0; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  void set(int i, int j, double v);

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  Matrix to_matrix() const;
  const std::vector<double>& values() const { return a_; }
  double* raw() { return a_.data(); }
  const double* raw() const { return a_.data(); }

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

double trace(const SymMatrix& a);
double trace(const Matrix& a);
/// Scalar product Tr[a b] of two symmetric matrices.
double trace_inner(const SymMatrix& a, const SymMatrix& b);
/// Tr[a b] with a symmetric and b general.
double trace_product(const SymMatrix& a, const Matrix& b);
double frobenius_norm(const SymMatrix& a);
double frobenius_norm(const Matrix& a);
/// v^T a v.
double quad_form(const SymMatrix& a, const std::vector<double>& v);
/// s x s for symmetric s, x (e.g. Gamma = Sigma X Sigma).
SymMatrix sandwich(const SymMatrix& s, const SymMatrix& x);
/// q x q^T, symmetric for symmetric x.
SymMatrix congruence(const Matrix& q, const SymMatrix& x);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // orthonormal columns, a = V diag(w) V^T
};

/// Cyclic Jacobi rotations; terminates when the off-diagonal Frobenius norm
/// drops below 1e-12 * ||a||_F.  Unconditionally stable for the small
/// symmetric matrices used here (d <= 10).
EigenDecomposition jacobi_eigen(const SymMatrix& a);
void jacobi_eigen(const SymMatrix& a, EigenDecomposition& out);

double min_eigenvalue(const SymMatrix& a);
bool is_psd(const SymMatrix& a, double tol = kPsdTolerance);
/// Loewner order: x <= y iff y - x is in the cone (within kPsdTolerance).
bool psd_order_leq(const SymMatrix& x, const SymMatrix& y);

/// Certified member of the cone S_d^+.  certify() eigen-checks its input and
/// records the smallest eigenvalue as the certificate.
class PsdMatrix {
 public:
  PsdMatrix() = default;
  static PsdMatrix certify(SymMatrix m);
  static PsdMatrix zero(int dim);
  static PsdMatrix identity(int dim);

  const SymMatrix& sym() const { return m_; }
  double min_eig() const { return min_eig_; }
  int dim() const { return m_.dim(); }
  bool empty() const { return m_.empty(); }

 private:
  PsdMatrix(SymMatrix m, double min_eig) : m_(std::move(m)), min_eig_(min_eig) {}
  friend PsdMatrix project_psd(const SymMatrix& x);
  friend class JacobiWorkspace;

  SymMatrix m_;
  double min_eig_ = 0.0;
};

/// Frobenius-nearest cone member: eigenvalues clipped at zero.  Idempotent,
/// no-op on inputs already in the cone.
PsdMatrix project_psd(const SymMatrix& x);

/// Spectral square root; the result s satisfies ||s s - x||_F within
/// kSqrtTolerance * (1 + ||x||_F).
PsdMatrix sqrt_psd(const PsdMatrix& x);
/// Square root with eigenvalues clipped at zero; tolerates inputs that are in
/// the cone only up to roundoff.  Used on projected states in steppers.
SymMatrix sqrt_psd_clipped(const SymMatrix& x);

}  // namespace affinehjm
