#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace sconlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Hybrid tolerance |x - y| <= atol + rtol * max(|x|, |y|).
struct Tolerance {
  double atol = 1e-12;
  double rtol = 1e-8;
};

bool approx_equal(double x, double y, Tolerance tol = {});

/// Throws InvalidArgument naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);
void require_finite(const Vector& v, std::string_view what);
void require_square(const Matrix& m, std::string_view what);

/// A dense real symmetric matrix. The input is replaced by (m + m^T) / 2 on
/// construction so entry (i, j) and (j, i) are bitwise equal.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Matrix& m);

  static SymmetricMatrix identity(int dim);
  static SymmetricMatrix zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  /// Largest absolute eigenvalue (the spectral norm).
  double norm() const;

 private:
  Matrix m_;
};

struct SymmetricEigen {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns, orthonormal
};

SymmetricEigen sym_eig(const SymmetricMatrix& m);

/// Symmetric part (a + a^T) / 2 of a square matrix.
SymmetricMatrix symmetric_part(const Matrix& a);

double lambda_min(const SymmetricMatrix& m);
double lambda_max(const SymmetricMatrix& m);

/// Matrix exponential by scaling and squaring with Padé approximants of
/// degree 3..13, selected from the 1-norm of `a`.
Matrix expm(const Matrix& a);

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// [-1e-10 * ||s||, 0) are clamped to zero; anything lower is rejected.
SymmetricMatrix psd_sqrt(const SymmetricMatrix& s);

/// Throws NotPositiveSemidefiniteError if lambda_min(s) < -1e-10 * ||s||.
void require_psd(const SymmetricMatrix& s, std::string_view what);

/// Solves a * x = b. Throws SingularMatrixError when the reciprocal condition
/// estimate of `a` puts its condition number above 1e12.
Matrix solve(const Matrix& a, const Matrix& b);

inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr double kPsdClampRelative = 1e-10;

}  // namespace sconlab
