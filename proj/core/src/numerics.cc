#include "sconlab/numerics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "sconlab/errors.h"

namespace sconlab {

bool approx_equal(double x, double y, Tolerance tol) {
  return std::abs(x - y) <=
         tol.atol + tol.rtol * std::max(std::abs(x), std::abs(y));
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw InvalidArgument(std::string(what) + ": non-finite entry");
  }
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": expected a non-empty square "
                          "matrix, got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
}

SymmetricMatrix::SymmetricMatrix(const Matrix& m) {
  require_square(m, "SymmetricMatrix");
  require_finite(m, "SymmetricMatrix");
  m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(int dim) {
  return SymmetricMatrix(Matrix::Identity(dim, dim));
}

SymmetricMatrix SymmetricMatrix::zero(int dim) {
  return SymmetricMatrix(Matrix::Zero(dim, dim));
}

double SymmetricMatrix::norm() const {
  const Vector ev = sym_eig(*this).eigenvalues;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

SymmetricEigen sym_eig(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SymmetricMatrix symmetric_part(const Matrix& a) {
  require_square(a, "symmetric_part");
  return SymmetricMatrix(a);
}

double lambda_min(const SymmetricMatrix& m) {
  return sym_eig(m).eigenvalues(0);
}

double lambda_max(const SymmetricMatrix& m) {
  const Vector ev = sym_eig(m).eigenvalues;
  return ev(ev.size() - 1);
}

namespace {

// Higham (2005) Padé coefficients and 1-norm thresholds in double precision.
constexpr std::array<double, 4> kPade3 = {120., 60., 12., 1.};
constexpr std::array<double, 6> kPade5 = {30240., 15120., 3360.,
                                          420.,   30.,    1.};
constexpr std::array<double, 8> kPade7 = {17297280., 8648640., 1995840.,
                                          277200.,   25200.,   1512.,
                                          56.,       1.};
constexpr std::array<double, 10> kPade9 = {
    17643225600., 8821612800., 2075673600., 302702400., 30270240.,
    2162160.,     110880.,     3960.,       90.,        1.};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000., 32382376266240000., 7771770303897600.,
    1187353796428800.,  129060195264000.,   10559470521600.,
    670442572800.,      33522128640.,       1323241920.,
    40840800.,          960960.,            16380.,
    182.,               1.};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Matrix pade_low_order(const Matrix& a, const std::array<double, N>& b) {
  const long n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix odd = b[1] * ident;
  Matrix even = b[0] * ident;
  Matrix power = ident;
  for (std::size_t k = 2; k + 1 < N + 1; k += 2) {
    power = power * a2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  const Matrix u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const long n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
           b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= kTheta3) return pade_low_order(a, kPade3);
  if (norm1 <= kTheta5) return pade_low_order(a, kPade5);
  if (norm1 <= kTheta7) return pade_low_order(a, kPade7);
  if (norm1 <= kTheta9) return pade_low_order(a, kPade9);

  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  }
  Matrix result = pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

namespace {

void check_psd_spectrum(const Vector& eigenvalues, std::string_view what) {
  const double scale = std::max(std::abs(eigenvalues(0)),
                                std::abs(eigenvalues(eigenvalues.size() - 1)));
  if (eigenvalues(0) < -kPsdClampRelative * scale) {
    throw NotPositiveSemidefiniteError(
        std::string(what) + ": matrix is not PSD (min eigenvalue " +
            std::to_string(eigenvalues(0)) + ")",
        eigenvalues(0));
  }
}

}  // namespace

void require_psd(const SymmetricMatrix& s, std::string_view what) {
  check_psd_spectrum(sym_eig(s).eigenvalues, what);
}

SymmetricMatrix psd_sqrt(const SymmetricMatrix& s) {
  const SymmetricEigen eig = sym_eig(s);
  check_psd_spectrum(eig.eigenvalues, "psd_sqrt");
  const Vector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return SymmetricMatrix(eig.eigenvectors * roots.asDiagonal() *
                         eig.eigenvectors.transpose());
}

Matrix solve(const Matrix& a, const Matrix& b) {
  require_square(a, "solve");
  require_finite(a, "solve");
  require_finite(b, "solve");
  if (b.rows() != a.rows()) {
    throw InvalidArgument("solve: right-hand side has " +
                          std::to_string(b.rows()) + " rows, expected " +
                          std::to_string(a.rows()));
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kMaxConditionNumber)) {
    const double cond = rcond > 0.0 ? 1.0 / rcond : INFINITY;
    throw SingularMatrixError(
        "solve: matrix is singular or ill-conditioned (condition estimate " +
            std::to_string(cond) + ")",
        cond);
  }
  return lu.solve(b);
}

}  // namespace sconlab
