#include "dpp/numerics.hpp"

#include <lapacke.h>

#include <cmath>

namespace dpp::numerics {

double CholeskyFactor::log_det_factored() const {
  double acc = 0.0;
  for (int i = 0; i < dim(); ++i) acc += std::log(lower(i, i).real());
  return 2.0 * acc;
}

bool is_hermitian(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.rows() == 0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Mat hermitize(const Mat& m) {
  Mat h = 0.5 * (m + m.adjoint());
  for (int i = 0; i < h.rows(); ++i) h(i, i) = Cplx(h(i, i).real(), 0.0);
  return h;
}

namespace {

// Unblocked factorization of the n x n trailing problem stored in `a`
// (lower part referenced). Writes the factor in place. Returns the 1-based
// local index of the first bad pivot, or 0.
int cholesky_unblocked(Eigen::Ref<Mat> a, double scale, double pivot_tol) {
  const int n = static_cast<int>(a.rows());
  for (int j = 0; j < n; ++j) {
    double pivot = a(j, j).real();
    if (j > 0) pivot -= a.row(j).head(j).squaredNorm();
    if (pivot <= pivot_tol * scale) return j + 1;
    const double d = std::sqrt(pivot);
    a(j, j) = d;
    if (j + 1 < n) {
      auto col = a.col(j).tail(n - j - 1);
      if (j > 0)
        col.noalias() -= a.bottomLeftCorner(n - j - 1, j) * a.row(j).head(j).adjoint();
      col /= d;
    }
  }
  // zero the strict upper part so the factor is clean
  for (int j = 1; j < n; ++j) a.col(j).head(j).setZero();
  return 0;
}

constexpr int kBlock = 96;

// First 1-based index among diag(0..upto-1) whose pivot falls at or below the
// tolerance, or 0 if none does.
int first_small_pivot(const Mat& a, int upto, double scale, double pivot_tol) {
  for (int j = 0; j < upto; ++j) {
    const double d = a(j, j).real();
    if (d * d <= pivot_tol * scale) return j + 1;
  }
  return 0;
}

}  // namespace

// Cholesky with pivot reporting. `a` holds the matrix on entry and the factor
// on exit (valid only when the return value is 0). Large problems go through
// LAPACK; potrf only rejects nonpositive pivots, so its output is rescanned
// against the tolerance to keep the semantics of the unblocked routine.
int cholesky_in_place(Mat& a, double scale, double pivot_tol) {
  const int n = static_cast<int>(a.rows());
  if (n <= kBlock) {
    const int bad = cholesky_unblocked(a.block(0, 0, n, n), scale, pivot_tol);
    if (bad != 0) return bad;
    a = a.triangularView<Eigen::Lower>();
    return 0;
  }
  int info;
  if (a.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::MatrixXd ar = a.real();
    info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, ar.data(), n);
    if (info >= 0) a = ar.cast<Cplx>();
  } else {
    info = LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n,
                          reinterpret_cast<lapack_complex_double*>(a.data()), n);
  }
  if (info < 0)
    throw NumericalError("cholesky_in_place: potrf failed, info=" +
                         std::to_string(info));
  if (info > 0) {
    const int bad = first_small_pivot(a, info - 1, scale, pivot_tol);
    return bad != 0 ? bad : info;
  }
  const int bad = first_small_pivot(a, n, scale, pivot_tol);
  if (bad != 0) return bad;
  a = a.triangularView<Eigen::Lower>();
  return 0;
}

CholeskyResult cholesky_factor(const Mat& m, double pivot_tol) {
  if (!is_hermitian(m, 1e-10))
    throw ContractError("cholesky_factor: matrix is not Hermitian");
  const double scale =
      m.rows() == 0 ? 1.0 : std::max(m.diagonal().real().maxCoeff(), 0.0);
  Mat a = m;
  CholeskyResult res;
  const int bad = cholesky_in_place(a, scale == 0.0 ? 1.0 : scale, pivot_tol);
  if (bad != 0) {
    res.singular_index = bad;
    return res;
  }
  res.factor = CholeskyFactor{std::move(a), scale == 0.0 ? 1.0 : scale};
  return res;
}

CholeskyResult cholesky_append_block(const CholeskyFactor& factor, const Mat& b,
                                     const Mat& c, double pivot_tol) {
  const int na = factor.dim();
  const int nc = static_cast<int>(c.rows());
  if (b.rows() != na || b.cols() != nc || c.cols() != nc)
    throw ContractError("cholesky_append_block: nonconforming blocks");

  Mat assembled = Mat::Zero(na + nc, na + nc);
  assembled.topLeftCorner(na, na) = factor.lower;

  Mat v = na > 0 ? solve_lower(factor, b) : Mat(0, nc);
  Mat schur = c;
  if (na > 0) schur.noalias() -= v.adjoint() * v;
  schur = hermitize(schur);

  const double scale =
      std::max(factor.scale, nc > 0 ? c.diagonal().real().maxCoeff() : 0.0);
  CholeskyResult res;
  const int bad = cholesky_in_place(schur, scale == 0.0 ? 1.0 : scale, pivot_tol);
  if (bad != 0) {
    res.singular_index = na + bad;
    return res;
  }
  assembled.bottomLeftCorner(nc, na) = v.adjoint();
  assembled.bottomRightCorner(nc, nc) = schur;
  res.factor = CholeskyFactor{std::move(assembled), scale == 0.0 ? 1.0 : scale};
  return res;
}

bool cholesky_rank_one_update(Mat& lower, Vec v, double sign) {
  const int n = static_cast<int>(lower.rows());
  // Classic hyperbolic/Givens sweep, complex form.
  for (int j = 0; j < n; ++j) {
    const double ljj = lower(j, j).real();
    const double vj2 = std::norm(v(j));
    const double d2 = ljj * ljj + sign * vj2;
    if (d2 <= 0.0) return false;
    const double d = std::sqrt(d2);
    const double c = d / ljj;
    const Cplx s = v(j) / ljj;
    lower(j, j) = d;
    if (j + 1 < n) {
      auto col = lower.col(j).tail(n - j - 1);
      auto vt = v.tail(n - j - 1);
      col = (col + sign * std::conj(s) * vt) / c;
      vt = c * vt - s * col;
    }
  }
  return true;
}

Mat solve_lower(const Mat& lower, const Mat& rhs) {
  if (lower.rows() != rhs.rows())
    throw ContractError("solve_lower: dimension mismatch");
  return lower.triangularView<Eigen::Lower>().solve(rhs);
}

Mat solve_lower(const CholeskyFactor& l, const Mat& rhs) {
  return solve_lower(l.lower, rhs);
}

Mat solve_lower_adjoint(const CholeskyFactor& l, const Mat& rhs) {
  if (l.lower.rows() != rhs.rows())
    throw ContractError("solve_lower_adjoint: dimension mismatch");
  return l.lower.triangularView<Eigen::Lower>().adjoint().solve(rhs);
}

EigenDecomposition herm_eigendecomposition(const Mat& m) {
  if (!is_hermitian(m, 1e-10))
    throw ContractError("herm_eigendecomposition: matrix is not Hermitian");
  const int n = static_cast<int>(m.rows());
  RealVec w(n);
  if (n > 0 && m.imag().cwiseAbs().maxCoeff() == 0.0) {
    // Exactly real input: the real symmetric solver does the same job in a
    // quarter of the arithmetic.
    Eigen::MatrixXd a = m.real();
    const int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
    if (info != 0)
      throw NumericalError("herm_eigendecomposition: dsyevd failed, info=" +
                           std::to_string(info));
    return EigenDecomposition{std::move(w), a.cast<Cplx>()};
  }
  Mat a = m;  // column-major, overwritten with eigenvectors
  const int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0)
    throw NumericalError("herm_eigendecomposition: zheevd failed, info=" +
                         std::to_string(info));
  return EigenDecomposition{std::move(w), std::move(a)};
}

KernelValidation validate_kernel(const Mat& k, double tol) {
  KernelValidation v;
  if (k.rows() != k.cols()) {
    v.ok = false;
    v.violation = "matrix is not square";
    return v;
  }
  const double asym = (k - k.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    v.ok = false;
    v.violation = "not Hermitian (max asymmetry " + std::to_string(asym) + ")";
    return v;
  }
  const int n = static_cast<int>(k.rows());
  if (n <= 512) {
    const auto eig = herm_eigendecomposition(k);
    const double lo = eig.eigenvalues.minCoeff();
    const double hi = eig.eigenvalues.maxCoeff();
    if (lo < -tol) {
      v.ok = false;
      v.violation = "eigenvalue " + std::to_string(lo) + " < 0";
    } else if (hi > 1.0 + tol) {
      v.ok = false;
      v.violation = "eigenvalue " + std::to_string(hi) + " > 1";
    }
    return v;
  }
  // Large case: K + tol I and (1+tol) I - K must both factor.
  const Mat id = Mat::Identity(n, n);
  if (!cholesky_factor(hermitize(k + tol * id)).ok()) {
    v.ok = false;
    v.violation = "K + tol*I is not positive definite (eigenvalue < 0)";
    return v;
  }
  if (!cholesky_factor(hermitize((1.0 + tol) * id - k)).ok()) {
    v.ok = false;
    v.violation = "(1+tol)*I - K is not positive definite (eigenvalue > 1)";
  }
  return v;
}

Cplx determinant(const Mat& m) {
  if (m.rows() != m.cols()) throw ContractError("determinant: not square");
  if (m.rows() == 0) return 1.0;
  Eigen::PartialPivLU<Mat> lu(m);
  double log_mag = 0.0;
  Cplx phase = lu.permutationP().determinant() < 0 ? -1.0 : 1.0;
  for (int i = 0; i < m.rows(); ++i) {
    const Cplx u = lu.matrixLU()(i, i);
    const double a = std::abs(u);
    if (a == 0.0) return 0.0;
    log_mag += std::log(a);
    phase *= u / a;
  }
  return phase * std::exp(log_mag);
}

double log_abs_determinant(const Mat& m) {
  if (m.rows() != m.cols()) throw ContractError("determinant: not square");
  if (m.rows() == 0) return 0.0;
  Eigen::PartialPivLU<Mat> lu(m);
  double log_mag = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    log_mag += std::log(std::abs(lu.matrixLU()(i, i)));
  return log_mag;
}

}  // namespace dpp::numerics
