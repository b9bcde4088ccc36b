#pragma once

#include <optional>

#include "dpp/common.hpp"

namespace dpp::numerics {

inline constexpr double kDefaultPivotTol = 1e-12;

// Lower-triangular Cholesky factor with real positive diagonal.
// scale is the max diagonal magnitude of the factored matrix; pivot tests
// are relative to it.
struct CholeskyFactor {
  Mat lower;
  double scale = 1.0;

  int dim() const { return static_cast<int>(lower.rows()); }
  double log_det_factored() const;  // log det of L L* (2 * sum log diag)
  double det_factored() const { return std::exp(log_det_factored()); }
};

// Factorization outcome: either a factor, or the 1-based row index of the
// first pivot at or below pivot_tol * scale. Never both.
struct CholeskyResult {
  std::optional<CholeskyFactor> factor;
  int singular_index = 0;  // 0 when ok

  bool ok() const { return factor.has_value(); }
};

bool is_hermitian(const Mat& m, double tol = 1e-12);

// Averages M with its adjoint so downstream factorizations see exactly
// Hermitian input.
Mat hermitize(const Mat& m);

// Cholesky of a Hermitian matrix. Blocked right-looking; reports the first
// failing pivot instead of producing tiny or negative pivots.
CholeskyResult cholesky_factor(const Mat& m, double pivot_tol = kDefaultPivotTol);

// In-place variant. On success returns 0 and `a` holds the lower factor.
// On a bad pivot returns its 1-based row index; rows before it hold the
// factor of the corresponding leading minor.
int cholesky_in_place(Mat& a, double scale, double pivot_tol);

// Extends a factor of A to a factor of [[A, B], [B*, C]] using the Schur
// complement X = C - V*V with V = L_A^{-1} B. singular_index, if any, is
// global in the assembled matrix.
CholeskyResult cholesky_append_block(const CholeskyFactor& factor, const Mat& b,
                                     const Mat& c,
                                     double pivot_tol = kDefaultPivotTol);

// In-place update of L so that L L* gains +/- v v*. Returns false if a
// downdate would lose positive definiteness.
bool cholesky_rank_one_update(Mat& lower, Vec v, double sign);

// Solves L x = rhs by forward substitution.
Mat solve_lower(const CholeskyFactor& l, const Mat& rhs);
Mat solve_lower(const Mat& lower, const Mat& rhs);

// Solves L* x = rhs (backward substitution with the adjoint).
Mat solve_lower_adjoint(const CholeskyFactor& l, const Mat& rhs);

struct EigenDecomposition {
  RealVec eigenvalues;  // ascending
  Mat eigenvectors;     // column j pairs with eigenvalues[j]
};

// Full Hermitian eigendecomposition (LAPACK zheevd).
EigenDecomposition herm_eigendecomposition(const Mat& m);

struct KernelValidation {
  bool ok = true;
  std::string violation;  // empty when ok
};

// Checks Hermitian symmetry and spectrum in [-tol, 1+tol]. Small matrices
// go through the eigendecomposition; large ones through factorizations of
// K + tol I and (1+tol) I - K.
KernelValidation validate_kernel(const Mat& k, double tol = 1e-9);

// Determinant of a general complex square matrix via LU, accumulated in
// log-magnitude + phase. Accuracy degrades for |log det| > 700.
Cplx determinant(const Mat& m);
double log_abs_determinant(const Mat& m);

}  // namespace dpp::numerics
