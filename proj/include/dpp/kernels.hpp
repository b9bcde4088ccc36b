#pragma once

#include <optional>
#include <string>

#include "dpp/common.hpp"
#include "dpp/numerics.hpp"

namespace dpp::kernels {

// DPP kernel K: Hermitian with spectrum in [0, 1]. `spectrum`, when set,
// holds eigenvalues known by construction (diagonal models), so later
// calibration can skip the eigensolver.
struct KernelMatrix {
  Mat matrix;
  std::string provenance;  // e.g. "random n=16 seed=1", "file path=k.txt"
  std::optional<RealVec> spectrum;

  int n() const { return static_cast<int>(matrix.rows()); }
};

// L-ensemble: Hermitian PSD, K = L (I + L)^{-1}.
struct LEnsemble {
  Mat matrix;
  std::string provenance;
  std::optional<RealVec> spectrum;

  int n() const { return static_cast<int>(matrix.rows()); }
};

// K = L (I + L)^{-1}, computed by factoring I + L (no eigendecomposition).
KernelMatrix k_from_l(const LEnsemble& l);

// L = K (I - K)^{-1}. Throws DomainError when I - K is singular (projection
// kernels have no L-ensemble).
LEnsemble l_from_k(const KernelMatrix& k);

// Model (a): K = Q* D Q with D ~ U(0,1) diagonal and Q unitary from the QR
// of a seeded Gaussian matrix.
KernelMatrix build_random(int n, uint64_t seed);

// Model (b): discrete Ginibre-like L-ensemble evaluated on a centered
// integer grid of side ceil(sqrt(n)), truncated to n points row-major.
LEnsemble build_ginibre(int n, uint64_t seed = 0);

// Model (c): Gaussian patch kernel L(i,j) = exp(-|Pi - Pj|^2 / s^2).
LEnsemble build_patch_gaussian(const std::vector<RealVec>& patches, double s);

// Model (d): projection kernel with exactly `rank` unit eigenvalues.
KernelMatrix build_projection(int n, int rank, uint64_t seed);

// E|Y| = tr(K).
double expected_cardinality(const KernelMatrix& k);

struct CalibrationResult {
  double alpha = 1.0;
  double achieved_expected_cardinality = 0.0;
  int iterations = 0;
};

// Bisection on alpha so that sum_i alpha*mu_i / (1 + alpha*mu_i) hits the
// target, where mu are the eigenvalues of L.
CalibrationResult calibrate_alpha(const RealVec& mu, double target);
CalibrationResult calibrate_alpha(const LEnsemble& l, double target);

// Eigendecomposition-free variant: evaluates tr(alpha L (I + alpha L)^{-1})
// with a fresh factorization per bisection step. Slower; exists for
// projection-free exactness checks.
CalibrationResult calibrate_alpha_trace(const LEnsemble& l, double target);

// Scales L by alpha and converts; the standard route to a kernel with a
// prescribed expected cardinality.
KernelMatrix calibrated_kernel(const LEnsemble& l, double target,
                               CalibrationResult* result = nullptr);

KernelMatrix kernel_from_file(const std::string& path);
void kernel_to_file(const KernelMatrix& k, const std::string& path);

}  // namespace dpp::kernels
