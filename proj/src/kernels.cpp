#include "dpp/kernels.hpp"

#include <cmath>
#include <functional>

#include "dpp/matrix_io.hpp"

namespace dpp::kernels {

using numerics::cholesky_factor;
using numerics::hermitize;

KernelMatrix k_from_l(const LEnsemble& l) {
  const int n = l.n();
  const Mat id = Mat::Identity(n, n);
  auto chol = cholesky_factor(hermitize(id + l.matrix));
  if (!chol.ok())
    throw NumericalError("k_from_l: I + L is not positive definite");
  // K = (I+L)^{-1} L via two triangular solves, then symmetrized.
  Mat x = numerics::solve_lower(*chol.factor, l.matrix);
  x = numerics::solve_lower_adjoint(*chol.factor, x);
  KernelMatrix k{hermitize(x), "k_from_l(" + l.provenance + ")", std::nullopt};
  if (l.spectrum) {
    RealVec lam = *l.spectrum;
    for (int i = 0; i < lam.size(); ++i) lam(i) = lam(i) / (1.0 + lam(i));
    k.spectrum = std::move(lam);
  }
  return k;
}

LEnsemble l_from_k(const KernelMatrix& k) {
  const int n = k.n();
  const Mat id = Mat::Identity(n, n);
  auto chol = cholesky_factor(hermitize(id - k.matrix));
  if (!chol.ok())
    throw DomainError(
        "l_from_k: I - K is singular at index " +
        std::to_string(chol.singular_index) + "; no L-ensemble exists");
  Mat x = numerics::solve_lower(*chol.factor, k.matrix);
  x = numerics::solve_lower_adjoint(*chol.factor, x);
  LEnsemble l{hermitize(x), "l_from_k(" + k.provenance + ")", std::nullopt};
  if (k.spectrum) {
    RealVec mu = *k.spectrum;
    for (int i = 0; i < mu.size(); ++i) mu(i) = mu(i) / (1.0 - mu(i));
    l.spectrum = std::move(mu);
  }
  return l;
}

namespace {

// Real orthogonal matrix from the QR of a seeded Gaussian matrix.
Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

KernelMatrix assemble_qdq(const Eigen::MatrixXd& q, const RealVec& d,
                          std::string provenance) {
  Eigen::MatrixXd k = q.transpose() * d.asDiagonal() * q;
  k = 0.5 * (k + k.transpose());
  RealVec sorted = d;
  std::sort(sorted.begin(), sorted.end());
  return KernelMatrix{k.cast<Cplx>(), std::move(provenance), sorted};
}

}  // namespace

KernelMatrix build_random(int n, uint64_t seed) {
  if (n < 1) throw ContractError("build_random: n must be >= 1");
  Rng rng(seed);
  RealVec d(n);
  for (int i = 0; i < n; ++i) {
    do {
      d(i) = rng.uniform();
    } while (d(i) == 0.0);
  }
  const auto q = random_orthogonal(n, rng);
  return assemble_qdq(q, d,
                      "random n=" + std::to_string(n) +
                          " seed=" + std::to_string(seed));
}

KernelMatrix build_projection(int n, int rank, uint64_t seed) {
  if (n < 1) throw ContractError("build_projection: n must be >= 1");
  if (rank < 1 || rank > n)
    throw ContractError("build_projection: rank must be in [1, n]");
  Rng rng(seed);
  RealVec d = RealVec::Zero(n);
  d.head(rank).setOnes();
  const auto q = random_orthogonal(n, rng);
  return assemble_qdq(q, d,
                      "projection n=" + std::to_string(n) +
                          " rank=" + std::to_string(rank) +
                          " seed=" + std::to_string(seed));
}

LEnsemble build_ginibre(int n, uint64_t /*seed*/) {
  if (n < 1) throw ContractError("build_ginibre: n must be >= 1");
  // Centered integer grid of side ceil(sqrt(n)), truncated row-major.
  const int side = static_cast<int>(std::ceil(std::sqrt(double(n))));
  const double off = 0.5 * (side - 1);
  std::vector<Cplx> pts;
  pts.reserve(n);
  for (int a = 0; a < side && static_cast<int>(pts.size()) < n; ++a)
    for (int b = 0; b < side && static_cast<int>(pts.size()) < n; ++b)
      pts.emplace_back(a - off, b - off);

  Mat l(n, n);
  const double inv_pi = 1.0 / M_PI;
  for (int i = 0; i < n; ++i) {
    l(i, i) = inv_pi;
    for (int j = 0; j < i; ++j) {
      // exponent: -|xi - xj|^2 / 2 + i Im(xi conj(xj)); stable for distant
      // grid points since only the separation enters the magnitude.
      const Cplx d = pts[i] - pts[j];
      const double mag = inv_pi * std::exp(-0.5 * std::norm(d));
      const double phase = std::imag(pts[i] * std::conj(pts[j]));
      l(i, j) = mag * Cplx(std::cos(phase), std::sin(phase));
      l(j, i) = std::conj(l(i, j));
    }
  }
  return LEnsemble{std::move(l), "ginibre n=" + std::to_string(n), std::nullopt};
}

LEnsemble build_patch_gaussian(const std::vector<RealVec>& patches, double s) {
  if (s <= 0.0) throw ContractError("build_patch_gaussian: bandwidth must be > 0");
  const int n = static_cast<int>(patches.size());
  if (n < 1) throw ContractError("build_patch_gaussian: no patches");
  for (const auto& p : patches)
    if (p.size() != patches[0].size())
      throw ContractError("build_patch_gaussian: inconsistent patch lengths");
  Mat l(n, n);
  const double inv_s2 = 1.0 / (s * s);
  for (int i = 0; i < n; ++i) {
    l(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      const double d2 = (patches[i] - patches[j]).squaredNorm();
      l(i, j) = std::exp(-d2 * inv_s2);
      l(j, i) = l(i, j);
    }
  }
  return LEnsemble{std::move(l),
                   "patch n=" + std::to_string(n) + " s=" + std::to_string(s),
                   std::nullopt};
}

double expected_cardinality(const KernelMatrix& k) {
  const Cplx tr = k.matrix.trace();
  if (std::abs(tr.imag()) > 1e-10)
    throw NumericalError("expected_cardinality: trace has imaginary residue");
  return tr.real();
}

namespace {

double cardinality_at(const RealVec& mu, double alpha) {
  double acc = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    const double am = alpha * mu(i);
    acc += am / (1.0 + am);
  }
  return acc;
}

CalibrationResult bisect(const std::function<double(double)>& f, double target,
                         double rank_limit) {
  if (target <= 0.0 || target >= rank_limit)
    throw DomainError("calibrate_alpha: target cardinality " +
                      std::to_string(target) + " unreachable (rank " +
                      std::to_string(rank_limit) + ")");
  const double tol = 1e-8 * std::max(1.0, target);
  double lo = 1.0, hi = 1.0;
  int iters = 0;
  while (f(hi) < target && iters < 200) {
    hi *= 2.0;
    ++iters;
  }
  while (f(lo) > target && iters < 200) {
    lo *= 0.5;
    ++iters;
  }
  double mid = 0.5 * (lo + hi), val = f(mid);
  while (std::abs(val - target) > tol && iters < 200) {
    if (val < target)
      lo = mid;
    else
      hi = mid;
    mid = 0.5 * (lo + hi);
    val = f(mid);
    ++iters;
  }
  if (std::abs(val - target) > tol)
    throw NumericalError("calibrate_alpha: bisection did not converge");
  return CalibrationResult{mid, val, iters};
}

}  // namespace

CalibrationResult calibrate_alpha(const RealVec& mu, double target) {
  int rank = 0;
  for (int i = 0; i < mu.size(); ++i)
    if (mu(i) > 1e-12) ++rank;
  return bisect([&](double a) { return cardinality_at(mu, a); }, target,
                double(rank));
}

CalibrationResult calibrate_alpha(const LEnsemble& l, double target) {
  if (l.spectrum) return calibrate_alpha(*l.spectrum, target);
  return calibrate_alpha(numerics::herm_eigendecomposition(l.matrix).eigenvalues,
                         target);
}

CalibrationResult calibrate_alpha_trace(const LEnsemble& l, double target) {
  const int n = l.n();
  const Mat id = Mat::Identity(n, n);
  auto f = [&](double a) {
    auto chol = cholesky_factor(hermitize(id + a * l.matrix));
    if (!chol.ok())
      throw NumericalError("calibrate_alpha_trace: I + aL not PD");
    // tr(aL (I + aL)^{-1}) = n - tr((I + aL)^{-1})
    Mat inv_cols = numerics::solve_lower(*chol.factor, id);
    return double(n) - inv_cols.squaredNorm();
  };
  return bisect(f, target, double(n));
}

KernelMatrix calibrated_kernel(const LEnsemble& l, double target,
                               CalibrationResult* result) {
  const auto cal = calibrate_alpha(l, target);
  if (result) *result = cal;
  LEnsemble scaled{cal.alpha * l.matrix,
                   l.provenance + " alpha=" + std::to_string(cal.alpha),
                   std::nullopt};
  if (l.spectrum) scaled.spectrum = cal.alpha * (*l.spectrum);
  return k_from_l(scaled);
}

KernelMatrix kernel_from_file(const std::string& path) {
  Mat m = io::load_matrix(path);
  if (m.rows() != m.cols())
    throw ContractError("kernel_from_file: matrix is not square");
  return KernelMatrix{std::move(m), "file path=" + path, std::nullopt};
}

void kernel_to_file(const KernelMatrix& k, const std::string& path) {
  io::save_matrix(path, k.matrix, "dpp kernel: " + k.provenance);
}

}  // namespace dpp::kernels
