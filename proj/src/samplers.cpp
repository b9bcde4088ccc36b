#include "dpp/samplers.hpp"

#include <limits>
#include <numeric>
#include <unordered_set>

namespace dpp::samplers {

using numerics::cholesky_in_place;

namespace {

Mat submatrix(const Mat& m, const IndexSet& rows, const IndexSet& cols) {
  Mat out(rows.size(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t i = 0; i < rows.size(); ++i) out(i, j) = m(rows[i], cols[j]);
  return out;
}

Vec subcolumn(const Mat& m, const IndexSet& rows, int col) {
  Vec out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out(i) = m(rows[i], col);
  return out;
}

void check_indices(const KernelMatrix& k, const IndexSet& a, const char* what) {
  std::unordered_set<int> seen;
  for (int i : a) {
    if (i < 0 || i >= k.n())
      throw ContractError(std::string(what) + ": index out of range");
    if (!seen.insert(i).second)
      throw ContractError(std::string(what) + ": duplicate index " +
                          std::to_string(i));
  }
}

void check_disjoint(const IndexSet& a, const IndexSet& b) {
  std::unordered_set<int> sa(a.begin(), a.end());
  for (int i : b)
    if (sa.count(i)) throw ContractError("index sets A and B must be disjoint");
}

double clamp_probability(double p, const char* what) {
  if (p < -1e-9 || p > 1.0 + 1e-9)
    throw NumericalError(std::string(what) +
                         ": probability outside the clamp band: " +
                         std::to_string(p));
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double dpp_probability(const KernelMatrix& k, const IndexSet& a) {
  check_indices(k, a, "dpp_probability");
  const int n = k.n();
  Mat m = -k.matrix;
  std::unordered_set<int> in_a(a.begin(), a.end());
  for (int i = 0; i < n; ++i)
    if (!in_a.count(i)) m(i, i) += 1.0;
  Cplx det = numerics::determinant(m);
  if (a.size() % 2 == 1) det = -det;
  if (std::abs(det.imag()) > 1e-9)
    throw NumericalError("dpp_probability: imaginary residue " +
                         std::to_string(det.imag()));
  return clamp_probability(det.real(), "dpp_probability");
}

double marginal(const KernelMatrix& k, const IndexSet& a, const IndexSet& b) {
  check_indices(k, a, "marginal");
  check_indices(k, b, "marginal");
  check_disjoint(a, b);
  const Mat& km = k.matrix;

  Mat ikb = -submatrix(km, b, b);
  ikb.diagonal().array() += 1.0;
  auto chol = numerics::cholesky_factor(numerics::hermitize(ikb));
  if (!chol.ok()) return 0.0;

  Mat ha = submatrix(km, a, a);
  if (!b.empty() && !a.empty()) {
    const Mat j = numerics::solve_lower(*chol.factor, submatrix(km, b, a));
    ha.noalias() += j.adjoint() * j;
  }
  const Cplx det_ha = numerics::determinant(ha);
  if (std::abs(det_ha.imag()) > 1e-9 * std::max(1.0, std::abs(det_ha.real())))
    throw NumericalError("marginal: imaginary residue in det(H_A)");
  const double value = chol.factor->det_factored() * det_ha.real();
  return clamp_probability(value, "marginal");
}

double conditional_inclusion(const KernelMatrix& k, const IndexSet& a,
                             const IndexSet& b, int point) {
  check_indices(k, a, "conditional_inclusion");
  check_indices(k, b, "conditional_inclusion");
  check_disjoint(a, b);
  for (int i : a)
    if (i == point)
      throw ContractError("conditional_inclusion: point already in A");
  for (int i : b)
    if (i == point)
      throw ContractError("conditional_inclusion: point already in B");
  const Mat& km = k.matrix;

  Mat ikb = -submatrix(km, b, b);
  ikb.diagonal().array() += 1.0;
  auto chol = numerics::cholesky_factor(numerics::hermitize(ikb));
  if (!chol.ok())
    throw DomainError("conditional_inclusion: conditioning event has zero "
                      "probability ((I-K)_B singular)");

  // H^B over A u {point}, point last.
  IndexSet ak = a;
  ak.push_back(point);
  Mat h = submatrix(km, ak, ak);
  if (!b.empty()) {
    const Mat j = numerics::solve_lower(*chol.factor, submatrix(km, b, ak));
    h.noalias() += j.adjoint() * j;
  }
  const int na = static_cast<int>(a.size());
  double p = h(na, na).real();
  if (na > 0) {
    auto tchol = numerics::cholesky_factor(numerics::hermitize(h.topLeftCorner(na, na)));
    if (!tchol.ok())
      throw DomainError("conditional_inclusion: conditioning event has zero "
                        "probability (H_A singular)");
    const Vec w = numerics::solve_lower(*tchol.factor, h.topLeftCorner(na + 1, na + 1)
                                                           .col(na)
                                                           .head(na));
    p -= w.squaredNorm();
  }
  return clamp_probability(p, "conditional_inclusion");
}

BernoulliEnvelope bernoulli_envelope(const KernelMatrix& k) {
  const int n = k.n();
  Mat a = numerics::hermitize(Mat::Identity(n, n) - k.matrix);
  const double scale = std::max(a.diagonal().real().maxCoeff(), 0.0);
  const int bad =
      cholesky_in_place(a, scale == 0.0 ? 1.0 : scale, numerics::kDefaultPivotTol);

  BernoulliEnvelope env;
  env.q.resize(n);
  const int limit = bad == 0 ? n : bad - 1;
  for (int i = 0; i < limit; ++i) {
    const double qi =
        k.matrix(i, i).real() + (i > 0 ? a.row(i).head(i).squaredNorm() : 0.0);
    env.q(i) = clamp_probability(qi, "bernoulli_envelope");
  }
  for (int i = limit; i < n; ++i) env.q(i) = 1.0;
  if (bad != 0) env.degenerate_from = limit;
  return env;
}

double envelope_bound(const KernelMatrix& k) {
  const auto eig = numerics::herm_eigendecomposition(k.matrix);
  const double lmax = eig.eigenvalues.maxCoeff();
  if (lmax >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
  const double trace = k.matrix.trace().real();
  return (1.0 + lmax / (2.0 * (1.0 - lmax))) * trace;
}

SampleSet sample_bernoulli(const RealVec& q, Rng& rng, uint64_t seed) {
  SampleSet s;
  s.seed = seed;
  for (int i = 0; i < q.size(); ++i) {
    if (q(i) < 0.0 || q(i) > 1.0)
      throw ContractError("sample_bernoulli: probability outside [0,1]");
    if (rng.bernoulli(q(i))) s.indices.push_back(i);
  }
  return s;
}

SampleSet sample_bernoulli(const RealVec& q, uint64_t seed) {
  Rng rng(seed);
  return sample_bernoulli(q, rng, seed);
}

std::vector<int> select_frequencies(const numerics::EigenDecomposition& eig,
                                    Rng& rng) {
  std::vector<int> active;
  for (int j = 0; j < eig.eigenvalues.size(); ++j) {
    const double lambda = std::clamp(eig.eigenvalues(j), 0.0, 1.0);
    if (rng.bernoulli(lambda)) active.push_back(j);
  }
  return active;
}

SampleSet spectral_draw(const numerics::EigenDecomposition& eig,
                        const std::vector<int>& active, Rng& rng,
                        uint64_t seed) {
  SampleSet s;
  s.seed = seed;
  const int n = static_cast<int>(eig.eigenvectors.rows());
  const int m = static_cast<int>(active.size());
  if (m == 0) return s;

  Mat v(n, m);
  for (int j = 0; j < m; ++j) v.col(j) = eig.eigenvectors.col(active[j]);

  RealVec residual = v.rowwise().squaredNorm();
  Mat basis(m, m);  // Gram-Schmidt vectors e_l as columns

  for (int l = 0; l < m; ++l) {
    const double denom = double(m - l);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += std::max(residual(i), 0.0);
    total /= denom;
    if (std::abs(total - 1.0) > 1e-6)
      throw NumericalError("sample_spectral: step-3 distribution sums to " +
                           std::to_string(total));
    const double target = rng.uniform() * total;
    double acc = 0.0;
    int y = -1;
    for (int i = 0; i < n; ++i) {
      const double p = std::max(residual(i), 0.0) / denom;
      acc += p;
      if (acc > target && p > 0.0) {
        y = i;
        break;
      }
    }
    if (y < 0) {
      for (int i = n - 1; i >= 0; --i)
        if (residual(i) > 0.0) {
          y = i;
          break;
        }
    }
    if (y < 0) throw NumericalError("sample_spectral: no point with mass left");
    s.indices.push_back(y);

    if (l + 1 < m) {
      // Gram-Schmidt step on the row of the chosen point.
      Vec w = v.row(y).transpose();
      for (int t = 0; t < l; ++t)
        w -= basis.col(t).dot(v.row(y).transpose()) * basis.col(t);
      const double norm = w.norm();
      if (norm < 1e-12)
        throw NumericalError("sample_spectral: degenerate Gram-Schmidt vector");
      basis.col(l) = w / norm;
      const Vec proj = v * basis.col(l).conjugate();
      residual -= proj.cwiseAbs2();
    }
    residual(y) = 0.0;
  }
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

SampleSet sample_spectral(const KernelMatrix& k, uint64_t seed) {
  const auto eig = numerics::herm_eigendecomposition(k.matrix);
  Rng rng(seed);
  const auto active = select_frequencies(eig, rng);
  return spectral_draw(eig, active, rng, seed);
}

// ---------------------------------------------------------------------------
// ConditionalState

ConditionalState::ConditionalState(const Mat& kernel) : k_(kernel) {
  const int n = static_cast<int>(kernel.rows());
  lb_ = Mat::Zero(n, n);
  j_ = Mat(n, 0);
  t_ = Mat(0, 0);
  const double s = 1.0 - kernel.diagonal().real().minCoeff();
  scale_ = s > 0.0 ? s : 1.0;
}

void ConditionalState::exclude_range(int from, int to) {
  const int m = to - from;
  if (m <= 0) return;
  const int nb = b_size_;
  const int na = static_cast<int>(a_.size());
  const int n = static_cast<int>(k_.rows());
  if (to > n) throw ContractError("ConditionalState: index out of range");
  cached_point_ = -1;

  IndexSet fresh(m);
  std::iota(fresh.begin(), fresh.end(), from);

  // V = L_B^{-1} (I-K)_{B x fresh} = L_B^{-1} (-K_{B x fresh})
  Mat v(nb, m);
  for (int j = 0; j < m; ++j) v.col(j) = -subcolumn(k_, b_indices_, from + j);
  if (nb > 0)
    lb_.topLeftCorner(nb, nb).triangularView<Eigen::Lower>().solveInPlace(v);

  Mat schur = -k_.block(from, from, m, m);
  schur.diagonal().array() += 1.0;
  if (nb > 0) schur.noalias() -= v.adjoint() * v;
  schur = numerics::hermitize(schur);
  const int bad = cholesky_in_place(schur, scale_, numerics::kDefaultPivotTol);
  if (bad != 0)
    throw NumericalError(
        "ConditionalState: (I-K)_B became singular at global index " +
        std::to_string(from + bad));

  if (na > 0) {
    Mat rhs = k_.block(from, 0, m, n)(Eigen::all, a_);
    if (nb > 0) rhs.noalias() -= v.adjoint() * j_.topRows(nb);
    schur.triangularView<Eigen::Lower>().solveInPlace(rhs);
    j_.block(nb, 0, m, na) = rhs;
    // H_A gains one rank-one term per appended row of J.
    for (int i = 0; i < m; ++i) {
      Vec u = rhs.row(i).adjoint();
      if (!numerics::cholesky_rank_one_update(t_, u, 1.0))
        throw NumericalError("ConditionalState: H_A update lost positivity");
    }
  }

  lb_.block(nb, 0, m, nb) = v.adjoint();
  lb_.block(nb, nb, m, m) = schur;
  b_size_ += m;
  b_indices_.insert(b_indices_.end(), fresh.begin(), fresh.end());
}

double ConditionalState::inclusion_probability(int point) {
  const int nb = b_size_;
  const int na = static_cast<int>(a_.size());

  Vec jk = subcolumn(k_, b_indices_, point);
  if (nb > 0)
    lb_.topLeftCorner(nb, nb).triangularView<Eigen::Lower>().solveInPlace(jk);

  const double hkk = k_(point, point).real() + jk.squaredNorm();
  double p = hkk;
  Vec w;
  if (na > 0) {
    Vec hak = subcolumn(k_, a_, point);
    if (nb > 0) hak.noalias() += j_.topRows(nb).adjoint() * jk;
    w = t_.triangularView<Eigen::Lower>().solve(hak);
    p -= w.squaredNorm();
  }
  cached_point_ = point;
  cached_jk_ = std::move(jk);
  cached_w_ = std::move(w);
  cached_hkk_ = hkk;
  cached_p_ = p;
  return p;
}

void ConditionalState::accept(int point) {
  if (point != cached_point_)
    throw ContractError("ConditionalState::accept without matching probability");
  const int na = static_cast<int>(a_.size());
  const int n = static_cast<int>(k_.rows());
  const double d2 = cached_p_;
  if (d2 <= 0.0)
    throw NumericalError("ConditionalState: accepting a zero-probability point");

  j_.conservativeResize(n, na + 1);
  j_.col(na).head(b_size_) = cached_jk_;

  t_.conservativeResize(na + 1, na + 1);
  if (na > 0) {
    t_.row(na).head(na) = cached_w_.adjoint();
    t_.col(na).head(na).setZero();
  }
  t_(na, na) = std::sqrt(d2);
  a_.push_back(point);
  cached_point_ = -1;
}

// ---------------------------------------------------------------------------

SampleSet sample_sequential(const KernelMatrix& k, uint64_t seed) {
  Rng rng(seed);
  ConditionalState state(k.matrix);
  const int n = k.n();
  for (int i = 0; i < n; ++i) {
    const double p =
        clamp_probability(state.inclusion_probability(i), "sample_sequential");
    if (rng.uniform() < p)
      state.accept(i);
    else
      state.exclude(i);
  }
  return SampleSet{state.accepted(), seed};
}

SampleSet thinning_pass(const KernelMatrix& k, const BernoulliEnvelope& env,
                        const SampleSet& x, Rng& rng, uint64_t seed) {
  ConditionalState state(k.matrix);
  int next = 0;  // first index not yet in A or B
  for (int point : x.indices) {
    state.exclude_range(next, point);
    const double p = state.inclusion_probability(point);
    const double q = env.q(point);
    if (p > q + 1e-9)
      throw NumericalError("sample_thinning: envelope violated at index " +
                           std::to_string(point) + " (p=" + std::to_string(p) +
                           " > q=" + std::to_string(q) + ")");
    const double ratio = std::min(clamp_probability(p, "sample_thinning") / q, 1.0);
    if (rng.uniform() < ratio)
      state.accept(point);
    else
      state.exclude(point);
    next = point + 1;
  }
  return SampleSet{state.accepted(), seed};
}

SampleSet sample_thinning(const KernelMatrix& k, const BernoulliEnvelope& env,
                          uint64_t seed) {
  if (env.q.size() != k.n())
    throw ContractError("sample_thinning: envelope size mismatch");
  Rng rng(seed);
  const SampleSet x = sample_bernoulli(env.q, rng, seed);
  return thinning_pass(k, env, x, rng, seed);
}

std::vector<int> diag_ascending_order(const KernelMatrix& k) {
  std::vector<int> perm(k.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return k.matrix(a, a).real() < k.matrix(b, b).real();
  });
  return perm;
}

KernelMatrix permute_kernel(const KernelMatrix& k, const std::vector<int>& perm) {
  const int n = k.n();
  if (static_cast<int>(perm.size()) != n)
    throw ContractError("permute_kernel: permutation size mismatch");
  Mat m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = k.matrix(perm[i], perm[j]);
  return KernelMatrix{std::move(m), k.provenance + " permuted", std::nullopt};
}

}  // namespace dpp::samplers
