#pragma once

#include <optional>

#include "dpp/common.hpp"
#include "dpp/kernels.hpp"
#include "dpp/numerics.hpp"

namespace dpp::samplers {

using kernels::KernelMatrix;

// P(Y = A) = (-1)^|A| det(I^{complement(A)} - K).
double dpp_probability(const KernelMatrix& k, const IndexSet& a);

// P(A subset Y, B disjoint from Y) = det((I-K)_B) det(H^B_A) where
// H^B = K + K_{.,B} ((I-K)_B)^{-1} K_{B,.}. Returns 0 when (I-K)_B is
// singular.
double marginal(const KernelMatrix& k, const IndexSet& a, const IndexSet& b);

// P(k in Y | A subset Y, B disjoint from Y). Throws DomainError when the
// conditioning event has zero probability.
double conditional_inclusion(const KernelMatrix& k, const IndexSet& a,
                             const IndexSet& b, int point);

// Independent-coin probabilities dominating every pointwise conditional of
// the DPP. degenerate_from is the first 0-based index with forced q = 1.
struct BernoulliEnvelope {
  RealVec q;
  std::optional<int> degenerate_from;

  double expected_cardinality() const { return q.sum(); }
};

// q_k = K(k,k) + |L_{1..k-1}^{-1} K_{1..k-1,k}|^2 from one Cholesky pass
// over I - K. The factor's k-th row below the diagonal already solves that
// triangular system, so q falls out of the row norms.
BernoulliEnvelope bernoulli_envelope(const KernelMatrix& k);

// E|X| <= (1 + lmax / (2 (1 - lmax))) E|Y|; +infinity when lmax(K) = 1.
double envelope_bound(const KernelMatrix& k);

SampleSet sample_bernoulli(const RealVec& q, uint64_t seed);
SampleSet sample_bernoulli(const RealVec& q, Rng& rng, uint64_t seed);

// The three exact samplers. Each consumes one RNG stream per invocation;
// identical (kernel, seed) pairs reproduce identical samples bitwise.
SampleSet sample_spectral(const KernelMatrix& k, uint64_t seed);
SampleSet sample_sequential(const KernelMatrix& k, uint64_t seed);
SampleSet sample_thinning(const KernelMatrix& k, const BernoulliEnvelope& env,
                          uint64_t seed);

// Spectral steps exposed separately so the benchmark can time them.
std::vector<int> select_frequencies(const numerics::EigenDecomposition& eig,
                                    Rng& rng);
SampleSet spectral_draw(const numerics::EigenDecomposition& eig,
                        const std::vector<int>& active, Rng& rng,
                        uint64_t seed);

// Thinning pass over an already drawn Bernoulli process.
SampleSet thinning_pass(const KernelMatrix& k, const BernoulliEnvelope& env,
                        const SampleSet& x, Rng& rng, uint64_t seed);

// Incremental machinery behind the sequential and thinning samplers:
// maintains A, B, the growing Cholesky factor of (I-K)_B, the solved block
// J = L_B^{-1} K_{B,A} and a small Cholesky factor of H^B_A.
class ConditionalState {
 public:
  explicit ConditionalState(const Mat& kernel);

  // Moves every index in [from, to) into B with one Cholesky block append.
  void exclude_range(int from, int to);
  void exclude(int point) { exclude_range(point, point + 1); }

  // p = P(point in Y | A subset Y, B disjoint from Y); caches the solved
  // column so a subsequent accept(point) is cheap.
  double inclusion_probability(int point);

  void accept(int point);

  const IndexSet& accepted() const { return a_; }
  int excluded_count() const { return b_size_; }

 private:
  const Mat& k_;
  IndexSet a_;
  IndexSet b_indices_;
  int b_size_ = 0;
  Mat lb_;       // factor of (I-K)_B in the top-left b_size_ block
  Mat j_;        // b_size_ x |A|
  Mat t_;        // chol of H^B_A, |A| x |A|
  double scale_ = 1.0;

  // cache from the last inclusion_probability call
  int cached_point_ = -1;
  Vec cached_jk_, cached_w_;
  double cached_p_ = 0.0, cached_hkk_ = 0.0;

  void grow_j_cols();
};

// Relabels the ground set so kernel diagonals ascend; optional ordering
// heuristic for the thinning envelope. perm[i] is the original index now at
// position i.
std::vector<int> diag_ascending_order(const KernelMatrix& k);
KernelMatrix permute_kernel(const KernelMatrix& k, const std::vector<int>& perm);

}  // namespace dpp::samplers
