#pragma once

#include "dpp/common.hpp"
#include "dpp/kernels.hpp"

namespace dpp::oracle {

inline constexpr int kMaxEnumerationN = 20;

// Exhaustive pmf over subsets of {0..n-1}, indexed by bitmask (bit i set
// means element i is in the subset).
struct SubsetDistribution {
  int n = 0;
  std::vector<double> probabilities;  // length 2^n

  double& operator[](uint32_t mask) { return probabilities[mask]; }
  double operator[](uint32_t mask) const { return probabilities[mask]; }
  uint32_t size() const { return uint32_t(1) << n; }
};

// Every entry computed independently from the exact pmf formula; sums to 1
// within 1e-8 or throws.
SubsetDistribution enumerate_distribution(const kernels::KernelMatrix& k);

enum class MobiusDirection { kSuperset, kSubset };

// f(A) = sum over B >= A of (-1)^{|B \ A|} g(B) (superset direction), and
// the subset-lattice mirror. Inverse of the corresponding zeta transform.
std::vector<double> mobius_invert(const std::vector<double>& g, int n,
                                  MobiusDirection direction);

// Zeta transform: g(A) = sum over B >= A (or <= A) of f(B).
std::vector<double> zeta_transform(const std::vector<double>& f, int n,
                                   MobiusDirection direction);

SubsetDistribution empirical_distribution(const std::vector<SampleSet>& draws,
                                          int n);

double total_variation(const SubsetDistribution& p, const SubsetDistribution& q);

struct ChiSquare {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

// Goodness-of-fit against the expected distribution; cells with expected
// probability below 5/total are pooled into one "other" cell.
ChiSquare chi_square_stat(const std::vector<uint64_t>& observed,
                          const SubsetDistribution& expected, uint64_t total);

// Two-sample homogeneity test between count vectors; cells with pooled
// expected count below 5 are merged.
ChiSquare chi_square_two_sample(const std::vector<uint64_t>& a,
                                const std::vector<uint64_t>& b);

void write_distribution_csv(std::ostream& os, const SubsetDistribution& d);

}  // namespace dpp::oracle
