#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dpp {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

// A subset of {0..n-1}. Indices are 0-based internally; the text
// serialization is 1-based.
using IndexSet = std::vector<int>;

// Contract violations: bad arguments, non-Hermitian input, overlapping sets.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical-consistency failures: probabilities outside the clamp band,
// envelope violations, eigensolver failures.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested operation has no answer (no L-ensemble for projection kernels,
// conditioning on a zero-probability event, unreachable calibration target).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seedable 64-bit generator. Uniform doubles are produced from the top 53
// bits so streams are reproducible across platforms with IEEE doubles.
// Stream-split rule: substream(seed, i) seeds an independent generator for
// invocation i; samplers consume exactly one substream per call.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

  static Rng substream(uint64_t seed, uint64_t stream) {
    return Rng(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
  }

  // Uniform in [0, 1).
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound). Rejection keeps the draw unbiased.
  uint64_t below(uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller (no library distribution, so the stream
  // is identical across standard library implementations).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// A point-process realization: strictly increasing 0-based indices plus the
// seed that produced it.
struct SampleSet {
  IndexSet indices;
  uint64_t seed = 0;

  int size() const { return static_cast<int>(indices.size()); }
  bool contains(int k) const {
    return std::binary_search(indices.begin(), indices.end(), k);
  }
};

// One line "seed=<u64> algo=<name>", then comma-separated sorted 1-based
// indices (empty second line for the empty set).
std::string serialize_sample(const SampleSet& s, const std::string& algo);
SampleSet parse_sample(const std::string& text, std::string* algo_out = nullptr);

}  // namespace dpp
