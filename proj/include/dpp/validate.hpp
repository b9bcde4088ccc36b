#pragma once

#include <iosfwd>

#include "dpp/oracle.hpp"
#include "dpp/samplers.hpp"

namespace dpp::validate {

struct CheckResult {
  std::string suite;
  std::string kernel;
  bool pass = false;
  double value = 0.0;  // the measured quantity (TV, max violation, ...)
  std::string detail;
};

struct ValidateOptions {
  int max_n = 8;
  int draws = 200000;
  uint64_t seed = 0;
};

// The four experiment kernel models at desk scale, calibrated to a small
// expected cardinality.
std::vector<kernels::KernelMatrix> small_test_kernels(int n, uint64_t seed);

// Statistical agreement of one sampler with the enumerated pmf: returns TV
// distance, fills counts for chi-square use.
double sampler_tv(const kernels::KernelMatrix& k, const std::string& algo,
                  int draws, uint64_t seed,
                  std::vector<uint64_t>* counts_out = nullptr);

// Individual invariant suites; each returns one result per tested kernel.
std::vector<CheckResult> check_normalization(const kernels::KernelMatrix& k);
std::vector<CheckResult> check_mobius(const kernels::KernelMatrix& k);
std::vector<CheckResult> check_marginals(const kernels::KernelMatrix& k);
std::vector<CheckResult> check_monotonicity(const kernels::KernelMatrix& k);
std::vector<CheckResult> check_envelope_dominance(const kernels::KernelMatrix& k);
std::vector<CheckResult> check_cardinality_bound(const kernels::KernelMatrix& k,
                                                 int draws, uint64_t seed);
// TV + chi-square against the oracle, pairwise chi-square between samplers,
// and the cardinality-mean check, all from one set of draws per sampler.
std::vector<CheckResult> check_sampler_agreement(const kernels::KernelMatrix& k,
                                                 int draws, uint64_t seed);
std::vector<CheckResult> check_permutation_invariance(
    const kernels::KernelMatrix& k, int draws, uint64_t seed);

std::vector<CheckResult> run_all(const ValidateOptions& opt,
                                 std::ostream* progress = nullptr);

bool all_passed(const std::vector<CheckResult>& results);
void write_report(std::ostream& os, const std::vector<CheckResult>& results);
void write_csv(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace dpp::validate
