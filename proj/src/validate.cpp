#include "dpp/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dpp/patches.hpp"

namespace dpp::validate {

namespace {

IndexSet mask_to_set(uint32_t mask) {
  IndexSet s;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) s.push_back(i);
  return s;
}

int popcount(uint32_t mask) {
  int c = 0;
  for (; mask; mask >>= 1) c += int(mask & 1);
  return c;
}

CheckResult make_result(std::string suite, const kernels::KernelMatrix& k,
                        bool pass, double value, std::string detail) {
  CheckResult r;
  r.suite = std::move(suite);
  r.kernel = k.provenance;
  r.pass = pass;
  r.value = value;
  r.detail = std::move(detail);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

SampleSet draw_once(const kernels::KernelMatrix& k, const std::string& algo,
                    const numerics::EigenDecomposition* eig,
                    const samplers::BernoulliEnvelope* env, uint64_t seed) {
  if (algo == "spectral") {
    // The eigendecomposition is deterministic; reuse it across draws.
    Rng rng(seed);
    const auto active = samplers::select_frequencies(*eig, rng);
    return samplers::spectral_draw(*eig, active, rng, seed);
  }
  if (algo == "sequential") return samplers::sample_sequential(k, seed);
  if (algo == "thinning") return samplers::sample_thinning(k, *env, seed);
  throw ContractError("unknown algorithm '" + algo + "'");
}

}  // namespace

std::vector<kernels::KernelMatrix> small_test_kernels(int n, uint64_t seed) {
  if (n < 2 || n > oracle::kMaxEnumerationN)
    throw ContractError("small_test_kernels: n out of range");
  std::vector<kernels::KernelMatrix> ks;

  ks.push_back(kernels::build_random(n, seed));
  ks.back().provenance = "random n=" + std::to_string(n);

  const double target = std::min(2.0, n / 3.0);
  ks.push_back(kernels::calibrated_kernel(kernels::build_ginibre(n, seed), target));
  ks.back().provenance = "ginibre n=" + std::to_string(n);

  {
    const auto img = patches::synthetic_texture(24, 24, seed);
    const auto ps = patches::extract_patches(img, 4, n, seed + 1);
    const double s = patches::median_bandwidth(ps, 2000, seed + 2);
    ks.push_back(kernels::calibrated_kernel(
        kernels::build_patch_gaussian(ps.vectors, s), target));
    ks.back().provenance = "patch n=" + std::to_string(n);
  }

  ks.push_back(kernels::build_projection(n, std::max(1, n / 3), seed));
  ks.back().provenance = "projection n=" + std::to_string(n) +
                         " rank=" + std::to_string(std::max(1, n / 3));
  return ks;
}

double sampler_tv(const kernels::KernelMatrix& k, const std::string& algo,
                  int draws, uint64_t seed, std::vector<uint64_t>* counts_out) {
  const auto exact = oracle::enumerate_distribution(k);

  std::optional<numerics::EigenDecomposition> eig;
  std::optional<samplers::BernoulliEnvelope> env;
  if (algo == "spectral") eig = numerics::herm_eigendecomposition(k.matrix);
  if (algo == "thinning") env = samplers::bernoulli_envelope(k);

  std::vector<uint64_t> counts(exact.size(), 0);
  for (int i = 0; i < draws; ++i) {
    const uint64_t s = splitmix64(seed ^ splitmix64(uint64_t(i) + 1));
    const auto sample = draw_once(k, algo, eig ? &*eig : nullptr,
                                  env ? &*env : nullptr, s);
    uint32_t mask = 0;
    for (int idx : sample.indices) mask |= uint32_t(1) << idx;
    ++counts[mask];
  }

  oracle::SubsetDistribution emp;
  emp.n = exact.n;
  emp.probabilities.resize(exact.size());
  for (uint32_t m = 0; m < exact.size(); ++m)
    emp[m] = double(counts[m]) / double(draws);
  if (counts_out) *counts_out = std::move(counts);
  return oracle::total_variation(emp, exact);
}

std::vector<CheckResult> check_normalization(const kernels::KernelMatrix& k) {
  const auto d = oracle::enumerate_distribution(k);
  double sum = 0.0, min_p = 0.0;
  for (uint32_t m = 0; m < d.size(); ++m) {
    sum += d[m];
    min_p = std::min(min_p, d[m]);
  }
  const bool pass = std::abs(sum - 1.0) <= 1e-8 && min_p >= -1e-12;
  return {make_result("normalization", k, pass, sum,
                      "min probability " + fmt(min_p))};
}

std::vector<CheckResult> check_mobius(const kernels::KernelMatrix& k) {
  // Inclusion probabilities det(K_A) must be the superset zeta transform of
  // the pmf, and the pmf must come back by Moebius inversion.
  const int n = k.n();
  const auto d = oracle::enumerate_distribution(k);
  const auto g = oracle::zeta_transform(d.probabilities, n,
                                        oracle::MobiusDirection::kSuperset);
  double max_err = 0.0;
  for (uint32_t m = 0; m < d.size(); ++m) {
    const auto a = mask_to_set(m);
    Mat ka(a.size(), a.size());
    for (size_t r = 0; r < a.size(); ++r)
      for (size_t c = 0; c < a.size(); ++c)
        ka(long(r), long(c)) = k.matrix(a[r], a[c]);
    const double incl = a.empty() ? 1.0 : numerics::determinant(ka).real();
    max_err = std::max(max_err, std::abs(g[m] - incl));
  }
  const auto back = oracle::mobius_invert(g, n,
                                          oracle::MobiusDirection::kSuperset);
  for (uint32_t m = 0; m < d.size(); ++m)
    max_err = std::max(max_err, std::abs(back[m] - d[m]));
  return {make_result("mobius", k, max_err <= 1e-8, max_err,
                      "max |det(K_A) - zeta(pmf)| and round-trip error")};
}

std::vector<CheckResult> check_marginals(const kernels::KernelMatrix& k) {
  // P(A in Y, B disjoint Y) from the factored marginal formula must equal
  // the sum of pmf entries over compatible subsets, for every disjoint pair.
  const int n = k.n();
  const auto d = oracle::enumerate_distribution(k);
  double max_err = 0.0;
  const uint32_t full = (uint32_t(1) << n) - 1;
  for (uint32_t ma = 0; ma <= full; ++ma) {
    for (uint32_t mb = 0; mb <= full; ++mb) {
      if (ma & mb) continue;
      double direct = 0.0;
      for (uint32_t c = 0; c <= full; ++c)
        if ((c & ma) == ma && !(c & mb)) direct += d[c];
      const double formula =
          samplers::marginal(k, mask_to_set(ma), mask_to_set(mb));
      max_err = std::max(max_err, std::abs(formula - direct));
    }
  }
  return {make_result("marginals", k, max_err <= 1e-8, max_err,
                      "exhaustive over disjoint (A,B)")};
}

std::vector<CheckResult> check_monotonicity(const kernels::KernelMatrix& k) {
  // Conditionals shrink when A grows and grow when B grows (negative
  // association), across every reachable history.
  const int n = k.n();
  if (n > 6) throw ContractError("check_monotonicity: n must be <= 6");
  const uint32_t full = (uint32_t(1) << n) - 1;
  double worst = 0.0;
  long checked = 0;
  for (uint32_t ma = 0; ma <= full; ++ma) {
    for (uint32_t mb = 0; mb <= full; ++mb) {
      if (ma & mb) continue;
      if (samplers::marginal(k, mask_to_set(ma), mask_to_set(mb)) <= 1e-12)
        continue;
      for (int pt = 0; pt < n; ++pt) {
        if ((ma | mb) & (uint32_t(1) << pt)) continue;
        const double base = samplers::conditional_inclusion(
            k, mask_to_set(ma), mask_to_set(mb), pt);
        for (int l = 0; l < n; ++l) {
          if (l == pt || ((ma | mb) & (uint32_t(1) << l))) continue;
          const uint32_t bit = uint32_t(1) << l;
          if (samplers::marginal(k, mask_to_set(ma | bit), mask_to_set(mb)) >
              1e-12) {
            const double up = samplers::conditional_inclusion(
                k, mask_to_set(ma | bit), mask_to_set(mb), pt);
            worst = std::max(worst, up - base);
            ++checked;
          }
          if (samplers::marginal(k, mask_to_set(ma), mask_to_set(mb | bit)) >
              1e-12) {
            const double down = samplers::conditional_inclusion(
                k, mask_to_set(ma), mask_to_set(mb | bit), pt);
            worst = std::max(worst, base - down);
            ++checked;
          }
        }
      }
    }
  }
  return {make_result("monotonicity", k, worst <= 1e-9, worst,
                      std::to_string(checked) + " comparisons")};
}

std::vector<CheckResult> check_envelope_dominance(
    const kernels::KernelMatrix& k) {
  // q_k must dominate P(k in Y | history) for every positive-probability
  // prefix history.
  const int n = k.n();
  if (n > oracle::kMaxEnumerationN)
    throw ContractError("check_envelope_dominance: n too large");
  const auto env = samplers::bernoulli_envelope(k);
  double worst = -1.0;
  long checked = 0;
  for (int pt = 0; pt < n; ++pt) {
    const uint32_t histories = uint32_t(1) << pt;
    for (uint32_t h = 0; h < histories; ++h) {
      const uint32_t mb = (histories - 1) & ~h;
      if (samplers::marginal(k, mask_to_set(h), mask_to_set(mb)) <= 1e-12)
        continue;
      const double p = samplers::conditional_inclusion(k, mask_to_set(h),
                                                       mask_to_set(mb), pt);
      worst = std::max(worst, p - env.q[pt]);
      ++checked;
    }
  }
  return {make_result("envelope_dominance", k, worst <= 1e-9, worst,
                      std::to_string(checked) + " histories, max p - q")};
}

std::vector<CheckResult> check_cardinality_bound(const kernels::KernelMatrix& k,
                                                 int draws, uint64_t seed) {
  std::vector<CheckResult> out;
  const auto env = samplers::bernoulli_envelope(k);
  const double bound = samplers::envelope_bound(k);
  const double sum_q = env.expected_cardinality();
  out.push_back(make_result(
      "cardinality_bound_analytic", k, sum_q <= bound + 1e-9, sum_q,
      "sum q = " + fmt(sum_q) + " vs bound " + fmt(bound)));

  // Empirical mean of |X| for the envelope process vs its exact mean.
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const uint64_t s = splitmix64(seed ^ splitmix64(uint64_t(i) + 1));
    const double card = double(samplers::sample_bernoulli(env.q, s).size());
    const double delta = card - mean;
    mean += delta / double(i + 1);
    m2 += delta * (card - mean);
  }
  const double se = std::sqrt(m2 / double(draws - 1) / double(draws));
  const double dev = std::abs(mean - sum_q);
  out.push_back(make_result(
      "cardinality_bound_empirical", k, dev <= 3.0 * std::max(se, 1e-12), dev,
      "mean " + fmt(mean) + " expected " + fmt(sum_q) + " se " + fmt(se)));
  return out;
}

std::vector<CheckResult> check_sampler_agreement(const kernels::KernelMatrix& k,
                                                 int draws, uint64_t seed) {
  const std::vector<std::string> algos = {"spectral", "sequential", "thinning"};
  const auto exact = oracle::enumerate_distribution(k);

  std::vector<CheckResult> out;
  std::vector<std::vector<uint64_t>> counts(algos.size());
  for (size_t i = 0; i < algos.size(); ++i) {
    const uint64_t s = splitmix64(seed + 1000 * (i + 1));
    const double tv = sampler_tv(k, algos[i], draws, s, &counts[i]);
    out.push_back(make_result("tv_" + algos[i], k, tv < 0.01, tv,
                              std::to_string(draws) + " draws"));
    const auto chi = oracle::chi_square_stat(counts[i], exact, uint64_t(draws));
    out.push_back(make_result(
        "chi_square_" + algos[i], k, chi.p_value > 0.001, chi.p_value,
        "stat " + fmt(chi.statistic) + " df " +
            std::to_string(chi.degrees_of_freedom)));

    // Cardinality mean from the same counts.
    double mean = 0.0, ex = 0.0, ex2 = 0.0;
    for (uint32_t m = 0; m < exact.size(); ++m) {
      const double c = double(popcount(m));
      mean += c * double(counts[i][m]) / double(draws);
      ex += c * exact[m];
      ex2 += c * c * exact[m];
    }
    const double sd = std::sqrt(std::max(ex2 - ex * ex, 0.0));
    const double se = sd / std::sqrt(double(draws));
    const double dev = std::abs(mean - ex);
    out.push_back(make_result(
        "cardinality_mean_" + algos[i], k, dev <= 3.0 * std::max(se, 1e-12),
        dev, "mean " + fmt(mean) + " expected " + fmt(ex)));
  }

  for (size_t i = 0; i < algos.size(); ++i)
    for (size_t j = i + 1; j < algos.size(); ++j) {
      const auto chi = oracle::chi_square_two_sample(counts[i], counts[j]);
      out.push_back(make_result(
          "two_sample_" + algos[i] + "_" + algos[j], k, chi.p_value > 0.001,
          chi.p_value, "stat " + fmt(chi.statistic)));
    }
  return out;
}

std::vector<CheckResult> check_permutation_invariance(
    const kernels::KernelMatrix& k, int draws, uint64_t seed) {
  // Thinning on a relabelled kernel, mapped back, must match the original
  // pmf: the sampler's visit order is an implementation detail.
  const int n = k.n();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(splitmix64(seed + 77));
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[int(rng.below(uint64_t(i + 1)))]);

  const auto kp = samplers::permute_kernel(k, perm);
  const auto env = samplers::bernoulli_envelope(kp);
  const auto exact = oracle::enumerate_distribution(k);

  oracle::SubsetDistribution emp;
  emp.n = n;
  emp.probabilities.assign(exact.size(), 0.0);
  for (int i = 0; i < draws; ++i) {
    const uint64_t s = splitmix64(seed ^ splitmix64(uint64_t(i) + 1));
    const auto sample = samplers::sample_thinning(kp, env, s);
    uint32_t mask = 0;
    for (int idx : sample.indices) mask |= uint32_t(1) << perm[idx];
    emp[mask] += 1.0 / double(draws);
  }
  const double tv = oracle::total_variation(emp, exact);
  return {make_result("permutation_invariance", k, tv < 0.01, tv,
                      std::to_string(draws) + " thinning draws")};
}

std::vector<CheckResult> run_all(const ValidateOptions& opt,
                                 std::ostream* progress) {
  if (opt.max_n < 2 || opt.max_n > 12)
    throw ContractError("validate: max_n must be in [2, 12]");
  if (opt.draws < 100) throw ContractError("validate: draws must be >= 100");

  std::vector<CheckResult> results;
  auto append = [&](std::vector<CheckResult> rs) {
    for (auto& r : rs) {
      if (progress)
        *progress << (r.pass ? "PASS " : "FAIL ") << r.suite << " [" << r.kernel
                  << "] value=" << r.value << "\n"
                  << std::flush;
      results.push_back(std::move(r));
    }
  };

  // Exact structural suites at the largest requested size; conditional
  // monotonicity is exhaustive, so it stays at n = 6.
  const int n_exact = std::min(opt.max_n, 8);
  for (const auto& k : small_test_kernels(n_exact, opt.seed)) {
    append(check_normalization(k));
    append(check_mobius(k));
    append(check_marginals(k));
    append(check_envelope_dominance(k));
  }
  for (const auto& k : small_test_kernels(std::min(opt.max_n, 6), opt.seed))
    append(check_monotonicity(k));

  // Statistical suites at n = 6 so the enumerated pmf has 64 cells.
  const int n_stat = std::min(opt.max_n, 6);
  const int card_draws = std::min(opt.draws, 20000);
  for (const auto& k : small_test_kernels(n_stat, opt.seed + 1)) {
    append(check_sampler_agreement(k, opt.draws, opt.seed + 2));
    append(check_permutation_invariance(k, opt.draws, opt.seed + 3));
    append(check_cardinality_bound(k, card_draws, opt.seed + 4));
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

void write_report(std::ostream& os, const std::vector<CheckResult>& results) {
  int failed = 0;
  for (const auto& r : results) {
    os << (r.pass ? "PASS " : "FAIL ") << r.suite << " [" << r.kernel
       << "] value=" << r.value;
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << "\n";
    if (!r.pass) ++failed;
  }
  os << results.size() << " checks, " << failed << " failed\n";
}

void write_csv(std::ostream& os, const std::vector<CheckResult>& results) {
  os << "suite,kernel,pass,value,detail\n";
  for (const auto& r : results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    os << r.suite << ",\"" << r.kernel << "\"," << (r.pass ? 1 : 0) << ','
       << r.value << ',' << detail << '\n';
  }
}

}  // namespace dpp::validate
