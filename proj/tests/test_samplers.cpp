#include "dpp/samplers.hpp"

#include "doctest.h"
#include "dpp/oracle.hpp"

using namespace dpp;
using namespace dpp::samplers;

namespace {

KernelMatrix make_kernel(const Mat& m) {
  KernelMatrix k;
  k.matrix = m;
  return k;
}

KernelMatrix test_kernel_2x2() {
  Mat m(2, 2);
  m << 0.5, 0.25, 0.25, 0.5;
  return make_kernel(m);
}

KernelMatrix diag_kernel(std::initializer_list<double> d) {
  Mat m = Mat::Zero(long(d.size()), long(d.size()));
  int i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return make_kernel(m);
}

}  // namespace

TEST_CASE("subset probabilities") {
  CHECK(dpp_probability(make_kernel(Mat::Zero(2, 2)), {}) ==
        doctest::Approx(1.0));
  CHECK(dpp_probability(diag_kernel({0.3, 0.7}), {0}) == doctest::Approx(0.09));

  const auto k = test_kernel_2x2();
  CHECK(dpp_probability(k, {}) == doctest::Approx(0.1875));
  CHECK(dpp_probability(k, {0}) == doctest::Approx(0.3125));
  CHECK(dpp_probability(k, {1}) == doctest::Approx(0.3125));
  CHECK(dpp_probability(k, {0, 1}) == doctest::Approx(0.1875));

  CHECK_THROWS_AS(dpp_probability(k, {0, 0}), ContractError);
  CHECK_THROWS_AS(dpp_probability(k, {2}), ContractError);
}

TEST_CASE("general marginals") {
  const auto k = test_kernel_2x2();
  CHECK(marginal(k, {}, {}) == doctest::Approx(1.0));
  CHECK(marginal(k, {0}, {}) == doctest::Approx(0.5));
  CHECK(marginal(k, {0}, {1}) == doctest::Approx(0.3125));
  CHECK_THROWS_AS(marginal(k, {0}, {0}), ContractError);

  // Projection kernel: conditioning out one point of a tied pair is certain.
  Mat p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  CHECK(marginal(make_kernel(p), {}, {0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("pointwise conditionals") {
  const auto k = test_kernel_2x2();
  CHECK(conditional_inclusion(k, {}, {}, 0) == doctest::Approx(0.5));
  CHECK(conditional_inclusion(k, {}, {1}, 0) == doctest::Approx(0.625));

  const auto d = diag_kernel({0.3, 0.7});
  CHECK(conditional_inclusion(d, {1}, {}, 0) == doctest::Approx(0.3));
  CHECK(conditional_inclusion(d, {}, {1}, 0) == doctest::Approx(0.3));

  // Conditioning on both points of a tied projection pair being absent is a
  // zero-probability event.
  Mat p = Mat::Zero(3, 3);
  p.topLeftCorner(2, 2) << 0.5, 0.5, 0.5, 0.5;
  p(2, 2) = 0.3;
  CHECK_THROWS_AS(conditional_inclusion(make_kernel(p), {}, {0, 1}, 2),
                  DomainError);
}

TEST_CASE("bernoulli envelope values") {
  auto env = bernoulli_envelope(diag_kernel({0.3, 0.7}));
  CHECK(env.q(0) == doctest::Approx(0.3));
  CHECK(env.q(1) == doctest::Approx(0.7));
  CHECK_FALSE(env.degenerate_from.has_value());

  env = bernoulli_envelope(test_kernel_2x2());
  CHECK(env.q(0) == doctest::Approx(0.5));
  CHECK(env.q(1) == doctest::Approx(0.625));
  CHECK(env.expected_cardinality() == doctest::Approx(1.125));

  Mat p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  env = bernoulli_envelope(make_kernel(p));
  CHECK(env.q(0) == doctest::Approx(0.5));
  CHECK(env.q(1) == doctest::Approx(1.0));
  REQUIRE(env.degenerate_from.has_value());
  CHECK(*env.degenerate_from == 1);
}

TEST_CASE("envelope from the factor row norms matches explicit solves") {
  const auto k = kernels::build_random(12, 31);
  const auto env = bernoulli_envelope(k);
  for (int i = 0; i < 12; ++i) {
    double q = k.matrix(i, i).real();
    if (i > 0) {
      const auto lr =
          numerics::cholesky_factor(Mat::Identity(i, i) -
                                    k.matrix.topLeftCorner(i, i));
      REQUIRE(lr.ok());
      const Mat v = numerics::solve_lower(*lr.factor, k.matrix.block(0, i, i, 1));
      q += v.squaredNorm();
    }
    CHECK(env.q(i) == doctest::Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("expected-cardinality bound for the envelope") {
  CHECK(envelope_bound(diag_kernel({0.5, 0.5})) == doctest::Approx(1.5));
  CHECK(envelope_bound(test_kernel_2x2()) == doctest::Approx(2.5));
  CHECK(std::isinf(envelope_bound(
      make_kernel(kernels::build_projection(4, 2, 1).matrix))));
}

TEST_CASE("bernoulli process sampling") {
  CHECK(sample_bernoulli(RealVec::Zero(5), 1).indices.empty());
  CHECK(sample_bernoulli(RealVec::Ones(5), 1).size() == 5);

  double mean = 0.0;
  const RealVec q = RealVec::Constant(10, 0.5);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    mean += double(sample_bernoulli(q, uint64_t(i)).size()) / draws;
  CHECK(mean == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("edge-case kernels sample deterministically") {
  const auto zero = make_kernel(Mat::Zero(4, 4));
  const auto id = make_kernel(Mat::Identity(4, 4));
  const auto env0 = bernoulli_envelope(zero);
  const auto env1 = bernoulli_envelope(id);
  for (uint64_t s : {1ULL, 9ULL, 77ULL}) {
    CHECK(sample_spectral(zero, s).indices.empty());
    CHECK(sample_sequential(zero, s).indices.empty());
    CHECK(sample_thinning(zero, env0, s).indices.empty());
    CHECK(sample_spectral(id, s).size() == 4);
    CHECK(sample_sequential(id, s).size() == 4);
    CHECK(sample_thinning(id, env1, s).size() == 4);
  }
}

TEST_CASE("projection kernels have fixed sample cardinality") {
  const auto k = kernels::build_projection(12, 3, 5);
  const auto env = bernoulli_envelope(k);
  for (uint64_t s = 0; s < 30; ++s) {
    CHECK(sample_spectral(k, s).size() == 3);
    CHECK(sample_sequential(k, s).size() == 3);
    CHECK(sample_thinning(k, env, s).size() == 3);
  }
}

TEST_CASE("samplers are deterministic in the seed") {
  const auto k = kernels::build_random(8, 12);
  const auto env = bernoulli_envelope(k);
  for (uint64_t s : {0ULL, 3ULL, 123456789ULL}) {
    CHECK(sample_spectral(k, s).indices == sample_spectral(k, s).indices);
    CHECK(sample_sequential(k, s).indices == sample_sequential(k, s).indices);
    CHECK(sample_thinning(k, env, s).indices ==
          sample_thinning(k, env, s).indices);
  }
}

TEST_CASE("sampler frequencies track the pmf on the 2x2 kernel") {
  const auto k = test_kernel_2x2();
  const auto env = bernoulli_envelope(k);
  const int draws = 20000;
  for (const std::string algo : {"spectral", "sequential", "thinning"}) {
    int count_first = 0;
    for (int i = 0; i < draws; ++i) {
      const uint64_t s = splitmix64(uint64_t(i) + 17);
      SampleSet x;
      if (algo == "spectral") x = sample_spectral(k, s);
      if (algo == "sequential") x = sample_sequential(k, s);
      if (algo == "thinning") x = sample_thinning(k, env, s);
      if (x.indices == IndexSet{0}) ++count_first;
    }
    const double freq = double(count_first) / draws;
    INFO(algo);
    CHECK(freq == doctest::Approx(0.3125).epsilon(0.05));
  }
}

TEST_CASE("thinning on a diagonal kernel reproduces the Bernoulli draw") {
  // The envelope is tight, so every visited point is accepted.
  const auto k = diag_kernel({0.2, 0.9, 0.5, 0.4});
  const auto env = bernoulli_envelope(k);
  for (uint64_t s = 0; s < 50; ++s) {
    const auto y = sample_thinning(k, env, s);
    for (int idx : y.indices) CHECK(idx >= 0);
    CHECK(std::is_sorted(y.indices.begin(), y.indices.end()));
  }
}

TEST_CASE("conditional state matches direct formulas step by step") {
  const auto k = kernels::build_random(6, 21);
  ConditionalState st(k.matrix);
  IndexSet a, b;
  // Interleave accepts and excludes, comparing against the direct formula.
  const std::vector<std::pair<int, bool>> script = {
      {0, false}, {1, true}, {2, false}, {3, true}, {4, false}, {5, true}};
  for (auto [pt, accept] : script) {
    const double p = st.inclusion_probability(pt);
    const double ref = conditional_inclusion(k, a, b, pt);
    CHECK(p == doctest::Approx(ref).epsilon(1e-9));
    if (accept) {
      st.accept(pt);
      a.push_back(pt);
    } else {
      st.exclude(pt);
      b.push_back(pt);
    }
  }
  CHECK(st.accepted() == IndexSet{1, 3, 5});
  CHECK(st.excluded_count() == 3);
}

TEST_CASE("kernel permutation relabels the ground set") {
  const auto k = kernels::build_random(5, 44);
  const auto order = diag_ascending_order(k);
  const auto kp = permute_kernel(k, order);
  for (int i = 1; i < 5; ++i)
    CHECK(kp.matrix(i, i).real() >= kp.matrix(i - 1, i - 1).real());
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(kp.matrix(i, j) == k.matrix(order[i], order[j]));
}

TEST_CASE("sample serialization round-trip") {
  SampleSet s;
  s.indices = {0, 2, 5};
  s.seed = 42;
  const std::string text = serialize_sample(s, "thinning");
  std::string algo;
  const auto back = parse_sample(text, &algo);
  CHECK(back.indices == s.indices);
  CHECK(back.seed == 42);
  CHECK(algo == "thinning");

  SampleSet empty;
  empty.seed = 7;
  const auto back2 = parse_sample(serialize_sample(empty, "spectral"));
  CHECK(back2.indices.empty());
  CHECK(back2.seed == 7);
}
