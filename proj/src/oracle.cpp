#include "dpp/oracle.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <numeric>
#include <ostream>

#include "dpp/samplers.hpp"

namespace dpp::oracle {

namespace {

void check_capacity(int n) {
  if (n < 0 || n > kMaxEnumerationN)
    throw ContractError("oracle: n must be in [0, " +
                        std::to_string(kMaxEnumerationN) + "]");
}

IndexSet mask_to_set(uint32_t mask) {
  IndexSet s;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) s.push_back(i);
  return s;
}

}  // namespace

SubsetDistribution enumerate_distribution(const kernels::KernelMatrix& k) {
  check_capacity(k.n());
  SubsetDistribution d;
  d.n = k.n();
  d.probabilities.resize(d.size());
  double sum = 0.0;
  for (uint32_t mask = 0; mask < d.size(); ++mask) {
    const double p = samplers::dpp_probability(k, mask_to_set(mask));
    d.probabilities[mask] = p;
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw NumericalError("enumerate_distribution: pmf sums to " +
                         std::to_string(sum));
  return d;
}

std::vector<double> zeta_transform(const std::vector<double>& f, int n,
                                   MobiusDirection direction) {
  check_capacity(n);
  if (f.size() != (size_t(1) << n))
    throw ContractError("zeta_transform: length must be 2^n");
  std::vector<double> g = f;
  for (int bit = 0; bit < n; ++bit) {
    const uint32_t b = uint32_t(1) << bit;
    for (uint32_t mask = 0; mask < g.size(); ++mask) {
      if (direction == MobiusDirection::kSuperset) {
        if (!(mask & b)) g[mask] += g[mask | b];
      } else {
        if (mask & b) g[mask] += g[mask ^ b];
      }
    }
  }
  return g;
}

std::vector<double> mobius_invert(const std::vector<double>& g, int n,
                                  MobiusDirection direction) {
  check_capacity(n);
  if (g.size() != (size_t(1) << n))
    throw ContractError("mobius_invert: length must be 2^n");
  std::vector<double> f = g;
  for (int bit = 0; bit < n; ++bit) {
    const uint32_t b = uint32_t(1) << bit;
    for (uint32_t mask = 0; mask < f.size(); ++mask) {
      if (direction == MobiusDirection::kSuperset) {
        if (!(mask & b)) f[mask] -= f[mask | b];
      } else {
        if (mask & b) f[mask] -= f[mask ^ b];
      }
    }
  }
  return f;
}

SubsetDistribution empirical_distribution(const std::vector<SampleSet>& draws,
                                          int n) {
  check_capacity(n);
  SubsetDistribution d;
  d.n = n;
  d.probabilities.assign(size_t(1) << n, 0.0);
  const double w = draws.empty() ? 0.0 : 1.0 / double(draws.size());
  for (const auto& s : draws) {
    uint32_t mask = 0;
    for (int i : s.indices) {
      if (i < 0 || i >= n)
        throw ContractError("empirical_distribution: index out of range");
      mask |= uint32_t(1) << i;
    }
    d.probabilities[mask] += w;
  }
  return d;
}

double total_variation(const SubsetDistribution& p, const SubsetDistribution& q) {
  if (p.n != q.n) throw ContractError("total_variation: size mismatch");
  double acc = 0.0;
  for (uint32_t mask = 0; mask < p.size(); ++mask)
    acc += std::abs(p[mask] - q[mask]);
  return 0.5 * acc;
}

ChiSquare chi_square_stat(const std::vector<uint64_t>& observed,
                          const SubsetDistribution& expected, uint64_t total) {
  if (observed.size() != expected.probabilities.size())
    throw ContractError("chi_square_stat: size mismatch");
  const double threshold = 5.0 / double(total);

  double stat = 0.0;
  int cells = 0;
  double pooled_expected = 0.0;
  uint64_t pooled_observed = 0;
  for (uint32_t mask = 0; mask < expected.size(); ++mask) {
    const double pe = expected[mask];
    if (pe >= threshold) {
      const double e = pe * double(total);
      const double diff = double(observed[mask]) - e;
      stat += diff * diff / e;
      ++cells;
    } else {
      pooled_expected += pe;
      pooled_observed += observed[mask];
    }
  }
  if (pooled_expected * double(total) >= 1e-12) {
    const double e = pooled_expected * double(total);
    const double diff = double(pooled_observed) - e;
    stat += diff * diff / e;
    ++cells;
  }
  ChiSquare out;
  out.statistic = stat;
  out.degrees_of_freedom = std::max(cells - 1, 1);
  boost::math::chi_squared dist(out.degrees_of_freedom);
  out.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  return out;
}

ChiSquare chi_square_two_sample(const std::vector<uint64_t>& a,
                                const std::vector<uint64_t>& b) {
  if (a.size() != b.size())
    throw ContractError("chi_square_two_sample: size mismatch");
  const double na = double(std::accumulate(a.begin(), a.end(), uint64_t(0)));
  const double nb = double(std::accumulate(b.begin(), b.end(), uint64_t(0)));
  if (na == 0.0 || nb == 0.0)
    throw ContractError("chi_square_two_sample: empty sample");

  double stat = 0.0;
  int cells = 0;
  uint64_t pool_a = 0, pool_b = 0;
  auto add_cell = [&](double oa, double ob) {
    const double tot = oa + ob;
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    ++cells;
  };
  for (size_t i = 0; i < a.size(); ++i) {
    const double pooled = double(a[i] + b[i]);
    if (pooled * std::min(na, nb) / (na + nb) >= 5.0) {
      add_cell(double(a[i]), double(b[i]));
    } else {
      pool_a += a[i];
      pool_b += b[i];
    }
  }
  if (pool_a + pool_b > 0) add_cell(double(pool_a), double(pool_b));

  ChiSquare out;
  out.statistic = stat;
  out.degrees_of_freedom = std::max(cells - 1, 1);
  boost::math::chi_squared dist(out.degrees_of_freedom);
  out.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  return out;
}

void write_distribution_csv(std::ostream& os, const SubsetDistribution& d) {
  os << "bitmask,probability\n";
  for (uint32_t mask = 0; mask < d.size(); ++mask)
    os << mask << ',' << d[mask] << '\n';
}

}  // namespace dpp::oracle
