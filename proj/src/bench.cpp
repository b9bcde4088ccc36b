#include "dpp/bench.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "dpp/patches.hpp"
#include "dpp/samplers.hpp"

namespace dpp::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

CardMode CardMode::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ContractError("card mode must be 'constant:<c>' or 'proportional:<p>'");
  const std::string kind = text.substr(0, colon);
  CardMode m;
  m.value = std::stod(text.substr(colon + 1));
  if (kind == "constant")
    m.proportional = false;
  else if (kind == "proportional")
    m.proportional = true;
  else
    throw ContractError("unknown card mode '" + kind + "'");
  if (m.value <= 0.0) throw ContractError("card mode value must be > 0");
  return m;
}

double BenchRecord::step_ms(const std::string& name) const {
  for (const auto& s : steps)
    if (s.step == name) return s.wall_ms;
  throw ContractError("bench record has no step '" + name + "'");
}

kernels::KernelMatrix build_bench_kernel(const std::string& model, int n,
                                         double target, uint64_t seed) {
  if (model == "random") {
    auto k0 = kernels::build_random(n, seed);
    return kernels::calibrated_kernel(kernels::l_from_k(k0), target);
  }
  if (model == "ginibre") {
    return kernels::calibrated_kernel(kernels::build_ginibre(n), target);
  }
  if (model == "patch") {
    // Patches from a deterministic texture sized so n positions exist.
    const int w = 8;
    int side = 128;
    while (int64_t(side - w + 1) * (side - w + 1) < n) side += 32;
    const auto img = patches::synthetic_texture(side, side, seed);
    const auto ps = patches::extract_patches(img, w, n, seed + 1);
    const double s = patches::median_bandwidth(ps, 10000, seed + 2);
    return kernels::calibrated_kernel(kernels::build_patch_gaussian(ps.vectors, s),
                                      target);
  }
  if (model == "projection") {
    const int rank = std::max(1, int(std::lround(target)));
    return kernels::build_projection(n, rank, seed);
  }
  throw ContractError("unknown kernel model '" + model + "'");
}

namespace {

BenchRecord run_one(const kernels::KernelMatrix& k, const std::string& model,
                    const std::string& algo, int n, double target, int rep,
                    uint64_t seed) {
  BenchRecord rec;
  rec.model = model;
  rec.algo = algo;
  rec.n = n;
  rec.target_card = target;
  rec.rep = rep;
  rec.seed = seed;

  const auto t_total = Clock::now();
  if (algo == "spectral") {
    auto t0 = Clock::now();
    const auto eig = numerics::herm_eigendecomposition(k.matrix);
    rec.steps.push_back({"eigendecomposition", ms_since(t0)});

    Rng rng(seed);
    t0 = Clock::now();
    const auto active = samplers::select_frequencies(eig, rng);
    rec.steps.push_back({"frequency_selection", ms_since(t0)});

    t0 = Clock::now();
    const auto s = samplers::spectral_draw(eig, active, rng, seed);
    rec.steps.push_back({"sequential_draw", ms_since(t0)});
    rec.sample_card = s.size();
  } else if (algo == "thinning") {
    auto t0 = Clock::now();
    const auto env = samplers::bernoulli_envelope(k);
    rec.steps.push_back({"envelope_preprocess", ms_since(t0)});

    Rng rng(seed);
    t0 = Clock::now();
    const auto x = samplers::sample_bernoulli(env.q, rng, seed);
    rec.steps.push_back({"bernoulli_draw", ms_since(t0)});

    t0 = Clock::now();
    const auto s = samplers::thinning_pass(k, env, x, rng, seed);
    rec.steps.push_back({"sequential_thinning", ms_since(t0)});
    rec.sample_card = s.size();
  } else if (algo == "sequential") {
    const auto s = samplers::sample_sequential(k, seed);
    rec.sample_card = s.size();
  } else {
    throw ContractError("unknown algorithm '" + algo + "'");
  }
  rec.steps.push_back({"total", ms_since(t_total)});
  return rec;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchOptions& opt,
                                   std::ostream* progress) {
  std::vector<BenchRecord> records;
  uint64_t invocation = 0;
  for (const auto& model : opt.models) {
    for (int n : opt.sizes) {
      if (n > opt.max_n)
        throw ContractError("bench: n=" + std::to_string(n) +
                            " exceeds the configured cap " +
                            std::to_string(opt.max_n));
      const double target = opt.card_mode.target(n);
      if (progress)
        *progress << "# building " << model << " n=" << n
                  << " target=" << target << "\n"
                  << std::flush;
      const auto kernel = build_bench_kernel(model, n, target, opt.seed);
      for (const auto& algo : opt.algos) {
        for (int rep = opt.warmup ? 0 : 1; rep <= opt.reps; ++rep) {
          const uint64_t seed =
              splitmix64(opt.seed ^ splitmix64(invocation++));
          auto rec = run_one(kernel, model, algo, n, target, rep, seed);
          if (rep == 0) continue;  // warm-up excluded
          rec.rep = rep;
          if (progress)
            *progress << "# " << model << ' ' << algo << " n=" << n << " rep="
                      << rep << " total_ms=" << rec.total_ms() << "\n"
                      << std::flush;
          records.push_back(std::move(rec));
        }
      }
    }
  }
  return records;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "# dpp-bench v1\n";
  os << "model,algo,n,target_card,rep,seed,step,wall_ms,sample_card\n";
  for (const auto& r : records)
    for (const auto& s : r.steps)
      os << r.model << ',' << r.algo << ',' << r.n << ',' << r.target_card
         << ',' << r.rep << ',' << r.seed << ',' << s.step << ',' << s.wall_ms
         << ',' << r.sample_card << '\n';
}

}  // namespace dpp::bench
