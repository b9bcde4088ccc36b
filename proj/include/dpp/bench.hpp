#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dpp/kernels.hpp"

namespace dpp::bench {

// Target-cardinality rule: "constant:<c>" or "proportional:<p>" (fraction
// of the ground-set size).
struct CardMode {
  bool proportional = false;
  double value = 20.0;

  double target(int n) const { return proportional ? value * n : value; }
  static CardMode parse(const std::string& text);
};

struct BenchOptions {
  std::vector<std::string> models = {"random", "ginibre", "patch", "projection"};
  std::vector<int> sizes = {100};
  CardMode card_mode;
  std::vector<std::string> algos = {"spectral", "sequential", "thinning"};
  int reps = 3;
  uint64_t seed = 0;
  int max_n = 6000;       // out-of-memory guard
  bool warmup = true;     // one unreported warm-up rep per configuration
};

struct StepTime {
  std::string step;
  double wall_ms = 0.0;
};

struct BenchRecord {
  std::string model;
  std::string algo;
  int n = 0;
  double target_card = 0.0;
  int rep = 0;
  uint64_t seed = 0;
  int sample_card = 0;
  std::vector<StepTime> steps;  // per-step entries plus "total"

  double step_ms(const std::string& name) const;
  double total_ms() const { return step_ms("total"); }
};

// Builds the model kernel calibrated to the target expected cardinality.
// For the projection model the target is rounded to the rank.
kernels::KernelMatrix build_bench_kernel(const std::string& model, int n,
                                         double target, uint64_t seed);

// One warm-up repetition per (model, size, algo) runs first and is not
// reported. Repetitions execute sequentially on the calling thread.
std::vector<BenchRecord> run_bench(const BenchOptions& opt,
                                   std::ostream* progress = nullptr);

// CSV columns: model,algo,n,target_card,rep,seed,step,wall_ms,sample_card
// with a "# dpp-bench v1" version comment on top.
void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);

}  // namespace dpp::bench
