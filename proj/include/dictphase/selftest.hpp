#pragma once

#include <cstdint>

#include "dictphase/io.hpp"

namespace dictphase {

struct SelftestOptions {
  int polytope_trials = 1000;
  int power_sum_trials = 100000;
  int lemma_trials = 100;
  std::uint64_t seed = 0;
};

struct SelftestReport {
  int polytope_failures = 0;
  int power_sum_failures = 0;
  int lemma_failures = 0;
  int lemma_refused = 0;
  Json details;

  bool passed() const { return polytope_failures == 0 && power_sum_failures == 0 && lemma_failures == 0; }
};

// Random polytope round trips (support <= 10), premise-satisfying power-sum
// instances for alpha in {1, 1.5, 2, 3}, and the stability lemma on feasible
// perturbations of x0 for n = 6, N = 9, k = 1, m = 24.
SelftestReport run_selftest(const SelftestOptions& opts);

}  // namespace dictphase
