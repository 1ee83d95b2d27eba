#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dictphase/frames.hpp"
#include "dictphase/measure.hpp"

namespace dictphase {

enum class DripMethod { kExact, kMonteCarloLowerBound };

struct DripReport {
  int order = 0;
  double delta = 0.0;
  double lambda_min = 1.0;  // extreme Rayleigh quotients over all supports
  double lambda_max = 1.0;
  DripMethod method = DripMethod::kExact;
  std::uint64_t supports_checked = 0;
  std::vector<int> argmax_support;  // support attaining delta
};

// delta_k = max over |T| = min(k, N) of max(1 - lambda_min, lambda_max - 1)
// where lambda ranges over ||A D_T w||^2 / ||D_T w||^2 with D_T w != 0.
// Throws BudgetError when binomial(N, k) exceeds the budget.
DripReport drip_exact(const MeasurementEnsemble& a, const Frame& frame, int k,
                      std::uint64_t budget = kDefaultBudget);

// Same quotient at random k-sparse z; a lower bound on the exact delta.
DripReport drip_montecarlo(const MeasurementEnsemble& a, const Frame& frame, int k, int trials,
                           std::uint64_t seed);

enum class SdripMethod { kExact, kMonteCarlo, kInconclusive };

struct SdripReport {
  int order = 0;
  double theta_minus = 0.0;
  double theta_plus = 0.0;
  bool satisfied = false;
  SdripMethod method = SdripMethod::kExact;
  std::uint64_t subsets_checked = 0;
  std::vector<int> extreme_subset;  // row subset attaining theta_minus
  std::vector<int> extreme_support;
  std::optional<std::vector<int>> witness_subset;  // set when not satisfied
};

// theta_plus from I = [m], theta_minus from every |I| = ceil(m/2); adding
// rows can only increase ||A_I x||, so these are the extremes over |I| >= m/2.
// Satisfied iff 0 < theta_minus <= theta_plus < 2.
SdripReport sdrip_exact(const MeasurementEnsemble& a, const Frame& frame, int k,
                        std::uint64_t budget = kDefaultBudget);

// Sampled envelope: the exact interval [theta_minus, theta_plus] contains the
// reported one. trials == 0 gives an inconclusive report.
SdripReport sdrip_montecarlo(const MeasurementEnsemble& a, const Frame& frame, int k, int trials,
                             std::uint64_t seed);

// max(1 / (2 theta_minus - theta_minus^2), 1 / (2 theta_plus - theta_plus^2))
double admissible_t(double theta_minus, double theta_plus);

struct StabilityConstants {
  double t = 0.0;
  double delta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

// Requires t > 1 and 0 <= delta < sqrt((t - 1) / t).
StabilityConstants stability_constants(double delta, double t);

// c1 eps + c2 (2 sigma + rho) / sqrt(k)
double error_bound(const StabilityConstants& c, double eps, double sigma, int k, double rho);

}  // namespace dictphase
