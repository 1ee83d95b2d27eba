#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace dictphase {

// Dense real m x n sensing matrix A together with the seed it was drawn from.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble(Eigen::MatrixXd a, std::uint64_t seed = 0);

  int rows() const { return static_cast<int>(a_.rows()); }
  int cols() const { return static_cast<int>(a_.cols()); }
  const Eigen::MatrixXd& matrix() const { return a_; }
  std::uint64_t seed() const { return seed_; }

  MeasurementEnsemble scaled(double factor) const;

 private:
  Eigen::MatrixXd a_;
  std::uint64_t seed_;
};

// b = |A x0| + e with ||e||_2 <= noise_budget, b >= 0 entrywise.
struct PhaselessObservation {
  Eigen::VectorXd magnitudes;
  double noise_budget = 0.0;
  std::uint64_t seed = 0;
  std::string generator_version;
  std::optional<Eigen::VectorXd> truth;

  void validate() const;
};

// i.i.d. N(0, 1) entries, row-major draw order, so the first m' rows of an
// m-row draw equal the m'-row draw with the same seed. No 1/sqrt(m) scaling.
MeasurementEnsemble gaussian_ensemble(int m, int n, std::uint64_t seed);

// |<a_j, x>| for every row.
Eigen::VectorXd phaseless_forward(const MeasurementEnsemble& a, const Eigen::VectorXd& x);

// Adds a Gaussian-direction perturbation with radius uniform in [0, eps],
// clips to nonnegative values and re-verifies ||observed - b||_2 <= eps.
PhaselessObservation add_bounded_noise(const Eigen::VectorXd& b, double eps, std::uint64_t seed);

// Rows indexed by t, in ascending order. t must hold distinct in-range rows.
MeasurementEnsemble row_restrict(const MeasurementEnsemble& a, std::span<const int> t);

}  // namespace dictphase
