#include "dictphase/measure.hpp"

#include <algorithm>
#include <vector>

#include "dictphase/errors.hpp"
#include "dictphase/linalg.hpp"
#include "dictphase/rng.hpp"

namespace dictphase {

MeasurementEnsemble::MeasurementEnsemble(Eigen::MatrixXd a, std::uint64_t seed)
    : a_(std::move(a)), seed_(seed) {
  if (!a_.allFinite()) throw DomainError("ensemble entries must be finite");
}

MeasurementEnsemble MeasurementEnsemble::scaled(double factor) const {
  return MeasurementEnsemble(a_ * factor, seed_);
}

void PhaselessObservation::validate() const {
  if (noise_budget < 0.0) throw DomainError("noise budget must be nonnegative");
  if (!magnitudes.allFinite() || (magnitudes.array() < 0.0).any())
    throw DomainError("magnitudes must be finite and nonnegative");
}

MeasurementEnsemble gaussian_ensemble(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DomainError("gaussian_ensemble: need m, n >= 1");
  RandomStream rng(seed, Stream::kEnsemble);
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return MeasurementEnsemble(std::move(a), seed);
}

Eigen::VectorXd phaseless_forward(const MeasurementEnsemble& a, const Eigen::VectorXd& x) {
  if (x.size() != a.cols()) throw ShapeError("phaseless_forward: x must have length n");
  return (a.matrix() * x).cwiseAbs();
}

PhaselessObservation add_bounded_noise(const Eigen::VectorXd& b, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0)) throw DomainError("add_bounded_noise: eps must be nonnegative");
  PhaselessObservation obs;
  obs.noise_budget = eps;
  obs.seed = seed;
  obs.generator_version = std::string(kGeneratorVersion);
  obs.magnitudes = b;
  if (eps == 0.0 || b.size() == 0) return obs;

  RandomStream rng(seed, Stream::kNoise);
  Eigen::VectorXd dir(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) dir(i) = rng.normal();
  const double radius = eps * rng.uniform();
  Eigen::VectorXd e = dir * (radius / dir.norm());

  // Clipping toward zero only shrinks |observed - b| entrywise, but rounding in
  // b + e can still nudge the norm above eps; shrink and retry until it holds.
  for (int attempt = 0; attempt < 64; ++attempt) {
    obs.magnitudes = (b + e).cwiseMax(0.0);
    if ((obs.magnitudes - b).norm() <= eps) return obs;
    e *= 1.0 - 1e-12 * (attempt + 1);
  }
  obs.magnitudes = b;
  return obs;
}

MeasurementEnsemble row_restrict(const MeasurementEnsemble& a, std::span<const int> t) {
  std::vector<int> rows(t.begin(), t.end());
  std::sort(rows.begin(), rows.end());
  if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw ShapeError("row_restrict: repeated row index");
  return MeasurementEnsemble(select_rows(a.matrix(), rows), a.seed());
}

}  // namespace dictphase
