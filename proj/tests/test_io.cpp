#include <gtest/gtest.h>

#include <sstream>

#include "dictphase/io.hpp"
#include "test_util.hpp"

using namespace dictphase;

TEST(Io, FrameRoundTrip) {
  const Frame f = make_random_tight_frame(3, 5, 2);
  const Json j = frame_to_json(f);
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["N"], 5);
  EXPECT_EQ(j["field"], "real");
  const Frame g = frame_from_json(Json::parse(j.dump()));
  EXPECT_EQ(g.real_matrix(), f.real_matrix());
  EXPECT_TRUE(g.tight());
}

TEST(Io, ComplexFrameRoundTrip) {
  Eigen::MatrixXcd d(1, 2);
  d << std::complex<double>(0.6, 0.0), std::complex<double>(0.0, 0.8);
  const Frame f(d, true);
  const Frame g = frame_from_json(frame_to_json(f));
  EXPECT_FALSE(g.is_real());
  EXPECT_EQ(g.complex_matrix(), d);
}

TEST(Io, FrameRejectsBadInput) {
  Json j = frame_to_json(make_identity_frame(2));
  j["extra"] = 1;
  EXPECT_THROW(frame_from_json(j), DomainError);
  j = frame_to_json(make_identity_frame(2));
  j["data"].erase(0);
  EXPECT_THROW(frame_from_json(j), ShapeError);
}

TEST(Io, EnsembleAndObservationRoundTrip) {
  const auto a = gaussian_ensemble(4, 3, 77);
  const auto b = ensemble_from_json(Json::parse(ensemble_to_json(a).dump()));
  EXPECT_EQ(b.matrix(), a.matrix());
  EXPECT_EQ(b.seed(), 77u);

  PhaselessObservation obs = add_bounded_noise(Eigen::Vector3d(1, 2, 3), 0.1, 4);
  obs.truth = Eigen::Vector2d(1, -1);
  const auto back = observation_from_json(Json::parse(observation_to_json(obs).dump()));
  EXPECT_EQ(back.magnitudes, obs.magnitudes);
  EXPECT_EQ(back.noise_budget, 0.1);
  EXPECT_EQ(back.generator_version, obs.generator_version);
  ASSERT_TRUE(back.truth.has_value());
  EXPECT_EQ(*back.truth, *obs.truth);
}

TEST(Io, ObservationRejectsNegativeMagnitudes) {
  EXPECT_THROW(observation_from_json(Json{{"b", {1.0, -1.0}}, {"eps", 0.0}}), DomainError);
}

TEST(Io, ConfigRoundTrip) {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.big_n = 9;
  cfg.k = 1;
  cfg.m_grid = {8, 24};
  cfg.eps_grid = {0.0, 0.05};
  cfg.trials = 4;
  cfg.seed = 123456789012345ull;
  cfg.solver.restarts = 3;
  cfg.solver.flow_step = 1.5;
  cfg.audit.enabled = true;
  const ExperimentConfig back = experiment_config_from_json(Json::parse(experiment_config_to_json(cfg).dump()));
  EXPECT_EQ(experiment_config_to_json(back), experiment_config_to_json(cfg));
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.solver.restarts, 3);
  EXPECT_TRUE(back.audit.enabled);
}

TEST(Io, ConfigRejectsUnknownFields) {
  Json j = {{"n", 4}, {"N", 6}, {"k", 1}, {"m_grid", {8}}, {"bogus", true}};
  EXPECT_THROW(experiment_config_from_json(j), DomainError);
  j.erase("bogus");
  EXPECT_NO_THROW(experiment_config_from_json(j));
  j["solver"] = {{"restart", 2}};
  EXPECT_THROW(experiment_config_from_json(j), DomainError);
  j["solver"] = {{"restarts", 0}};
  EXPECT_THROW(experiment_config_from_json(j), DomainError);
}

TEST(Io, RecordsCsvIsFixedAndFullPrecision) {
  TrialRecord r;
  r.n = 4;
  r.big_n = 6;
  r.k = 1;
  r.m = 8;
  r.eps = 0.1;
  r.error = 1.0 / 3.0;
  r.runtime_seconds = 42.0;
  std::ostringstream os;
  write_records_csv(os, {r});
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')),
            "n,N,k,m,eps,trial,solver_seed,x0_norm,sigma_k,error,objective,objective_truth,residual,"
            "converged,success,inner_iters,outer_iters,bound,audit_status");
  EXPECT_NE(s.find("0.33333333333333331"), std::string::npos);
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_EQ(s.find("42"), std::string::npos);
  std::ostringstream ts;
  write_timings_csv(ts, {r});
  EXPECT_NE(ts.str().find("42"), std::string::npos);
}

TEST(Io, ReportsSerialize) {
  const auto a = testutil::scaled_gaussian(6, 3, 1);
  const Frame f = make_random_tight_frame(3, 4, 1);
  const Json d = drip_to_json(drip_exact(a, f, 1));
  EXPECT_EQ(d["method"], "exact");
  EXPECT_EQ(d["supports_checked"], 4);
  const Json s = sdrip_to_json(sdrip_montecarlo(a, f, 1, 0, 1));
  EXPECT_EQ(s["method"], "inconclusive");
  EXPECT_TRUE(s["theta_minus"].is_null());
  const Json c = constants_to_json(stability_constants(0.0, 2.0));
  EXPECT_EQ(c["c2"], 1.0);
}

TEST(Io, MissingFileIsReported) {
  EXPECT_THROW(read_json_file("/nonexistent/config.json"), DomainError);
}
