#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "dictphase/certify.hpp"
#include "dictphase/frames.hpp"
#include "dictphase/harness.hpp"
#include "dictphase/measure.hpp"
#include "dictphase/nsp.hpp"
#include "dictphase/solver.hpp"

namespace dictphase {

using Json = nlohmann::json;

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);

// {n, N, field, data (row-major; complex entries as [re, im]), tight}
Json frame_to_json(const Frame& frame);
Frame frame_from_json(const Json& j);

// Same layout as a frame, n = rows, N = columns, plus seed.
Json ensemble_to_json(const MeasurementEnsemble& a);
MeasurementEnsemble ensemble_from_json(const Json& j);

Json observation_to_json(const PhaselessObservation& obs);
PhaselessObservation observation_from_json(const Json& j);

Json recovery_to_json(const RecoveryResult& r);
Json oracle_to_json(const OracleResult& r);

// Missing fields keep their defaults; unknown fields are rejected.
Json solver_config_to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const Json& j);
Json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j);

Json drip_to_json(const DripReport& r);
Json sdrip_to_json(const SdripReport& r);
Json nsp_to_json(const NspVerdict& v);
Json constants_to_json(const StabilityConstants& c);
Json audit_to_json(const AuditReport& r);
Json summary_to_json(const std::vector<CellSummary>& cells);

// Fixed columns, floats as %.17g, no timing data.
void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records,
                       const AuditReport* audit = nullptr);
void write_timings_csv(std::ostream& os, const std::vector<TrialRecord>& records);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace dictphase
