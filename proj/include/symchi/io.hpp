#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "symchi/montecarlo.hpp"
#include "symchi/pearson.hpp"
#include "symchi/timeseries.hpp"

namespace symchi {

// --- series CSV ------------------------------------------------------------

/// Writes `t,y` rows for t = 1-p..n; simulated samples add `v,z,xi`
/// columns.  Values use shortest round-trip formatting.
void write_series_csv(std::ostream& out, const SeriesSample& sample);
void write_series_csv(const std::filesystem::path& path, const SeriesSample& sample);

/// Reads a series back.  Accepts a single `y` column or `t,y` (optionally
/// with `v,z,xi`); the first `order` rows are the pre-sample values.
/// Throws ParseError naming the offending line.
SeriesSample read_series_csv(const std::filesystem::path& path, int order);

/// Writes the residual vector as a one-column CSV with header `eps_hat`.
void write_residuals_csv(const std::filesystem::path& path, const ResidualSet& res);

// --- partitions ------------------------------------------------------------

/// A partition serializes as a JSON array of its finite boundaries.
nlohmann::json to_json(const Partition& part);
Partition partition_from_json(const nlohmann::json& j);
Partition read_partition_file(const std::filesystem::path& path);

// --- laws and estimators ---------------------------------------------------

nlohmann::json to_json(const OutlierLaw& law);
OutlierLaw outlier_law_from_json(const nlohmann::json& j);

/// Compact CLI syntax: pointmass:5 | normal:0,3 | cauchy:0,1 |
/// uniform:-1,1 | discrete:a1,p1,a2,p2,...
OutlierLaw parse_outlier_law(const std::string& text);

nlohmann::json to_json(const InnovationLaw& law);
InnovationLaw innovation_law_from_json(const nlohmann::json& j);

/// normal:theta | laplace:b | student:df,scale | logistic:s
InnovationLaw parse_innovation_law(const std::string& text);

EstimatorChoice parse_estimator(const std::string& text);  // "huber[:k]" or "ls"

// --- reports and experiment configs ----------------------------------------

nlohmann::json to_json(const TestReport& report);

nlohmann::json to_json(const ArModel& model);
ArModel model_from_json(const nlohmann::json& j);

/// Reads an ExperimentSpec from a JSON config document.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
ExperimentSpec read_experiment_spec(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentResult& result);
nlohmann::json to_json(const ExpansionResult& result);
nlohmann::json to_json(const SweepResult& result);

void write_statistics_csv(const std::filesystem::path& path, const std::vector<double>& stats);
void write_expansion_csv(const std::filesystem::path& path, const ExpansionResult& result);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace symchi
