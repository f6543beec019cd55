#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "riskplan/planner.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {

/// Mean of (c_true - c_pred) over the entered pixels of `path`. A path with
/// no entered pixels has surprise 0.
double surprise(const PlannedPath& path, const CostMap& c_true, const CostMap& c_pred);

struct EvaluationProtocol {
  std::vector<Pixel> waypoints;
  std::vector<double> lambdas;
};

struct SurpriseRow {
  double lambda = 0.0;
  int pair_id = 0;
  Pixel start;
  Pixel goal;
  /// Pixels on the path, start and goal included.
  int path_len = 0;
  /// Cost of the path on the lambda-weighted predicted cost map.
  double path_cost = 0.0;
  double surprise = 0.0;

  friend bool operator==(const SurpriseRow&, const SurpriseRow&) = default;
};

struct SurpriseAggregate {
  double lambda = 0.0;
  int pairs = 0;
  double mean = 0.0;
  /// Population variance over pairs.
  double variance = 0.0;

  friend bool operator==(const SurpriseAggregate&, const SurpriseAggregate&) = default;
};

struct SurpriseReport {
  std::vector<SurpriseRow> rows;
  std::vector<SurpriseAggregate> aggregates;

  const SurpriseAggregate& aggregate_for(double lambda) const;

  friend bool operator==(const SurpriseReport&, const SurpriseReport&) = default;
};

/// Unordered waypoint pairs (i < j) in lexicographic order.
std::vector<std::pair<Pixel, Pixel>> enumerate_pairs(const std::vector<Pixel>& waypoints);

/// Plans a -> b and b -> a, returning the cheaper (a -> b on ties).
PlannedPath plan_pair(const CostMap& cost, Pixel a, Pixel b, const PlannerConfig& cfg);

/// For every lambda and every unordered pair: plan on the predicted labels
/// with lambda-weighted uncertainty (both directions, keeping the cheaper,
/// forward on ties) and score surprise against the class-cost maps of the
/// truth and predicted labels. `planner.lambda` is ignored; the protocol's
/// lambdas are used instead. Lambdas are evaluated concurrently.
SurpriseReport evaluate_protocol(const LabelGrid& truth_labels,
                                 const LabelGrid& predicted_labels,
                                 const UncertaintyMap& uncertainty,
                                 const EvaluationProtocol& protocol,
                                 const PlannerConfig& planner);

/// Per-lambda mean and population variance, in first-appearance order of
/// lambda in `rows`.
std::vector<SurpriseAggregate> aggregate_rows(const std::vector<SurpriseRow>& rows);

// Report files. CSV columns: lambda,pair_id,start,goal,path_len,path_cost,surprise
// with pixels written as "row:col" and reals as shortest round-trip decimals.

std::string report_to_csv(const SurpriseReport& report);
/// Parses rows and recomputes aggregates.
SurpriseReport report_from_csv(const std::string& csv);
std::string report_to_json(const SurpriseReport& report);
SurpriseReport report_from_json(const std::string& json);

}  // namespace riskplan
