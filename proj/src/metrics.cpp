#include "riskplan/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <sstream>

#include "json.hpp"

namespace riskplan {

double surprise(const PlannedPath& path, const CostMap& c_true, const CostMap& c_pred) {
  if (!c_true.same_shape(c_pred)) {
    throw ValidationError("true and predicted cost maps differ in dimensions");
  }
  if (path.entered() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < path.pixels.size(); ++i) {
    const Pixel p = path.pixels[i];
    if (!c_true.contains(p)) throw ValidationError("path pixel out of bounds");
    if (i > 0) sum += c_true[p] - c_pred[p];
  }
  return sum / static_cast<double>(path.entered());
}

const SurpriseAggregate& SurpriseReport::aggregate_for(double lambda) const {
  for (const auto& a : aggregates) {
    if (a.lambda == lambda) return a;
  }
  throw ValidationError("report has no rows for lambda " + std::to_string(lambda));
}

std::vector<std::pair<Pixel, Pixel>> enumerate_pairs(const std::vector<Pixel>& waypoints) {
  std::vector<std::pair<Pixel, Pixel>> pairs;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    for (std::size_t j = i + 1; j < waypoints.size(); ++j) {
      pairs.emplace_back(waypoints[i], waypoints[j]);
    }
  }
  return pairs;
}

std::vector<SurpriseAggregate> aggregate_rows(const std::vector<SurpriseRow>& rows) {
  std::vector<SurpriseAggregate> out;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SurpriseAggregate& a) { return a.lambda == row.lambda; });
    if (it == out.end()) out.push_back({row.lambda, 0, 0.0, 0.0});
  }
  for (auto& agg : out) {
    double sum = 0.0;
    for (const auto& row : rows) {
      if (row.lambda == agg.lambda) {
        sum += row.surprise;
        ++agg.pairs;
      }
    }
    agg.mean = sum / agg.pairs;
    double sq = 0.0;
    for (const auto& row : rows) {
      if (row.lambda == agg.lambda) sq += (row.surprise - agg.mean) * (row.surprise - agg.mean);
    }
    agg.variance = sq / agg.pairs;
  }
  return out;
}

PlannedPath plan_pair(const CostMap& cost, Pixel a, Pixel b, const PlannerConfig& cfg) {
  PlannedPath forward = plan(cost, a, b, cfg);
  PlannedPath backward = plan(cost, b, a, cfg);
  return backward.total_cost < forward.total_cost ? backward : forward;
}

SurpriseReport evaluate_protocol(const LabelGrid& truth_labels,
                                 const LabelGrid& predicted_labels,
                                 const UncertaintyMap& uncertainty,
                                 const EvaluationProtocol& protocol,
                                 const PlannerConfig& planner) {
  require_valid(validate(truth_labels), "truth labels");
  require_valid(validate(predicted_labels), "predicted labels");
  if (!truth_labels.same_shape(predicted_labels) || !truth_labels.same_shape(uncertainty)) {
    throw ValidationError("truth labels, predicted labels and uncertainty differ in size");
  }
  if (protocol.waypoints.size() < 2) throw ValidationError("protocol needs >= 2 waypoints");
  if (protocol.lambdas.empty()) throw ValidationError("protocol needs at least one lambda");
  for (const Pixel p : protocol.waypoints) {
    if (!truth_labels.contains(p)) throw ValidationError("waypoint out of bounds");
  }
  for (double lambda : protocol.lambdas) {
    validate_config(PlannerConfig{lambda, planner.connectivity, planner.diagonal_scale});
  }

  const CostMap c_true = class_cost_map(truth_labels);
  const CostMap c_pred = class_cost_map(predicted_labels);
  const auto pairs = enumerate_pairs(protocol.waypoints);

  auto run_lambda = [&](double lambda) {
    PlannerConfig cfg = planner;
    cfg.lambda = lambda;
    const CostMap cost =
        build_cost_map(predicted_labels, uncertainty, predicted_labels.taxonomy(), lambda);
    std::vector<SurpriseRow> rows;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [a, b] = pairs[i];
      const PlannedPath best = plan_pair(cost, a, b, cfg);
      rows.push_back({lambda, static_cast<int>(i), a, b,
                      static_cast<int>(best.pixels.size()), best.total_cost,
                      surprise(best, c_true, c_pred)});
    }
    return rows;
  };

  std::vector<std::future<std::vector<SurpriseRow>>> jobs;
  for (double lambda : protocol.lambdas) {
    jobs.push_back(std::async(std::launch::async, run_lambda, lambda));
  }
  SurpriseReport report;
  for (auto& job : jobs) {
    auto rows = job.get();
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

namespace {

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_real(const std::string& s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw IoError("report: bad number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw IoError("report: bad integer '" + s + "'");
  }
  return v;
}

std::string format_pixel(Pixel p) {
  return std::to_string(p.row) + ":" + std::to_string(p.col);
}

Pixel parse_pixel(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw IoError("report: bad pixel '" + s + "'");
  return {parse_int(s.substr(0, colon)), parse_int(s.substr(colon + 1))};
}

constexpr char kCsvHeader[] = "lambda,pair_id,start,goal,path_len,path_cost,surprise";

}  // namespace

std::string report_to_csv(const SurpriseReport& report) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += format_real(r.lambda) + "," + std::to_string(r.pair_id) + "," +
           format_pixel(r.start) + "," + format_pixel(r.goal) + "," +
           std::to_string(r.path_len) + "," + format_real(r.path_cost) + "," +
           format_real(r.surprise) + "\n";
  }
  return out;
}

SurpriseReport report_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IoError("report: unexpected CSV header");
  }
  SurpriseReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw IoError("report: expected 7 columns in '" + line + "'");
    report.rows.push_back({parse_real(cells[0]), parse_int(cells[1]), parse_pixel(cells[2]),
                           parse_pixel(cells[3]), parse_int(cells[4]),
                           parse_real(cells[5]), parse_real(cells[6])});
  }
  report.aggregates = aggregate_rows(report.rows);
  return report;
}

std::string report_to_json(const SurpriseReport& report) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"pair_id", r.pair_id},
                    {"start", {r.start.row, r.start.col}},
                    {"goal", {r.goal.row, r.goal.col}},
                    {"path_len", r.path_len},
                    {"path_cost", r.path_cost},
                    {"surprise", r.surprise}});
  }
  json aggregates = json::array();
  for (const auto& a : report.aggregates) {
    aggregates.push_back(
        {{"lambda", a.lambda}, {"pairs", a.pairs}, {"mean", a.mean}, {"variance", a.variance}});
  }
  return json{{"summary", aggregates}, {"rows", rows}}.dump(2) + "\n";
}

SurpriseReport report_from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    SurpriseReport report;
    for (const auto& r : doc.at("rows")) {
      report.rows.push_back({r.at("lambda").get<double>(), r.at("pair_id").get<int>(),
                             {r.at("start").at(0).get<int>(), r.at("start").at(1).get<int>()},
                             {r.at("goal").at(0).get<int>(), r.at("goal").at(1).get<int>()},
                             r.at("path_len").get<int>(), r.at("path_cost").get<double>(),
                             r.at("surprise").get<double>()});
    }
    for (const auto& a : doc.at("summary")) {
      report.aggregates.push_back({a.at("lambda").get<double>(), a.at("pairs").get<int>(),
                                   a.at("mean").get<double>(), a.at("variance").get<double>()});
    }
    return report;
  } catch (const json::exception& e) {
    throw IoError(std::string("report JSON: ") + e.what());
  }
}

}  // namespace riskplan
