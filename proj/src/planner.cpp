#include "riskplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>

namespace riskplan {

void validate_config(const PlannerConfig& cfg) {
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0.0) {
    throw ValidationError("lambda must be finite and >= 0");
  }
  if (cfg.connectivity != 4 && cfg.connectivity != 8) {
    throw ValidationError("connectivity must be 4 or 8");
  }
  if (!std::isfinite(cfg.diagonal_scale) || cfg.diagonal_scale < 1.0) {
    throw ValidationError("diagonal_scale must be finite and >= 1");
  }
}

CostMap build_cost_map(const LabelGrid& labels, const UncertaintyMap& uncert,
                       const ClassTaxonomy& taxonomy, double lambda) {
  if (!labels.same_shape(uncert)) {
    throw ValidationError("label grid and uncertainty map dimensions differ");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("lambda must be finite and >= 0");
  }
  CostMap out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = taxonomy.cost(labels[i]) + lambda * uncert[i];
  }
  return out;
}

CostMap class_cost_map(const LabelGrid& labels) {
  CostMap out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels.taxonomy().cost(labels[i]);
  return out;
}

namespace {

struct OpenEntry {
  double f;
  double h;
  std::size_t index;
  // Min-heap ordering for std::priority_queue.
  bool operator>(const OpenEntry& o) const {
    return std::tie(f, h, index) > std::tie(o.f, o.h, o.index);
  }
};

}  // namespace

PlannedPath plan(const CostMap& cost, Pixel start, Pixel goal, const PlannerConfig& cfg) {
  validate_config(cfg);
  if (cost.empty()) throw ValidationError("cost map is empty");
  if (!cost.contains(start)) throw ValidationError("start is out of bounds");
  if (!cost.contains(goal)) throw ValidationError("goal is out of bounds");
  require_valid(validate(cost), "cost map");

  if (start == goal) return PlannedPath{{start}, 0.0, 0.0};

  const double c_min = *std::min_element(cost.values().begin(), cost.values().end());
  auto heuristic = [&](Pixel p) {
    const int dr = std::abs(p.row - goal.row);
    const int dc = std::abs(p.col - goal.col);
    return c_min * (cfg.connectivity == 4 ? dr + dc : std::max(dr, dc));
  };

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(cost.size(), inf);
  std::vector<std::size_t> parent(cost.size(), kNone);
  std::vector<std::uint8_t> closed(cost.size(), 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

  const std::size_t s = cost.index(start);
  const std::size_t t = cost.index(goal);
  g[s] = 0.0;
  open.push({heuristic(start), heuristic(start), s});

  static constexpr Pixel kSteps[8] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0},
                                      {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  const int nsteps = cfg.connectivity;

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    if (top.index == t) break;
    const Pixel p = cost.pixel(top.index);
    for (int k = 0; k < nsteps; ++k) {
      const Pixel q{p.row + kSteps[k].row, p.col + kSteps[k].col};
      if (!cost.contains(q)) continue;
      const std::size_t qi = cost.index(q);
      if (closed[qi]) continue;
      const double step = k < 4 ? cost[qi] : cost[qi] * cfg.diagonal_scale;
      const double candidate = g[top.index] + step;
      if (candidate < g[qi]) {
        g[qi] = candidate;
        parent[qi] = top.index;
        const double h = heuristic(q);
        open.push({candidate + h, h, qi});
      }
    }
  }

  PlannedPath path;
  for (std::size_t at = t; at != kNone; at = parent[at]) path.pixels.push_back(cost.pixel(at));
  std::reverse(path.pixels.begin(), path.pixels.end());
  path.total_cost = g[t];
  return path;
}

PlannedPath plan(const CostMap& cost, const UncertaintyMap& uncert, Pixel start, Pixel goal,
                 const PlannerConfig& cfg) {
  if (!cost.same_shape(uncert)) {
    throw ValidationError("cost map and uncertainty map dimensions differ");
  }
  PlannedPath path = plan(cost, start, goal, cfg);
  path.uncertainty_sum = path_uncertainty_sum(path, uncert);
  return path;
}

double path_uncertainty_sum(const PlannedPath& path, const UncertaintyMap& uncert) {
  double sum = 0.0;
  for (std::size_t i = 0; i < path.pixels.size(); ++i) {
    if (!uncert.contains(path.pixels[i])) {
      throw ValidationError("path pixel out of bounds of the uncertainty map");
    }
    if (i > 0) sum += uncert[path.pixels[i]];
  }
  return sum;
}

}  // namespace riskplan
