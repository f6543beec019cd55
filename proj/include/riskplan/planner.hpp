#pragma once

#include "riskplan/raster.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {

struct PlannerConfig {
  /// Risk-aversion weight on uncertainty.
  double lambda = 0.0;
  /// 4 or 8.
  int connectivity = 8;
  /// Multiplier on the entered pixel's cost for diagonal moves.
  double diagonal_scale = 1.0;
};

void validate_config(const PlannerConfig& cfg);

/// Per-pixel cost  C(label) + lambda * uncert.
CostMap build_cost_map(const LabelGrid& labels, const UncertaintyMap& uncert,
                       const ClassTaxonomy& taxonomy, double lambda);

/// Pure class-cost raster (lambda = 0, no uncertainty term).
CostMap class_cost_map(const LabelGrid& labels);

/// Minimum-cost path under entered-pixel semantics: each move costs the
/// entered pixel's value (times diagonal_scale on diagonal moves); the start
/// pixel is free.
///
/// A* with h(p) = c_min * D(p, goal), where c_min is the smallest value in
/// the cost map and D is Manhattan (4-connected) or Chebyshev (8-connected)
/// distance. The heuristic is consistent, so the result is optimal. The open
/// list orders by f, then h, then row-major index.
PlannedPath plan(const CostMap& cost, Pixel start, Pixel goal, const PlannerConfig& cfg);

/// As above, additionally filling PlannedPath::uncertainty_sum.
PlannedPath plan(const CostMap& cost, const UncertaintyMap& uncert, Pixel start, Pixel goal,
                 const PlannerConfig& cfg);

/// Sum of `uncert` over entered pixels.
double path_uncertainty_sum(const PlannedPath& path, const UncertaintyMap& uncert);

}  // namespace riskplan
