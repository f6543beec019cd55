#pragma once

#include "riskplan/raster.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {

/// Copy of `image` with the path's pixels painted `color`.
ColorImage draw_path(const ColorImage& image, const PlannedPath& path, Rgb color);

/// Uncertainty as a blue-to-red ramp over [0, 0.25].
ColorImage uncertainty_heatmap(const UncertaintyMap& uncert);

/// Masked pixels blacked out over `image`.
ColorImage mask_overlay(const ColorImage& image, const BinaryMask& mask);

/// Label grid painted in the taxonomy's display colors.
ColorImage colorize(const LabelGrid& labels);

}  // namespace riskplan
