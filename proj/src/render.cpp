#include "riskplan/render.hpp"

#include <algorithm>
#include <cmath>

namespace riskplan {

ColorImage draw_path(const ColorImage& image, const PlannedPath& path, Rgb color) {
  ColorImage out = image;
  for (const Pixel p : path.pixels) {
    if (out.contains(p)) out[p] = color;
  }
  return out;
}

ColorImage uncertainty_heatmap(const UncertaintyMap& uncert) {
  ColorImage out(uncert.width(), uncert.height());
  for (std::size_t i = 0; i < uncert.size(); ++i) {
    const double t = std::clamp(uncert[i] / 0.25, 0.0, 1.0);
    // sqrt stretches the low end, where most pixels live.
    const double s = std::sqrt(t);
    out[i] = {static_cast<std::uint8_t>(std::lround(255 * s)),
              static_cast<std::uint8_t>(std::lround(255 * 4 * s * (1 - s))),
              static_cast<std::uint8_t>(std::lround(255 * (1 - s)))};
  }
  return out;
}

ColorImage mask_overlay(const ColorImage& image, const BinaryMask& mask) {
  if (!image.same_shape(mask)) throw ValidationError("image and mask dimensions differ");
  ColorImage out = image;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out[i] = {0, 0, 0};
  }
  return out;
}

ColorImage colorize(const LabelGrid& labels) {
  ColorImage out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = labels.taxonomy().info(labels[i]).color;
  }
  return out;
}

}  // namespace riskplan
