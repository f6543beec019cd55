#pragma once

#include <vector>

#include "riskplan/raster.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {

inline constexpr int kLargeKernel = 151;
inline constexpr int kSmallKernel = 121;

struct MaskGenConfig {
  std::vector<ClassId> marker_ids;
  std::vector<ClassId> building_ids;
  int kernel_size = kLargeKernel;

  /// Markers = "road_marker", buildings = "building".
  static MaskGenConfig ForTaxonomy(const ClassTaxonomy& taxonomy,
                                   int kernel_size = kLargeKernel);
};

void validate_config(const MaskGenConfig& cfg, const ClassTaxonomy& taxonomy);

/// Bit set iff the pixel's label is one of `ids`.
BinaryMask extract_class_mask(const LabelGrid& grid, const std::vector<ClassId>& ids);

/// Square (Chebyshev) dilation with an odd kernel anchored at its center.
/// The kernel is clipped at the image border. Computed as two sliding-window
/// passes, one per axis.
BinaryMask dilate_square(const BinaryMask& mask, int kernel_size);

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);

/// Occlusion mask: building pixels within (k-1)/2 Chebyshev distance of a
/// road-marker pixel.
BinaryMask generate_occlusion_mask(const LabelGrid& grid, const MaskGenConfig& cfg);

}  // namespace riskplan
