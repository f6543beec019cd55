#include "riskplan/mask_gen.hpp"

#include <algorithm>
#include <array>

namespace riskplan {

MaskGenConfig MaskGenConfig::ForTaxonomy(const ClassTaxonomy& taxonomy,
                                         int kernel_size) {
  return {{taxonomy.require("road_marker")}, {taxonomy.require("building")}, kernel_size};
}

void validate_config(const MaskGenConfig& cfg, const ClassTaxonomy& taxonomy) {
  if (cfg.kernel_size < 1 || cfg.kernel_size % 2 == 0) {
    throw ValidationError("kernel size must be odd and >= 1, got " +
                          std::to_string(cfg.kernel_size));
  }
  if (cfg.marker_ids.empty()) throw ValidationError("no road-marker classes configured");
  if (cfg.building_ids.empty()) throw ValidationError("no building classes configured");
  for (const auto* ids : {&cfg.marker_ids, &cfg.building_ids}) {
    for (ClassId id : *ids) {
      if (!taxonomy.contains(id)) {
        throw ValidationError("unknown class id " + std::to_string(id));
      }
    }
  }
}

BinaryMask extract_class_mask(const LabelGrid& grid, const std::vector<ClassId>& ids) {
  require_valid(validate(grid), "label grid");
  std::array<bool, 256> wanted{};
  for (ClassId id : ids) {
    if (!grid.taxonomy().contains(id)) {
      throw ValidationError("unknown class id " + std::to_string(id));
    }
    wanted[id] = true;
  }
  BinaryMask out(grid.width(), grid.height());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = wanted[grid[i]] ? 1 : 0;
  return out;
}

namespace {

// One-dimensional max filter of radius `r` over `n` strided elements, using a
// running count of set bits in the clipped window.
void dilate_line(const std::uint8_t* in, std::uint8_t* out, int n, std::size_t stride,
                 int r) {
  int count = 0;
  // Window for position i covers [i - r, i + r] clipped to [0, n).
  for (int j = 0; j < std::min(r, n); ++j) count += in[j * stride];
  for (int i = 0; i < n; ++i) {
    const int enter = i + r;
    const int leave = i - r - 1;
    if (enter < n) count += in[enter * stride];
    if (leave >= 0) count -= in[leave * stride];
    out[i * stride] = count > 0 ? 1 : 0;
  }
}

}  // namespace

BinaryMask dilate_square(const BinaryMask& mask, int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw ValidationError("kernel size must be odd and >= 1, got " +
                          std::to_string(kernel_size));
  }
  require_valid(validate(mask), "mask");
  if (kernel_size == 1) return mask;
  const int r = (kernel_size - 1) / 2;
  const int w = mask.width();
  const int h = mask.height();

  BinaryMask rows(w, h);
  for (int y = 0; y < h; ++y) {
    dilate_line(mask.values().data() + static_cast<std::size_t>(y) * w,
                rows.values().data() + static_cast<std::size_t>(y) * w, w, 1, r);
  }
  BinaryMask out(w, h);
  for (int x = 0; x < w; ++x) {
    dilate_line(rows.values().data() + x, out.values().data() + x, h,
                static_cast<std::size_t>(w), r);
  }
  return out;
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw ValidationError("mask dimension mismatch: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " +
                          std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

BinaryMask generate_occlusion_mask(const LabelGrid& grid, const MaskGenConfig& cfg) {
  validate_config(cfg, grid.taxonomy());
  const BinaryMask markers = extract_class_mask(grid, cfg.marker_ids);
  const BinaryMask buildings = extract_class_mask(grid, cfg.building_ids);
  return intersect(dilate_square(markers, cfg.kernel_size), buildings);
}

}  // namespace riskplan
