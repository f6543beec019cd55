#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "riskplan/raster.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {

enum class RoadLayout { kStraight, kL, kCross, kRing };

const char* to_string(RoadLayout layout);
RoadLayout parse_road_layout(const std::string& name);

struct Rect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;

  bool contains(Pixel p) const {
    return p.row >= row && p.row < row + height && p.col >= col && p.col < col + width;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Building {
  Rect rect;
  /// Index into SceneSpec::occlusion_shift.
  int height_class = 0;

  friend bool operator==(const Building&, const Building&) = default;
};

/// Desk-scale city block: one road network with a dashed centerline and a set
/// of rectangular buildings. In the occluded view each building's footprint
/// is swept by its height class's shift, emulating roofs leaning over the
/// street under perspective.
struct SceneSpec {
  int width = 96;
  int height = 96;
  RoadLayout layout = RoadLayout::kCross;
  int road_width = 10;
  /// Dash period of the centerline marker; dashes fill the first half.
  int marker_period = 8;
  std::vector<Building> buildings;
  /// (dr, dc) per height class.
  std::vector<Pixel> occlusion_shift;
  /// Per-channel color noise amplitude.
  int color_jitter = 6;
  std::uint64_t seed = 0;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

void validate_spec(const SceneSpec& spec);

struct Scene {
  LabelGrid truth_labels;
  ColorImage truth_image;
  LabelGrid occluded_labels;
  ColorImage occluded_image;
  /// Pixels covered by a swept footprint but outside every true footprint.
  BinaryMask occlusion;
};

/// Uses the taxonomy's "background", "road", "road_marker" and "building"
/// classes. Deterministic for a given spec.
Scene generate_scene(const SceneSpec& spec, std::shared_ptr<const ClassTaxonomy> taxonomy);

/// `count` distinct "road" pixels chosen by farthest-point sampling under
/// Chebyshev distance. The first point is drawn from the seed; later points
/// maximize the distance to those already chosen, lowest index on ties.
std::vector<Pixel> waypoints_on_road(const LabelGrid& truth_labels, int count,
                                     std::uint64_t seed);

/// 96x96 cross-road scene in which a tall building's roof spills across the
/// horizontal road, hiding both its lanes and the centerline.
SceneSpec building_over_road_spec(std::uint64_t seed = 7);

/// Randomized layout, buildings and shifts for property tests.
SceneSpec random_scene_spec(std::uint64_t seed, int width = 64, int height = 64);

}  // namespace riskplan
