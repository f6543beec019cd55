#include "riskplan/synth.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <random>

namespace riskplan {

const char* to_string(RoadLayout layout) {
  switch (layout) {
    case RoadLayout::kStraight: return "straight";
    case RoadLayout::kL: return "L";
    case RoadLayout::kCross: return "cross";
    case RoadLayout::kRing: return "ring";
  }
  return "?";
}

RoadLayout parse_road_layout(const std::string& name) {
  if (name == "straight") return RoadLayout::kStraight;
  if (name == "L" || name == "l") return RoadLayout::kL;
  if (name == "cross") return RoadLayout::kCross;
  if (name == "ring") return RoadLayout::kRing;
  throw ValidationError("unknown road layout '" + name + "'");
}

void validate_spec(const SceneSpec& spec) {
  if (spec.width < 8 || spec.height < 8) {
    throw ValidationError("scene must be at least 8x8");
  }
  if (spec.road_width < 3) throw ValidationError("road_width must be >= 3");
  if (spec.road_width * 3 > std::min(spec.width, spec.height)) {
    throw ValidationError("road_width too large for the scene");
  }
  if (spec.marker_period < 2) throw ValidationError("marker_period must be >= 2");
  if (spec.color_jitter < 0 || spec.color_jitter > 64) {
    throw ValidationError("color_jitter must lie in [0, 64]");
  }
  const int limit = std::min(spec.width, spec.height);
  for (const Pixel& s : spec.occlusion_shift) {
    if (2 * std::abs(s.row) >= limit || 2 * std::abs(s.col) >= limit) {
      throw ValidationError("occlusion shift must be smaller than half the scene");
    }
  }
  for (const Building& b : spec.buildings) {
    const Rect& r = b.rect;
    if (r.height < 1 || r.width < 1 || r.row < 0 || r.col < 0 ||
        r.row + r.height > spec.height || r.col + r.width > spec.width) {
      throw ValidationError("building footprint outside the scene");
    }
    if (b.height_class < 0 ||
        b.height_class >= static_cast<int>(spec.occlusion_shift.size())) {
      throw ValidationError("building height class has no occlusion shift");
    }
  }
}

namespace {

struct RoadBand {
  Rect rect;
  bool horizontal;
};

std::vector<RoadBand> road_bands(const SceneSpec& s) {
  const int rw = s.road_width;
  const int top = s.height / 2 - rw / 2;
  const int left = s.width / 2 - rw / 2;
  switch (s.layout) {
    case RoadLayout::kStraight:
      return {{{top, 0, rw, s.width}, true}};
    case RoadLayout::kL:
      return {{{top, 0, rw, left + rw}, true}, {{top, left, s.height - top, rw}, false}};
    case RoadLayout::kCross:
      return {{{top, 0, rw, s.width}, true}, {{0, left, s.height, rw}, false}};
    case RoadLayout::kRing: {
      const int m = std::min(s.width, s.height) / 5;
      const int inner_w = s.width - 2 * m;
      const int inner_h = s.height - 2 * m;
      return {{{m, m, rw, inner_w}, true},
              {{s.height - m - rw, m, rw, inner_w}, true},
              {{m, m, inner_h, rw}, false},
              {{m, s.width - m - rw, inner_h, rw}, false}};
    }
  }
  return {};
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rgb jittered(Rgb base, int jitter, std::uint64_t seed, std::size_t index) {
  if (jitter == 0) return base;
  const std::uint64_t h = mix64(mix64(seed) ^ index);
  auto channel = [&](std::uint8_t v, int shift) {
    const int span = 2 * jitter + 1;
    const int delta = static_cast<int>((h >> shift) % span) - jitter;
    return static_cast<std::uint8_t>(std::clamp(int(v) + delta, 0, 255));
  };
  return {channel(base.r, 0), channel(base.g, 16), channel(base.b, 32)};
}

void fill_rect(LabelGrid& grid, const Rect& r, ClassId label) {
  for (int y = std::max(r.row, 0); y < std::min(r.row + r.height, grid.height()); ++y) {
    for (int x = std::max(r.col, 0); x < std::min(r.col + r.width, grid.width()); ++x) {
      grid.at(y, x) = label;
    }
  }
}

}  // namespace

Scene generate_scene(const SceneSpec& spec, std::shared_ptr<const ClassTaxonomy> taxonomy) {
  validate_spec(spec);
  const ClassTaxonomy& tax = *taxonomy;
  const ClassId background = tax.require("background");
  const ClassId road = tax.require("road");
  const ClassId marker = tax.require("road_marker");
  const ClassId building = tax.require("building");

  Scene scene;
  LabelGrid truth(spec.width, spec.height, taxonomy, background);
  const int half = std::max(1, spec.marker_period / 2);
  for (const RoadBand& band : road_bands(spec)) fill_rect(truth, band.rect, road);
  for (const RoadBand& band : road_bands(spec)) {
    const Rect& r = band.rect;
    if (band.horizontal) {
      const int y = r.row + spec.road_width / 2;
      for (int x = r.col; x < r.col + r.width; ++x) {
        if (x % spec.marker_period < half) truth.at(y, x) = marker;
      }
    } else {
      const int x = r.col + spec.road_width / 2;
      for (int y = r.row; y < r.row + r.height; ++y) {
        if (y % spec.marker_period < half) truth.at(y, x) = marker;
      }
    }
  }
  BinaryMask footprint(spec.width, spec.height);
  for (const Building& b : spec.buildings) {
    fill_rect(truth, b.rect, building);
    for (int y = b.rect.row; y < b.rect.row + b.rect.height; ++y) {
      for (int x = b.rect.col; x < b.rect.col + b.rect.width; ++x) footprint.set(y, x);
    }
  }

  // Sweep each footprint along its shift, one pixel step at a time.
  LabelGrid occluded = truth;
  BinaryMask swept(spec.width, spec.height);
  for (const Building& b : spec.buildings) {
    const Pixel shift = spec.occlusion_shift[b.height_class];
    const int steps = std::max(std::abs(shift.row), std::abs(shift.col));
    for (int t = 0; t <= steps; ++t) {
      const int dr = steps == 0 ? 0 : (shift.row * t) / steps;
      const int dc = steps == 0 ? 0 : (shift.col * t) / steps;
      const Rect moved{b.rect.row + dr, b.rect.col + dc, b.rect.height, b.rect.width};
      for (int y = std::max(moved.row, 0);
           y < std::min(moved.row + moved.height, spec.height); ++y) {
        for (int x = std::max(moved.col, 0);
             x < std::min(moved.col + moved.width, spec.width); ++x) {
          swept.set(y, x);
          occluded.at(y, x) = building;
        }
      }
    }
  }
  scene.occlusion = BinaryMask(spec.width, spec.height);
  for (std::size_t i = 0; i < swept.size(); ++i) {
    scene.occlusion[i] = swept[i] && !footprint[i];
  }

  ColorImage truth_image(spec.width, spec.height);
  ColorImage occluded_image(spec.width, spec.height);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth_image[i] = jittered(tax.info(truth[i]).color, spec.color_jitter, spec.seed, i);
    occluded_image[i] =
        jittered(tax.info(occluded[i]).color, spec.color_jitter, spec.seed, i);
  }

  scene.truth_labels = std::move(truth);
  scene.truth_image = std::move(truth_image);
  scene.occluded_labels = std::move(occluded);
  scene.occluded_image = std::move(occluded_image);
  return scene;
}

std::vector<Pixel> waypoints_on_road(const LabelGrid& truth_labels, int count,
                                     std::uint64_t seed) {
  if (count < 1) throw ValidationError("waypoint count must be >= 1");
  const ClassId road = truth_labels.taxonomy().require("road");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < truth_labels.size(); ++i) {
    if (truth_labels[i] == road) candidates.push_back(i);
  }
  if (candidates.size() < static_cast<std::size_t>(count)) {
    throw ValidationError("scene has " + std::to_string(candidates.size()) +
                          " road pixels, fewer than the " + std::to_string(count) +
                          " waypoints requested");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);

  std::vector<Pixel> chosen{truth_labels.pixel(candidates[pick(rng)])};
  std::vector<int> dist(candidates.size(), std::numeric_limits<int>::max());
  while (chosen.size() < static_cast<std::size_t>(count)) {
    const Pixel last = chosen.back();
    std::size_t best = 0;
    int best_d = -1;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const Pixel p = truth_labels.pixel(candidates[j]);
      const int d = std::max(std::abs(p.row - last.row), std::abs(p.col - last.col));
      dist[j] = std::min(dist[j], d);
      if (dist[j] > best_d) {
        best_d = dist[j];
        best = j;
      }
    }
    if (best_d == 0) throw ValidationError("not enough distinct road pixels");
    chosen.push_back(truth_labels.pixel(candidates[best]));
  }
  return chosen;
}

SceneSpec building_over_road_spec(std::uint64_t seed) {
  SceneSpec spec;
  spec.width = 96;
  spec.height = 96;
  spec.layout = RoadLayout::kCross;
  spec.road_width = 10;
  spec.marker_period = 8;
  spec.seed = seed;
  // Class 0: low-rise, slight lean. Class 1: tower whose roof covers the
  // whole west arm of the horizontal road.
  spec.occlusion_shift = {{2, 2}, {14, 0}};
  spec.buildings = {
      {{24, 8, 16, 26}, 1},
      {{12, 60, 22, 26}, 0},
      {{60, 10, 24, 24}, 0},
      {{62, 62, 20, 22}, 0},
  };
  return spec;
}

SceneSpec random_scene_spec(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(mix64(seed));
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.seed = seed;
  spec.layout = static_cast<RoadLayout>(uniform(0, 3));
  spec.road_width = uniform(5, std::max(5, std::min(width, height) / 8));
  spec.marker_period = uniform(4, 10);
  const int limit = std::min(width, height) / 2 - 1;
  const int n_classes = uniform(1, 3);
  for (int c = 0; c < n_classes; ++c) {
    const int reach = std::min(limit, 3 + 4 * c);
    spec.occlusion_shift.push_back({uniform(-reach, reach), uniform(-reach, reach)});
  }
  const int n_buildings = uniform(2, 5);
  for (int b = 0; b < n_buildings; ++b) {
    const int h = uniform(4, height / 4);
    const int w = uniform(4, width / 4);
    spec.buildings.push_back(
        {{uniform(0, height - h), uniform(0, width - w), h, w}, uniform(0, n_classes - 1)});
  }
  return spec;
}

}  // namespace riskplan
