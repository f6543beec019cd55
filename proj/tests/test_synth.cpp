#include <gtest/gtest.h>

#include "oracles.hpp"
#include "riskplan/synth.hpp"

namespace riskplan {
namespace {

using testing::class_id;
using testing::default_taxonomy;

SceneSpec straight_with_building(Pixel shift) {
  SceneSpec s;
  s.width = 64;
  s.height = 64;
  s.layout = RoadLayout::kStraight;
  s.road_width = 10;
  s.buildings = {{{17, 20, 10, 20}, 0}};
  s.occlusion_shift = {shift};
  s.seed = 3;
  return s;
}

int chebyshev(Pixel a, Pixel b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

TEST(Synth, ZeroShiftOccludedEqualsTruth) {
  const Scene s = generate_scene(straight_with_building({0, 0}), default_taxonomy());
  EXPECT_EQ(s.occluded_labels, s.truth_labels);
  EXPECT_EQ(s.occluded_image, s.truth_image);
  EXPECT_EQ(s.occlusion.count(), 0u);
}

TEST(Synth, ShiftTowardRoadOverwritesAdjacentSpan) {
  // Road occupies rows 27..36; the building sits on rows 17..26, cols 20..39.
  const Scene s = generate_scene(straight_with_building({10, 0}), default_taxonomy());
  const ClassId building = class_id("building");
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      const bool in_rect = r >= 17 && r < 37 && c >= 20 && c < 40;
      if (in_rect) {
        EXPECT_EQ(s.occluded_labels.at(r, c), building);
      } else {
        EXPECT_EQ(s.occluded_labels.at(r, c), s.truth_labels.at(r, c));
      }
      EXPECT_EQ(s.occlusion.test(r, c), r >= 27 && r < 37 && c >= 20 && c < 40);
    }
  }
  for (int r = 27; r < 37; ++r) {
    const ClassId t = s.truth_labels.at(r, 30);
    EXPECT_TRUE(t == class_id("road") || t == class_id("road_marker"));
  }
}

TEST(Synth, SameSeedSameScene) {
  const SceneSpec spec = building_over_road_spec(11);
  const Scene a = generate_scene(spec, default_taxonomy());
  const Scene b = generate_scene(spec, default_taxonomy());
  EXPECT_EQ(a.truth_labels, b.truth_labels);
  EXPECT_EQ(a.truth_image, b.truth_image);
  EXPECT_EQ(a.occluded_labels, b.occluded_labels);
  EXPECT_EQ(a.occluded_image, b.occluded_image);
}

TEST(Synth, TruthHasTheFourClasses) {
  const Scene s = generate_scene(building_over_road_spec(), default_taxonomy());
  for (const char* name : {"background", "road", "road_marker", "building"}) {
    const ClassId id = class_id(name);
    EXPECT_TRUE(std::count(s.truth_labels.values().begin(), s.truth_labels.values().end(), id))
        << name;
  }
}

TEST(Synth, BuildingOverRoadHidesHorizontalMarkers) {
  const Scene s = generate_scene(building_over_road_spec(), default_taxonomy());
  const ClassId marker = class_id("road_marker");
  int hidden = 0;
  for (int c = 0; c < 96; ++c) {
    hidden += s.truth_labels.at(48, c) == marker && s.occluded_labels.at(48, c) != marker;
  }
  EXPECT_GT(hidden, 0);
}

TEST(Synth, RandomScenesSatisfyInvariants) {
  const ClassId building = class_id("building");
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SceneSpec spec = random_scene_spec(seed);
    const Scene s = generate_scene(spec, default_taxonomy());
    ASSERT_TRUE(validate(s.truth_labels).empty());
    ASSERT_TRUE(validate(s.occluded_labels).empty());
    ASSERT_TRUE(validate(s.truth_image).empty());
    // Differences only where a swept footprint lies, and always as building.
    LabelGrid restored = s.occluded_labels;
    for (std::size_t i = 0; i < restored.size(); ++i) {
      if (s.occluded_labels[i] != s.truth_labels[i]) {
        ASSERT_TRUE(s.occlusion[i]);
        ASSERT_EQ(s.occluded_labels[i], building);
      }
      if (s.occlusion[i]) restored[i] = s.truth_labels[i];
    }
    ASSERT_EQ(restored, s.truth_labels);
  }
}

TEST(Synth, InvalidSpecs) {
  SceneSpec s = straight_with_building({0, 0});
  s.road_width = 2;
  EXPECT_THROW(generate_scene(s, default_taxonomy()), Error);
  s = straight_with_building({40, 0});
  EXPECT_THROW(generate_scene(s, default_taxonomy()), Error);
  s = straight_with_building({0, 0});
  s.buildings[0].rect.col = 60;
  EXPECT_THROW(generate_scene(s, default_taxonomy()), Error);
  s = straight_with_building({0, 0});
  s.buildings[0].height_class = 3;
  EXPECT_THROW(generate_scene(s, default_taxonomy()), Error);
  EXPECT_THROW(parse_road_layout("spiral"), Error);
}

TEST(Waypoints, SingleAndDistinctOnCross) {
  const Scene s = generate_scene(building_over_road_spec(), default_taxonomy());
  const auto one = waypoints_on_road(s.truth_labels, 1, 4);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(s.truth_labels[one[0]], class_id("road"));

  const auto five = waypoints_on_road(s.truth_labels, 5, 4);
  ASSERT_EQ(five.size(), 5u);
  for (std::size_t i = 0; i < five.size(); ++i) {
    EXPECT_EQ(s.truth_labels[five[i]], class_id("road"));
    for (std::size_t j = i + 1; j < five.size(); ++j) {
      EXPECT_GE(chebyshev(five[i], five[j]), 10);
    }
  }
  EXPECT_EQ(waypoints_on_road(s.truth_labels, 5, 4), five);
}

TEST(Waypoints, MatchFarthestPointOracle) {
  const Scene s = generate_scene(building_over_road_spec(), default_taxonomy());
  const auto got = waypoints_on_road(s.truth_labels, 5, 9);
  std::vector<Pixel> road;
  for (std::size_t i = 0; i < s.truth_labels.size(); ++i) {
    if (s.truth_labels[i] == class_id("road")) road.push_back(s.truth_labels.pixel(i));
  }
  // The seeded first pick is taken as given; the rest follow the greedy rule.
  std::vector<Pixel> want{got[0]};
  while (want.size() < 5) {
    Pixel best{};
    int best_d = -1;
    for (Pixel p : road) {
      int d = std::numeric_limits<int>::max();
      for (Pixel q : want) d = std::min(d, chebyshev(p, q));
      if (d > best_d) {
        best_d = d;
        best = p;
      }
    }
    want.push_back(best);
  }
  EXPECT_EQ(got, want);
}

TEST(Waypoints, TooManyIsAnError) {
  LabelGrid g(3, 3, default_taxonomy(), class_id("building"));
  g.at(0, 0) = class_id("road");
  g.at(2, 2) = class_id("road");
  EXPECT_NO_THROW(waypoints_on_road(g, 2, 0));
  EXPECT_THROW(waypoints_on_road(g, 3, 0), Error);
}

}  // namespace
}  // namespace riskplan
