#include <gtest/gtest.h>

#include <cstring>
#include <numeric>

#include "oracles.hpp"
#include "riskplan/io.hpp"
#include "riskplan/segment.hpp"
#include "riskplan/subprocess.hpp"

namespace riskplan {
namespace {

using testing::class_id;
using testing::default_taxonomy;

ProbabilityStack two_class(std::initializer_list<std::pair<float, float>> samples) {
  ProbabilityStack s(static_cast<int>(samples.size()), 2, 1, 1);
  int i = 0;
  for (auto [a, b] : samples) {
    s.at(i, 0, 0) = a;
    s.at(i, 1, 0) = b;
    ++i;
  }
  return s;
}

std::vector<std::uint8_t> handmade_probstack(int w, int h, int k, int n,
                                             const std::vector<float>& values) {
  const std::string header = "PROBSTACK 1\n" + std::to_string(w) + " " + std::to_string(h) +
                             " " + std::to_string(k) + " " + std::to_string(n) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (float v : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

TEST(Synthetic, NoiselessIsExactOneHot) {
  std::mt19937_64 rng(40);
  const LabelGrid truth = testing::random_grid(rng, 9, 7);
  SyntheticSegmenterConfig cfg;
  cfg.base_confidence = 1.0;
  cfg.noise_sigma = 0.0;
  cfg.boost_sigma = 0.0;
  cfg.n_samples = 3;
  const ProbabilityStack s = sample_synthetic(truth, cfg);
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 11; ++c) {
      for (std::size_t p = 0; p < truth.size(); ++p) {
        ASSERT_EQ(s.at(i, c, p), truth[p] == c ? 1.0f : 0.0f);
      }
    }
  }
  EXPECT_EQ(consensus_labels(s, default_taxonomy()), truth);
}

TEST(Synthetic, SameSeedSameStack) {
  std::mt19937_64 rng(41);
  const LabelGrid truth = testing::random_grid(rng, 16, 16);
  SyntheticSegmenterConfig cfg;
  cfg.seed = 99;
  EXPECT_EQ(sample_synthetic(truth, cfg), sample_synthetic(truth, cfg));
  SyntheticSegmenterConfig other = cfg;
  other.seed = 100;
  EXPECT_NE(sample_synthetic(truth, cfg), sample_synthetic(truth, other));
}

TEST(Synthetic, SamplesAreValidAndDefaultToTwenty) {
  std::mt19937_64 rng(42);
  const LabelGrid truth = testing::random_grid(rng, 12, 12);
  SyntheticSegmenterConfig cfg;
  cfg.noise_sigma = 0.3;
  const ProbabilityStack s = sample_synthetic(truth, cfg);
  EXPECT_EQ(s.n_samples(), 20);
  EXPECT_TRUE(validate(s, 11).empty());
}

TEST(Synthetic, BoostRegionRaisesUncertainty) {
  // Fixture: 64x64, 20 samples, seed 7, boost over the left half.
  std::mt19937_64 rng(43);
  const LabelGrid truth = testing::random_grid(rng, 64, 64);
  SyntheticSegmenterConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.boost_sigma = 0.2;
  cfg.seed = 7;
  cfg.boost_region = BinaryMask(64, 64);
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 32; ++c) cfg.boost_region.set(r, c);
  }
  const UncertaintyMap u = uncertainty_map(sample_synthetic(truth, cfg));
  double inside = 0, outside = 0;
  for (std::size_t i = 0; i < u.size(); ++i) (cfg.boost_region[i] ? inside : outside) += u[i];
  EXPECT_GT(inside / 2048, outside / 2048);
  EXPECT_EQ(outside, 0.0);
}

TEST(Synthetic, InvalidConfig) {
  const LabelGrid truth(4, 4, default_taxonomy());
  SyntheticSegmenterConfig cfg;
  cfg.base_confidence = 1.0 / 11;
  EXPECT_THROW(sample_synthetic(truth, cfg), Error);
  cfg = {};
  cfg.n_samples = 0;
  EXPECT_THROW(sample_synthetic(truth, cfg), Error);
  cfg = {};
  cfg.noise_sigma = -1;
  EXPECT_THROW(sample_synthetic(truth, cfg), Error);
  cfg = {};
  cfg.boost_region = BinaryMask(3, 3);
  EXPECT_THROW(sample_synthetic(truth, cfg), Error);
}

TEST(Consensus, TieGoesToLowestId) {
  const auto tax = std::make_shared<const ClassTaxonomy>(
      ClassTaxonomy({{0, "a", {}, 1, true}, {1, "b", {}, 1, true}}));
  EXPECT_EQ(consensus_labels(two_class({{0.5f, 0.5f}}), tax)[0], 0);
  EXPECT_EQ(consensus_labels(two_class({{0.2f, 0.8f}, {0.8f, 0.2f}}), tax)[0], 0);
  EXPECT_EQ(consensus_labels(two_class({{0.4f, 0.6f}}), tax)[0], 1);
}

TEST(Consensus, MatchesMeanThenArgmaxOracle) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20; ++t) {
    const ProbabilityStack s = testing::random_stack(rng, 5, 11, 8, 8);
    const LabelGrid g = consensus_labels(s, default_taxonomy());
    for (std::size_t p = 0; p < g.size(); ++p) ASSERT_EQ(g[p], testing::brute_argmax(s, p));
  }
}

TEST(Consensus, ClassCountMustMatchTaxonomy) {
  std::mt19937_64 rng(45);
  EXPECT_THROW(consensus_labels(testing::random_stack(rng, 2, 3, 2, 2), default_taxonomy()),
               Error);
}

TEST(Uncertainty, IdenticalSamplesGiveZero) {
  std::mt19937_64 rng(46);
  const ProbabilityStack one = testing::random_stack(rng, 1, 11, 6, 6);
  ProbabilityStack s(4, 11, 6, 6);
  for (int i = 0; i < 4; ++i) {
    std::copy(one.values().begin(), one.values().end(),
              s.values().begin() + static_cast<long>(i * one.values().size()));
  }
  const UncertaintyMap repeated = uncertainty_map(s), single = uncertainty_map(one);
  for (double v : repeated.values()) EXPECT_EQ(v, 0.0);
  for (double v : single.values()) EXPECT_EQ(v, 0.0);
}

TEST(Uncertainty, HandEvaluatedCases) {
  // Samples {0.4,0.6} and {0.6,0.4}: each class has variance 0.01.
  EXPECT_NEAR(uncertainty_map(two_class({{0.4f, 0.6f}, {0.6f, 0.4f}}))[0], 0.01, 1e-7);
  // Samples {1,0} and {0,1}: the Bernoulli extreme.
  EXPECT_EQ(uncertainty_map(two_class({{1.f, 0.f}, {0.f, 1.f}}))[0], 0.25);
}

TEST(Uncertainty, MatchesBruteForceOracle) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 10; ++t) {
    const ProbabilityStack s = testing::random_stack(rng, 20, 11, 10, 10);
    const UncertaintyMap u = uncertainty_map(s);
    for (std::size_t p = 0; p < u.size(); ++p) {
      ASSERT_NEAR(u[p], testing::brute_uncertainty(s, p), 1e-10);
      ASSERT_GE(u[p], 0.0);
      ASSERT_LE(u[p], 0.25);
    }
  }
}

TEST(Uncertainty, SamplePermutationInvariance) {
  std::mt19937_64 rng(48);
  const ProbabilityStack s = testing::random_stack(rng, 6, 11, 7, 5);
  std::vector<int> order(6);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  ProbabilityStack p(6, 11, 7, 5);
  for (int i = 0; i < 6; ++i) {
    for (int c = 0; c < 11; ++c) {
      for (std::size_t x = 0; x < s.pixel_count(); ++x) p.at(i, c, x) = s.at(order[i], c, x);
    }
  }
  const UncertaintyMap a = uncertainty_map(s), b = uncertainty_map(p);
  for (std::size_t x = 0; x < a.size(); ++x) EXPECT_NEAR(a[x], b[x], 1e-15);
  EXPECT_EQ(consensus_labels(s, default_taxonomy()), consensus_labels(p, default_taxonomy()));
}

TEST(Uncertainty, ClassRelabelingInvariance) {
  std::mt19937_64 rng(49);
  const ProbabilityStack s = testing::random_stack(rng, 5, 11, 6, 6);
  std::vector<int> perm(11);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  ProbabilityStack p(5, 11, 6, 6);
  for (int i = 0; i < 5; ++i) {
    for (int c = 0; c < 11; ++c) {
      for (std::size_t x = 0; x < s.pixel_count(); ++x) p.at(i, perm[c], x) = s.at(i, c, x);
    }
  }
  const UncertaintyMap a = uncertainty_map(s), b = uncertainty_map(p);
  const LabelGrid la = consensus_labels(s, default_taxonomy());
  const LabelGrid lb = consensus_labels(p, default_taxonomy());
  for (std::size_t x = 0; x < a.size(); ++x) {
    EXPECT_NEAR(a[x], b[x], 1e-15);
    EXPECT_EQ(lb[x], perm[la[x]]);
  }
}

TEST(Perceive, NearestDisplayColor) {
  const auto& tax = *default_taxonomy();
  ColorImage img(3, 1);
  img.at(0, 0) = tax.info(class_id("road")).color;
  Rgb near_building = tax.info(class_id("building")).color;
  near_building.r = static_cast<std::uint8_t>(near_building.r ^ 3);
  img.at(0, 1) = near_building;
  img.at(0, 2) = tax.info(class_id("water")).color;
  const LabelGrid g = perceive_labels(img, default_taxonomy());
  EXPECT_EQ(g.at(0, 0), class_id("road"));
  EXPECT_EQ(g.at(0, 1), class_id("building"));
  EXPECT_EQ(g.at(0, 2), class_id("water"));
}

TEST(Probstack, RoundTripIsBitExact) {
  std::mt19937_64 rng(50);
  for (int t = 0; t < 5; ++t) {
    const ProbabilityStack s = testing::random_stack(rng, 1 + t, 11, 3 + t, 4);
    EXPECT_EQ(decode_probstack(encode_probstack(s)), s);
  }
  TempDir dir("riskplan-ps");
  const ProbabilityStack s = testing::random_stack(rng, 3, 11, 5, 5);
  export_probability_stack(s, dir.path() / "p.probstack");
  EXPECT_EQ(import_probability_stack(dir.path() / "p.probstack"), s);
}

TEST(Probstack, HeaderLayout) {
  ProbabilityStack s(1, 2, 1, 1);
  s.at(0, 0, 0) = 1.0f;
  const auto bytes = encode_probstack(s);
  EXPECT_EQ(bytes, handmade_probstack(1, 1, 2, 1, {1.0f, 0.0f}));
}

TEST(Probstack, PayloadLengthMismatchIsAnError) {
  EXPECT_THROW(decode_probstack(handmade_probstack(2, 1, 2, 1, {1, 0, 1})), Error);
  EXPECT_THROW(decode_probstack(handmade_probstack(1, 1, 2, 1, {1, 0, 0})), Error);
  const std::string bad = "PROBSTACK 2\n1 1 1 1\n";
  EXPECT_THROW(decode_probstack({bad.begin(), bad.end()}), Error);
  const std::string dims = "PROBSTACK 1\n1 x 1 1\n";
  EXPECT_THROW(decode_probstack({dims.begin(), dims.end()}), Error);
}

TEST(Probstack, SmallNormalizationErrorIsRenormalized) {
  const ProbabilityStack s =
      decode_probstack(handmade_probstack(1, 1, 2, 1, {0.6004f, 0.4f}));
  EXPECT_NEAR(double(s.at(0, 0, 0)) + s.at(0, 1, 0), 1.0, 1e-6);
  EXPECT_NEAR(s.at(0, 0, 0), 0.6004 / 1.0004, 1e-6);
  EXPECT_THROW(decode_probstack(handmade_probstack(1, 1, 2, 1, {0.61f, 0.4f})), Error);
}

TEST(Probstack, OutOfRangeValues) {
  EXPECT_NO_THROW(decode_probstack(handmade_probstack(1, 1, 2, 1, {1.0000005f, -0.0000005f})));
  EXPECT_THROW(decode_probstack(handmade_probstack(1, 1, 2, 1, {1.1f, -0.1f})), Error);
}

class ExternalSegmenter : public ::testing::Test {
 protected:
  // Pre-written single-sample stacks that the adapter command copies out.
  void SetUp() override {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 3; ++i) {
      samples_.push_back(testing::random_stack(rng, 1, 11, 5, 4));
      export_probability_stack(samples_.back(),
                               dir_.path() / ("probs_" + std::to_string(i) + ".probstack"));
    }
  }
  TempDir dir_{"riskplan-seg"};
  std::vector<ProbabilityStack> samples_;
};

TEST_F(ExternalSegmenter, AssemblesSamplesInOrder) {
  ExternalSegmenterConfig cfg;
  cfg.n_samples = 3;
  cfg.command = testing::write_script(
      dir_.path(), "adapter.sh",
      "test -f \"$1/input.png\" && cp " + dir_.path().string() + "/probs_$2.probstack \"$1/\"");
  const ProbabilityStack s = run_external_segmenter(ColorImage(5, 4), 11, cfg);
  ASSERT_EQ(s.n_samples(), 3);
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 11; ++c) {
      for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        ASSERT_EQ(s.at(i, c, p), samples_[i].at(0, c, p));
      }
    }
  }
}

TEST_F(ExternalSegmenter, FailuresAreAdapterErrors) {
  ExternalSegmenterConfig cfg;
  cfg.n_samples = 2;
  int n = 0;
  for (const std::string& cmd : std::vector<std::string>{"exit 3", "true", "echo junk > \"$1/probs_$2.probstack\"",
                                "cp " + dir_.path().string() + "/probs_0.probstack \"$1/\""}) {
    cfg.command = testing::write_script(dir_.path(), "a" + std::to_string(n++), cmd);
    try {
      run_external_segmenter(ColorImage(6, 4), 11, cfg);
      ADD_FAILURE() << cmd;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kAdapter) << cmd;
    }
  }
}

}  // namespace
}  // namespace riskplan
