#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "riskplan/inpaint.hpp"
#include "riskplan/mask_gen.hpp"
#include "riskplan/metrics.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/segment.hpp"
#include "riskplan/synth.hpp"

namespace riskplan {

enum class SegmenterKind { kSynthetic, kExternal };

/// Where the synthetic segmenter takes its per-pixel labels from.
enum class LabelSource {
  /// Nearest taxonomy color of the image being segmented.
  kPerceived,
  /// Ground-truth labels supplied alongside the image.
  kTruth,
};

struct SegmentSettings {
  SegmenterKind kind = SegmenterKind::kSynthetic;
  LabelSource label_source = LabelSource::kPerceived;
  double base_confidence = 0.9;
  double noise_sigma = 0.02;
  double boost_sigma = 0.2;
  /// Boost synthetic sampling noise inside the occlusion mask.
  bool boost_masked = true;
  int n_samples = kDefaultSamples;
  std::string command;
  int timeout_s = 300;
};

struct InpaintSettings {
  InpainterKind kind = InpainterKind::kDiffusion;
  std::vector<std::string> mean_classes{"road"};
  /// Optional RGB PNG; when empty a flat road-colored tile is used.
  std::string patch_file;
  int patch_size = 8;
  double tolerance = 1e-3;
  int max_iterations = 10000;
  std::string command;
  int timeout_s = 300;
};

struct MaskSettings {
  int kernel_size = kLargeKernel;
  std::vector<std::string> marker_classes{"road_marker"};
  std::vector<std::string> building_classes{"building"};
};

struct PlannerSettings {
  std::vector<double> lambdas{0, 1, 2, 5, 10, 20};
  int connectivity = 8;
  double diagonal_scale = 1.0;
};

struct ProtocolSettings {
  /// Explicit waypoints; when empty `count` are sampled on the truth road.
  std::vector<Pixel> waypoints;
  int count = 5;
  std::uint64_t seed = 1;
};

struct RenderSettings {
  Rgb path_color{255, 0, 0};
};

struct PipelineConfig {
  std::shared_ptr<const ClassTaxonomy> taxonomy =
      std::make_shared<const ClassTaxonomy>(ClassTaxonomy::Default());
  std::uint64_t seed = 0;
  MaskSettings mask;
  InpaintSettings inpaint;
  SegmentSettings segment;
  PlannerSettings planner;
  ProtocolSettings protocol;
  RenderSettings render;
  SceneSpec synth = building_over_road_spec();
};

/// Throws ValidationError on the first inconsistency.
void validate_config(const PipelineConfig& cfg);

nlohmann::json config_to_json(const PipelineConfig& cfg);
/// Unknown keys are rejected; missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const nlohmann::json& doc);

MaskGenConfig mask_config(const PipelineConfig& cfg);
InpainterConfig inpainter_config(const PipelineConfig& cfg);
PlannerConfig planner_config(const PipelineConfig& cfg, double lambda);

struct Segmentation {
  ProbabilityStack probs;
  LabelGrid labels;
  UncertaintyMap uncertainty;
};

/// Runs the configured segmenter. `boost` (may be empty) marks pixels with
/// extra sampling noise; `truth` is required for LabelSource::kTruth.
Segmentation segment_image(const ColorImage& image, const PipelineConfig& cfg,
                           const BinaryMask& boost, const LabelGrid* truth);

/// Consensus labels and uncertainty of an existing stack.
Segmentation summarize(ProbabilityStack probs, const PipelineConfig& cfg);

std::vector<Pixel> resolve_waypoints(const PipelineConfig& cfg, const LabelGrid& truth);

struct PipelineResult {
  Segmentation initial;
  BinaryMask mask;
  InpaintResult inpainted;
  Segmentation final;
  std::vector<Pixel> waypoints;
  SurpriseReport report;
};

/// Segment, mask, inpaint, re-segment and evaluate. A supplied `manual_mask`
/// replaces the generated one.
PipelineResult run_pipeline(const ColorImage& input, const LabelGrid& truth,
                            const PipelineConfig& cfg,
                            const std::optional<BinaryMask>& manual_mask = std::nullopt);

/// Evaluation of an image with no masking or inpainting.
SurpriseReport evaluate_unmodified(const ColorImage& input, const LabelGrid& truth,
                                   const PipelineConfig& cfg);

}  // namespace riskplan
