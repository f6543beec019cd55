#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "riskplan/raster.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {

inline constexpr int kDefaultSamples = 20;

/// Stand-in for a Monte Carlo dropout segmenter. Each sample starts from a
/// smoothed one-hot distribution of the input label, adds independent
/// zero-mean Gaussian noise per class, clamps to [0, 1] and renormalizes.
struct SyntheticSegmenterConfig {
  double base_confidence = 0.9;
  double noise_sigma = 0.02;
  /// Extra noise added inside `boost_region` (sigma becomes noise_sigma + boost_sigma).
  double boost_sigma = 0.2;
  /// Empty mask means no boosted region.
  BinaryMask boost_region;
  std::uint64_t seed = 0;
  int n_samples = kDefaultSamples;
};

void validate_config(const SyntheticSegmenterConfig& cfg, int n_classes, int width,
                     int height);

/// Deterministic for a fixed seed; the random stream of each (sample, pixel)
/// is derived from the seed and the indices only.
ProbabilityStack sample_synthetic(const LabelGrid& truth,
                                  const SyntheticSegmenterConfig& cfg);

/// Argmax of the across-sample mean probability; ties go to the lowest id.
LabelGrid consensus_labels(const ProbabilityStack& stack,
                           std::shared_ptr<const ClassTaxonomy> taxonomy);

/// Uncert(x) = (1/K) * sum_k Var_n(P_k(x)), with population variance over
/// the samples. Always within [0, 0.25].
UncertaintyMap uncertainty_map(const ProbabilityStack& stack);

/// Labels an image by nearest taxonomy display color (squared RGB distance,
/// lowest id on ties). Synthetic segmentation of arbitrary images starts here.
LabelGrid perceive_labels(const ColorImage& image,
                          std::shared_ptr<const ClassTaxonomy> taxonomy);

// PROBSTACK: "PROBSTACK 1\n<width> <height> <n_classes> <n_samples>\n"
// followed by little-endian float32 values, sample-major, then class-major,
// then row-major pixels.

std::vector<std::uint8_t> encode_probstack(const ProbabilityStack& stack);
/// Values may exceed [0, 1] by at most 1e-6. A (sample, pixel) row whose sum
/// is off by more than 1e-5 but at most 1e-3 is renormalized; beyond that it
/// is an error.
ProbabilityStack decode_probstack(const std::vector<std::uint8_t>& bytes);
void export_probability_stack(const ProbabilityStack& stack,
                              const std::filesystem::path& path);
ProbabilityStack import_probability_stack(const std::filesystem::path& path);

/// Shells out to an external segmenter once per sample:
/// `<command> <dir> <sample_index>` must write `probs_<sample_index>.probstack`
/// (a single-sample stack) into `dir`, where `input.png` has been placed.
struct ExternalSegmenterConfig {
  std::string command;
  int n_samples = kDefaultSamples;
  std::chrono::seconds timeout{300};
};

ProbabilityStack run_external_segmenter(const ColorImage& image, int n_classes,
                                        const ExternalSegmenterConfig& cfg);

}  // namespace riskplan
