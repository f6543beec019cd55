#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "riskplan/raster.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {

enum class InpainterKind {
  kMeanReplacement,
  kPatchReplacement,
  kDiffusion,
  kExternal,
};

const char* to_string(InpainterKind kind);
/// Accepts "mean", "patch", "diffusion", "external" and the long
/// mean_replacement / patch_replacement spellings.
InpainterKind parse_inpainter_kind(const std::string& name);

struct DiffusionParams {
  /// Convergence threshold on the largest per-sweep change, in 8-bit units.
  double tolerance = 1e-3;
  int max_iterations = 10000;
};

/// External inpainter protocol: `input.png` and `mask.png` (255 = hole) are
/// written into a fresh directory, `<command> <dir>` is run, and
/// `output.png` is read back.
struct ExternalInpainterParams {
  std::string command;
  std::chrono::seconds timeout{300};
};

struct InpainterConfig {
  InpainterKind kind = InpainterKind::kDiffusion;
  /// Classes averaged by mean replacement.
  std::vector<ClassId> mean_class_ids;
  /// Tile used by patch replacement.
  ColorImage patch;
  DiffusionParams diffusion;
  ExternalInpainterParams external;
};

struct InpaintResult {
  ColorImage image;
  /// Diffusion only: sweeps run, last max update, and whether the
  /// tolerance was reached before max_iterations.
  int iterations = 0;
  double max_update = 0.0;
  bool converged = true;
};

/// Fills pixels where `mask` is set; every other pixel is copied verbatim.
/// `labels` is required by mean replacement and ignored otherwise.
InpaintResult inpaint(const ColorImage& image, const BinaryMask& mask,
                      const InpainterConfig& cfg, const LabelGrid* labels = nullptr);

/// Per-channel mean over unmasked pixels whose label is in `ids`, rounded to
/// the nearest integer (halves round up).
Rgb mean_of_class(const ColorImage& image, const LabelGrid& labels, const BinaryMask& mask,
                  const std::vector<ClassId>& ids);

/// 4-connected components of set mask pixels, labelled 0..n-1 in row-major
/// order of first appearance; unmasked pixels hold -1.
struct MaskComponents {
  Raster<int> label;
  int count = 0;
};
MaskComponents label_components(const BinaryMask& mask);

}  // namespace riskplan
