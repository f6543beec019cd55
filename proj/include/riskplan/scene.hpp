#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "riskplan/raster.hpp"
#include "riskplan/taxonomy.hpp"

namespace riskplan {

/// Per-pixel semantic labels together with the taxonomy they index into.
class LabelGrid : public Raster<ClassId> {
 public:
  LabelGrid() = default;
  LabelGrid(int width, int height, std::shared_ptr<const ClassTaxonomy> taxonomy,
            ClassId fill = 0)
      : Raster<ClassId>(width, height, fill), taxonomy_(std::move(taxonomy)) {}

  const ClassTaxonomy& taxonomy() const { return *taxonomy_; }
  const std::shared_ptr<const ClassTaxonomy>& taxonomy_ptr() const {
    return taxonomy_;
  }

  friend bool operator==(const LabelGrid& a, const LabelGrid& b) {
    return static_cast<const Raster<ClassId>&>(a) ==
               static_cast<const Raster<ClassId>&>(b) &&
           (a.taxonomy_ == b.taxonomy_ ||
            (a.taxonomy_ && b.taxonomy_ && *a.taxonomy_ == *b.taxonomy_));
  }

 private:
  std::shared_ptr<const ClassTaxonomy> taxonomy_;
};

/// N samples x K classes x (H*W) pixel probabilities, stored as 32-bit floats
/// in sample-major, class-major, row-major order.
class ProbabilityStack {
 public:
  ProbabilityStack() = default;
  ProbabilityStack(int n_samples, int n_classes, int width, int height);

  int n_samples() const { return n_samples_; }
  int n_classes() const { return n_classes_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::size_t offset(int sample, int cls, std::size_t pixel) const {
    return (static_cast<std::size_t>(sample) * n_classes_ + cls) * pixel_count() +
           pixel;
  }
  float& at(int sample, int cls, std::size_t pixel) {
    return values_[offset(sample, cls, pixel)];
  }
  float at(int sample, int cls, std::size_t pixel) const {
    return values_[offset(sample, cls, pixel)];
  }

  std::vector<float>& values() { return values_; }
  const std::vector<float>& values() const { return values_; }

  friend bool operator==(const ProbabilityStack&, const ProbabilityStack&) = default;

 private:
  int n_samples_ = 0;
  int n_classes_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

struct PlannedPath {
  std::vector<Pixel> pixels;
  double total_cost = 0.0;
  double uncertainty_sum = 0.0;

  /// Number of entered pixels (the start pixel is not entered).
  std::size_t entered() const { return pixels.empty() ? 0 : pixels.size() - 1; }
};

/// Tolerance on per-(sample, pixel) probability sums.
inline constexpr double kNormalizationTolerance = 1e-5;

using ValidationReport = std::vector<std::string>;

ValidationReport validate(const LabelGrid& grid);
ValidationReport validate(const BinaryMask& mask);
ValidationReport validate(const ColorImage& image);
/// `expected_classes` < 0 skips the class-count check.
ValidationReport validate(const ProbabilityStack& stack, int expected_classes = -1);
/// Checks nonnegativity, and the [0, 0.25] range when `is_uncertainty`.
ValidationReport validate(const FloatRaster& raster, bool is_uncertainty = false);
ValidationReport validate(const PlannedPath& path, int connectivity,
                          Pixel start, Pixel goal);

/// Throws ValidationError carrying the first reported violation.
void require_valid(const ValidationReport& report, const std::string& what);

/// Nearest-neighbour resampling: destination (r, c) reads source
/// (r * H / H', c * W / W') using integer division.
LabelGrid resample_nearest(const LabelGrid& grid, int new_width, int new_height);

}  // namespace riskplan
