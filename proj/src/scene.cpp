#include "riskplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace riskplan {
namespace {

std::string at_pixel(std::size_t idx, int width) {
  return "(" + std::to_string(idx / width) + "," + std::to_string(idx % width) + ")";
}

void check_dims(ValidationReport& report, int width, int height) {
  if (width <= 0 || height <= 0) {
    report.push_back("nonpositive dimension " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
}

}  // namespace

ProbabilityStack::ProbabilityStack(int n_samples, int n_classes, int width,
                                   int height)
    : n_samples_(n_samples), n_classes_(n_classes), width_(width), height_(height) {
  if (n_samples < 0 || n_classes < 0 || width < 0 || height < 0) {
    throw ValidationError("probability stack extents must be nonnegative");
  }
  values_.assign(static_cast<std::size_t>(n_samples) * n_classes * width * height,
                 0.0f);
}

ValidationReport validate(const LabelGrid& grid) {
  ValidationReport report;
  check_dims(report, grid.width(), grid.height());
  if (!grid.taxonomy_ptr()) {
    report.push_back("label grid has no taxonomy");
    return report;
  }
  const int k = grid.taxonomy().size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= k) {
      report.push_back("label " + std::to_string(grid[i]) + " out of range at pixel " +
                       at_pixel(i, grid.width()));
      break;
    }
  }
  return report;
}

ValidationReport validate(const BinaryMask& mask) {
  ValidationReport report;
  check_dims(report, mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] > 1) {
      report.push_back("mask value not boolean at pixel " + at_pixel(i, mask.width()));
      break;
    }
  }
  return report;
}

ValidationReport validate(const ColorImage& image) {
  ValidationReport report;
  check_dims(report, image.width(), image.height());
  return report;
}

ValidationReport validate(const ProbabilityStack& stack, int expected_classes) {
  ValidationReport report;
  check_dims(report, stack.width(), stack.height());
  if (stack.n_samples() < 1) report.push_back("stack has no samples");
  if (stack.n_classes() < 1) report.push_back("stack has no classes");
  if (expected_classes >= 0 && stack.n_classes() != expected_classes) {
    report.push_back("class count " + std::to_string(stack.n_classes()) +
                     " does not match taxonomy size " +
                     std::to_string(expected_classes));
  }
  if (!report.empty()) return report;

  const std::size_t npix = stack.pixel_count();
  for (int s = 0; s < stack.n_samples(); ++s) {
    for (std::size_t p = 0; p < npix; ++p) {
      double sum = 0.0;
      for (int k = 0; k < stack.n_classes(); ++k) {
        const float v = stack.at(s, k, p);
        if (!(v >= 0.0f && v <= 1.0f)) {
          report.push_back("probability out of [0,1] at sample " + std::to_string(s) +
                           " class " + std::to_string(k) + " pixel " +
                           at_pixel(p, stack.width()));
          return report;
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > kNormalizationTolerance) {
        report.push_back("normalization violated at pixel " + at_pixel(p, stack.width()) +
                         " sample " + std::to_string(s) + " (sum " +
                         std::to_string(sum) + ")");
        return report;
      }
    }
  }
  return report;
}

ValidationReport validate(const FloatRaster& raster, bool is_uncertainty) {
  ValidationReport report;
  check_dims(report, raster.width(), raster.height());
  for (std::size_t i = 0; i < raster.size(); ++i) {
    const double v = raster[i];
    if (!std::isfinite(v) || v < 0.0) {
      report.push_back("negative or non-finite value at pixel " +
                       at_pixel(i, raster.width()));
      break;
    }
    if (is_uncertainty && v > 0.25) {
      report.push_back("uncertainty above 0.25 at pixel " + at_pixel(i, raster.width()));
      break;
    }
  }
  return report;
}

ValidationReport validate(const PlannedPath& path, int connectivity, Pixel start,
                          Pixel goal) {
  ValidationReport report;
  if (path.pixels.empty()) {
    report.push_back("path is empty");
    return report;
  }
  if (path.pixels.front() != start) report.push_back("path does not begin at start");
  if (path.pixels.back() != goal) report.push_back("path does not end at goal");
  std::set<Pixel> seen;
  for (std::size_t i = 0; i < path.pixels.size(); ++i) {
    const Pixel p = path.pixels[i];
    if (!seen.insert(p).second) {
      report.push_back("pixel repeats at step " + std::to_string(i));
      break;
    }
    if (i == 0) continue;
    const Pixel q = path.pixels[i - 1];
    const int dr = std::abs(p.row - q.row);
    const int dc = std::abs(p.col - q.col);
    const bool adjacent = connectivity == 4 ? dr + dc == 1
                                            : std::max(dr, dc) == 1;
    if (!adjacent) {
      report.push_back("non-adjacent step at index " + std::to_string(i));
      break;
    }
  }
  return report;
}

void require_valid(const ValidationReport& report, const std::string& what) {
  if (!report.empty()) throw ValidationError(what + ": " + report.front());
}

LabelGrid resample_nearest(const LabelGrid& grid, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw ValidationError("resample target dimensions must be positive");
  }
  require_valid(validate(grid), "resample input");
  LabelGrid out(new_width, new_height, grid.taxonomy_ptr());
  for (int r = 0; r < new_height; ++r) {
    const int sr = static_cast<int>(static_cast<long long>(r) * grid.height() / new_height);
    for (int c = 0; c < new_width; ++c) {
      const int sc = static_cast<int>(static_cast<long long>(c) * grid.width() / new_width);
      out.at(r, c) = grid.at(sr, sc);
    }
  }
  return out;
}

}  // namespace riskplan
