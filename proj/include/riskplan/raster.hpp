#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riskplan/error.hpp"

namespace riskplan {

/// Grid address, row-major with the origin at the top-left corner.
struct Pixel {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Dense row-major 2D array. Dimensions may be zero so that malformed
/// inputs can be held and reported on by validate(); operations that need
/// a non-empty raster check that themselves.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, const T& fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw ValidationError("raster dimensions must be nonnegative");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(Pixel p) const {
    return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
  }
  std::size_t index(Pixel p) const {
    return static_cast<std::size_t>(p.row) * width_ + p.col;
  }
  Pixel pixel(std::size_t idx) const {
    return {static_cast<int>(idx / width_), static_cast<int>(idx % width_)};
  }

  T& at(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
  const T& at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  T& operator[](Pixel p) { return data_[index(p)]; }
  const T& operator[](Pixel p) const { return data_[index(p)]; }
  T& operator[](std::size_t idx) { return data_[idx]; }
  const T& operator[](std::size_t idx) const { return data_[idx]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  template <typename U>
  bool same_shape(const Raster<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ColorImage = Raster<Rgb>;

/// Nonnegative real field; used for uncertainty maps and cost maps.
using FloatRaster = Raster<double>;
using CostMap = FloatRaster;
using UncertaintyMap = FloatRaster;

/// Boolean raster stored one byte per pixel (0 or 1).
class BinaryMask : public Raster<std::uint8_t> {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false)
      : Raster<std::uint8_t>(width, height, fill ? 1 : 0) {}

  bool test(int row, int col) const { return at(row, col) != 0; }
  bool test(Pixel p) const { return (*this)[p] != 0; }
  void set(int row, int col, bool v = true) { at(row, col) = v ? 1 : 0; }
  void set(Pixel p, bool v = true) { (*this)[p] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : values()) n += v != 0;
    return n;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

}  // namespace riskplan
