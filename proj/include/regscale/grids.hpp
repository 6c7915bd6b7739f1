#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace regscale {

struct Pixel {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Dense H x W depth values with a per-pixel validity mask, row-major with the
// origin at the top-left. Invalid pixels always hold 0.
class DepthGrid {
 public:
  DepthGrid() = default;
  // All pixels invalid.
  DepthGrid(std::size_t height, std::size_t width);

  // All pixels valid; throws InvalidSample on non-finite values.
  static DepthGrid from_values(std::size_t height, std::size_t width, std::vector<double> values);
  // Zeros and non-finite values become invalid (ground-truth convention).
  static DepthGrid from_values_zero_invalid(std::size_t height, std::size_t width,
                                            std::vector<double> values);
  static DepthGrid filled(std::size_t height, std::size_t width, double value);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  std::size_t index(std::size_t row, std::size_t col) const { return row * width_ + col; }
  bool contains(std::size_t row, std::size_t col) const { return row < height_ && col < width_; }

  double value(std::size_t i) const { return values_[i]; }
  double value(std::size_t row, std::size_t col) const { return values_[index(row, col)]; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }
  bool valid(std::size_t row, std::size_t col) const { return valid_[index(row, col)] != 0; }

  void set(std::size_t i, double v);
  void set(std::size_t row, std::size_t col, double v) { set(index(row, col), v); }
  void invalidate(std::size_t i);

  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> validity() const { return valid_; }

  std::size_t valid_count() const;
  // True when every valid pixel is strictly positive (metric / ground-truth grids).
  bool valid_values_positive() const;
  bool same_shape(const DepthGrid& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const DepthGrid&, const DepthGrid&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

// Dense H x W region labels (the segmentation mask).
class LabelGrid {
 public:
  LabelGrid() = default;
  LabelGrid(std::size_t height, std::size_t width, std::uint32_t fill = 0);
  LabelGrid(std::size_t height, std::size_t width, std::vector<std::uint32_t> labels);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t index(std::size_t row, std::size_t col) const { return row * width_ + col; }

  std::uint32_t label(std::size_t i) const { return labels_[i]; }
  std::uint32_t label(std::size_t row, std::size_t col) const { return labels_[index(row, col)]; }
  void set(std::size_t row, std::size_t col, std::uint32_t label) { labels_[index(row, col)] = label; }
  std::span<const std::uint32_t> labels() const { return labels_; }

  std::uint32_t max_label() const;

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint32_t> labels_;
};

struct Sample {
  std::size_t row = 0;
  std::size_t col = 0;
  double depth = 0.0;  // meters

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Sparse metric depth measurements. Depths are strictly positive and finite and
// no coordinate appears twice; both are enforced on construction.
class SparseSamples {
 public:
  SparseSamples() = default;
  explicit SparseSamples(std::vector<Sample> points);

  std::span<const Sample> points() const { return points_; }
  const Sample& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // Throws OutOfBounds if any point falls outside an H x W grid.
  void check_bounds(std::size_t height, std::size_t width) const;

  friend bool operator==(const SparseSamples&, const SparseSamples&) = default;

 private:
  std::vector<Sample> points_;
};

// Remaps labels to {0..R-1} in order of first appearance in a row-major scan.
LabelGrid canonicalize_labels(const LabelGrid& mask);

DepthGrid samples_to_grid(const SparseSamples& samples, std::size_t height, std::size_t width);

// Valid pixels in row-major order.
SparseSamples grid_to_samples(const DepthGrid& grid);

}  // namespace regscale
