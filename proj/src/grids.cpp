#include "regscale/grids.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "regscale/error.hpp"

namespace regscale {

namespace {

std::string coord(std::size_t row, std::size_t col) {
  return "(" + std::to_string(row) + ", " + std::to_string(col) + ")";
}

}  // namespace

DepthGrid::DepthGrid(std::size_t height, std::size_t width)
    : height_(height), width_(width), values_(height * width, 0.0), valid_(height * width, 0) {}

DepthGrid DepthGrid::from_values(std::size_t height, std::size_t width, std::vector<double> values) {
  if (values.size() != height * width) {
    throw Error(ErrorCode::DimensionMismatch, "value count does not match grid size");
  }
  DepthGrid grid(height, width);
  for (std::size_t i = 0; i < values.size(); ++i) grid.set(i, values[i]);
  return grid;
}

DepthGrid DepthGrid::from_values_zero_invalid(std::size_t height, std::size_t width,
                                              std::vector<double> values) {
  if (values.size() != height * width) {
    throw Error(ErrorCode::DimensionMismatch, "value count does not match grid size");
  }
  DepthGrid grid(height, width);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0 && std::isfinite(values[i])) grid.set(i, values[i]);
  }
  return grid;
}

DepthGrid DepthGrid::filled(std::size_t height, std::size_t width, double value) {
  return from_values(height, width, std::vector<double>(height * width, value));
}

void DepthGrid::set(std::size_t i, double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidSample, "non-finite depth value");
  values_[i] = v;
  valid_[i] = 1;
}

void DepthGrid::invalidate(std::size_t i) {
  values_[i] = 0.0;
  valid_[i] = 0;
}

std::size_t DepthGrid::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

bool DepthGrid::valid_values_positive() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (valid_[i] && !(values_[i] > 0.0)) return false;
  }
  return true;
}

LabelGrid::LabelGrid(std::size_t height, std::size_t width, std::uint32_t fill)
    : height_(height), width_(width), labels_(height * width, fill) {}

LabelGrid::LabelGrid(std::size_t height, std::size_t width, std::vector<std::uint32_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (labels_.size() != height * width) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match grid size");
  }
}

std::uint32_t LabelGrid::max_label() const {
  return labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end());
}

SparseSamples::SparseSamples(std::vector<Sample> points) : points_(std::move(points)) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(points_.size());
  for (const Sample& s : points_) {
    if (!std::isfinite(s.depth) || !(s.depth > 0.0)) {
      throw Error(ErrorCode::InvalidSample,
                  "depth at " + coord(s.row, s.col) + " must be positive and finite");
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(s.row) << 32) ^ s.col;
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::DuplicateSample, "coordinate " + coord(s.row, s.col) + " repeated");
    }
  }
}

void SparseSamples::check_bounds(std::size_t height, std::size_t width) const {
  for (const Sample& s : points_) {
    if (s.row >= height || s.col >= width) {
      throw Error(ErrorCode::OutOfBounds, "sample " + coord(s.row, s.col) + " outside " +
                                              std::to_string(height) + "x" + std::to_string(width));
    }
  }
}

LabelGrid canonicalize_labels(const LabelGrid& mask) {
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  std::vector<std::uint32_t> out(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(mask.label(i), static_cast<std::uint32_t>(remap.size()));
    out[i] = it->second;
  }
  return LabelGrid(mask.height(), mask.width(), std::move(out));
}

DepthGrid samples_to_grid(const SparseSamples& samples, std::size_t height, std::size_t width) {
  samples.check_bounds(height, width);
  DepthGrid grid(height, width);
  for (const Sample& s : samples.points()) grid.set(s.row, s.col, s.depth);
  return grid;
}

SparseSamples grid_to_samples(const DepthGrid& grid) {
  std::vector<Sample> points;
  for (std::size_t r = 0; r < grid.height(); ++r) {
    for (std::size_t c = 0; c < grid.width(); ++c) {
      if (grid.valid(r, c)) points.push_back({r, c, grid.value(r, c)});
    }
  }
  return SparseSamples(std::move(points));
}

}  // namespace regscale
