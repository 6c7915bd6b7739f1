#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "regscale/grids.hpp"

namespace regscale {

enum class FitKind {
  Affine,       // z1 = alpha * z2 + beta
  Planar,       // z1 = alpha * z2 + beta * x + gamma * y + delta
  MedianRatio,  // z1 = alpha * z2
};

enum class Provenance {
  OwnRegion,       // fitted on the region's own samples
  Expanded,        // fitted on samples gathered from neighbouring regions
  GlobalFallback,  // every regional attempt failed; one fit over all samples
  Global,          // a whole-image method was requested
};

std::string_view to_string(FitKind kind);
std::string_view to_string(Provenance provenance);

struct FitParams {
  FitKind kind = FitKind::Affine;
  double alpha = 1.0;
  double beta = 0.0;   // shift (Affine) or x-slope in normalized units (Planar)
  double gamma = 0.0;  // y-slope, Planar only
  double delta = 0.0;  // shift, Planar only
  std::size_t support = 0;
  double condition = 1.0;
  Provenance provenance = Provenance::OwnRegion;
  std::size_t hop = 0;  // meaningful for Provenance::Expanded

  friend bool operator==(const FitParams&, const FitParams&) = default;
};

// Sample depths (z1, meters) paired with relative depths (z2) at the same pixel.
// x, y are the pixel coordinates mapped to [-1, 1].
struct PairedObservations {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  std::vector<double> z1;
  std::vector<double> z2;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return z1.size(); }
  void push(std::size_t row, std::size_t col, double metric, double relative, double nx, double ny);
};

// 2 * index / (extent - 1) - 1, or 0 for a single-pixel extent.
double normalized_coordinate(std::size_t index, std::size_t extent);

// Samples on invalid relative pixels are dropped. pixel_subset, when given, is a
// per-pixel membership mask of the same size as the grid.
PairedObservations pair_observations(const DepthGrid& relative, const SparseSamples& samples,
                                     std::span<const std::uint8_t> pixel_subset = {});
PairedObservations pair_observations(const DepthGrid& relative, const SparseSamples& samples,
                                     std::span<const std::size_t> sample_indices);

inline constexpr double kDefaultConditionMax = 1e8;

struct PlanarOptions {
  double condition_max = kDefaultConditionMax;
  // Pins beta = gamma = 0, reducing the surface fit to a scale-and-shift fit.
  bool fix_slopes = false;
};

FitParams fit_affine(const PairedObservations& obs);
FitParams fit_planar(const PairedObservations& obs, const PlanarOptions& options = {});
FitParams fit_median_ratio(const PairedObservations& obs);

std::size_t minimum_support(FitKind kind);

struct DepthRange {
  double min = 0.0;
  double max = 0.0;

  static constexpr DepthRange nyu() { return {0.001, 10.0}; }
  static constexpr DepthRange void_dataset() { return {0.2, 5.0}; }

  double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
  bool contains(double v) const { return v >= min && v <= max; }
  friend bool operator==(const DepthRange&, const DepthRange&) = default;
};

// Unclamped model value at one pixel.
double predict(const FitParams& params, double z2, double x, double y);

// Writes clamped predictions for the listed pixels into out; pixels that are
// invalid in the relative grid are invalidated.
void apply_fit_into(const DepthGrid& relative, const FitParams& params,
                    std::span<const std::size_t> pixels, DepthRange clamp, DepthGrid& out);

// Same, returning a grid that is valid only on the listed pixels.
DepthGrid apply_fit(const DepthGrid& relative, const FitParams& params,
                    std::span<const std::size_t> pixels, DepthRange clamp);

}  // namespace regscale
