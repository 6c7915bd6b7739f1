#pragma once

#include <span>
#include <vector>

#include "regscale/grids.hpp"

namespace regscale {

enum class Normalization {
  MedianMad,  // t = median, s = mean absolute deviation around the median
  MeanStd,    // t = mean, s = population standard deviation
};

struct NormalizationStats {
  double translation = 0.0;
  double scale = 1.0;
};

struct NormalizedDepth {
  DepthGrid grid;
  NormalizationStats stats;
};

inline constexpr double kDefaultInverseEpsilon = 1e-6;

// D = 1 / max(d, epsilon) at valid pixels.
DepthGrid invert_depth(const DepthGrid& inverse_depth, double epsilon = kDefaultInverseEpsilon);

// Lower median (index (n-1)/2 of the sorted values). Takes its argument by value
// because it partially reorders it.
double lower_median(std::vector<double> values);

// Computed over valid pixels only; invalid pixels are left untouched.
// Throws DegenerateGrid for fewer than two valid pixels or a zero scale.
NormalizedDepth affine_invariant_normalize(const DepthGrid& depth,
                                          Normalization kind = Normalization::MedianMad);

}  // namespace regscale
