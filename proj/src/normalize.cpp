#include "regscale/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "regscale/error.hpp"
#include "regscale/numeric.hpp"

namespace regscale {

DepthGrid invert_depth(const DepthGrid& inverse_depth, double epsilon) {
  DepthGrid out(inverse_depth.height(), inverse_depth.width());
  for (std::size_t i = 0; i < inverse_depth.size(); ++i) {
    if (inverse_depth.valid(i)) out.set(i, 1.0 / std::max(inverse_depth.value(i), epsilon));
  }
  return out;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::DegenerateGrid, "median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

NormalizedDepth affine_invariant_normalize(const DepthGrid& depth, Normalization kind) {
  std::vector<double> valid_values;
  valid_values.reserve(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth.valid(i)) valid_values.push_back(depth.value(i));
  }
  if (valid_values.size() < 2) {
    throw Error(ErrorCode::DegenerateGrid, "normalization needs at least two valid pixels");
  }
  const double n = static_cast<double>(valid_values.size());

  NormalizationStats stats;
  if (kind == Normalization::MedianMad) {
    stats.translation = lower_median(valid_values);
    NeumaierSum deviation;
    for (double v : valid_values) deviation.add(std::abs(v - stats.translation));
    stats.scale = deviation.value() / n;
  } else {
    NeumaierSum sum;
    for (double v : valid_values) sum.add(v);
    stats.translation = sum.value() / n;
    NeumaierSum squares;
    for (double v : valid_values) {
      const double d = v - stats.translation;
      squares.add(d * d);
    }
    stats.scale = std::sqrt(squares.value() / n);
  }
  if (!(stats.scale > 0.0) || !std::isfinite(stats.scale)) {
    throw Error(ErrorCode::DegenerateGrid, "relative depth map has zero spread");
  }

  DepthGrid out(depth.height(), depth.width());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth.valid(i)) out.set(i, (depth.value(i) - stats.translation) / stats.scale);
  }
  return {std::move(out), stats};
}

}  // namespace regscale
