#include "regscale/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "regscale/error.hpp"
#include "regscale/normalize.hpp"
#include "regscale/numeric.hpp"

namespace regscale {

std::string_view to_string(FitKind kind) {
  switch (kind) {
    case FitKind::Affine: return "affine";
    case FitKind::Planar: return "planar";
    case FitKind::MedianRatio: return "median-ratio";
  }
  return "unknown";
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::OwnRegion: return "own-region";
    case Provenance::Expanded: return "expanded";
    case Provenance::GlobalFallback: return "global-fallback";
    case Provenance::Global: return "global";
  }
  return "unknown";
}

void PairedObservations::push(std::size_t row, std::size_t col, double metric, double relative,
                              double nx, double ny) {
  rows.push_back(row);
  cols.push_back(col);
  z1.push_back(metric);
  z2.push_back(relative);
  x.push_back(nx);
  y.push_back(ny);
}

double normalized_coordinate(std::size_t index, std::size_t extent) {
  if (extent <= 1) return 0.0;
  return 2.0 * static_cast<double>(index) / static_cast<double>(extent - 1) - 1.0;
}

namespace {

void push_sample(PairedObservations& obs, const DepthGrid& relative, const Sample& s) {
  const std::size_t i = relative.index(s.row, s.col);
  if (!relative.valid(i)) return;
  obs.push(s.row, s.col, s.depth, relative.value(i), normalized_coordinate(s.col, relative.width()),
           normalized_coordinate(s.row, relative.height()));
}

void require_support(const PairedObservations& obs, std::size_t needed, std::string_view what) {
  if (obs.size() < needed) {
    throw Error(ErrorCode::InsufficientSamples, std::string(what) + " needs " +
                                                    std::to_string(needed) + " samples, got " +
                                                    std::to_string(obs.size()));
  }
}

}  // namespace

PairedObservations pair_observations(const DepthGrid& relative, const SparseSamples& samples,
                                     std::span<const std::uint8_t> pixel_subset) {
  samples.check_bounds(relative.height(), relative.width());
  if (!pixel_subset.empty() && pixel_subset.size() != relative.size()) {
    throw Error(ErrorCode::DimensionMismatch, "pixel subset does not match grid size");
  }
  PairedObservations obs;
  for (const Sample& s : samples.points()) {
    if (!pixel_subset.empty() && !pixel_subset[relative.index(s.row, s.col)]) continue;
    push_sample(obs, relative, s);
  }
  return obs;
}

PairedObservations pair_observations(const DepthGrid& relative, const SparseSamples& samples,
                                     std::span<const std::size_t> sample_indices) {
  PairedObservations obs;
  for (std::size_t i : sample_indices) {
    const Sample& s = samples[i];
    if (!relative.contains(s.row, s.col)) {
      throw Error(ErrorCode::OutOfBounds, "sample outside the relative depth grid");
    }
    push_sample(obs, relative, s);
  }
  return obs;
}

std::size_t minimum_support(FitKind kind) {
  switch (kind) {
    case FitKind::Affine: return 2;
    case FitKind::Planar: return 4;
    case FitKind::MedianRatio: return 1;
  }
  return 1;
}

FitParams fit_affine(const PairedObservations& obs) {
  require_support(obs, 2, "affine fit");
  const std::size_t n = obs.size();

  double lo = obs.z2[0];
  double hi = obs.z2[0];
  for (double v : obs.z2) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) {
    throw Error(ErrorCode::DegenerateDesign, "relative depths are constant across the samples");
  }

  NeumaierSum s1, s2, s22;
  for (std::size_t i = 0; i < n; ++i) {
    s1.add(obs.z1[i]);
    s2.add(obs.z2[i]);
    s22.add(obs.z2[i] * obs.z2[i]);
  }
  const double count = static_cast<double>(n);
  const double mean1 = s1.value() / count;
  const double mean2 = s2.value() / count;

  NeumaierSum sxy, sxx;
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = obs.z2[i] - mean2;
    sxy.add(d2 * (obs.z1[i] - mean1));
    sxx.add(d2 * d2);
  }
  if (!(sxx.value() > 0.0)) {
    throw Error(ErrorCode::DegenerateDesign, "relative depths have zero variance");
  }

  FitParams p;
  p.kind = FitKind::Affine;
  p.alpha = sxy.value() / sxx.value();
  p.beta = mean1 - p.alpha * mean2;
  p.support = n;

  // Eigenvalues of the 2x2 normal matrix [[sum z2^2, sum z2], [sum z2, n]].
  const double a = s22.value();
  const double b = s2.value();
  const double half_trace = 0.5 * (a + count);
  const double disc = std::sqrt(0.25 * (a - count) * (a - count) + b * b);
  const double lmax = half_trace + disc;
  const double lmin = (a * count - b * b) / lmax;
  p.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  return p;
}

FitParams fit_planar(const PairedObservations& obs, const PlanarOptions& options) {
  const Eigen::Index cols = options.fix_slopes ? 2 : 4;
  require_support(obs, static_cast<std::size_t>(cols), "planar fit");
  const auto n = static_cast<Eigen::Index>(obs.size());

  Eigen::MatrixXd design(n, cols);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    design(i, 0) = obs.z2[k];
    if (options.fix_slopes) {
      design(i, 1) = 1.0;
    } else {
      design(i, 1) = obs.x[k];
      design(i, 2) = obs.y[k];
      design(i, 3) = 1.0;
    }
    target(i) = obs.z1[k];
  }

  // Column equilibration keeps the condition estimate independent of units.
  Eigen::VectorXd col_scale(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double norm = design.col(c).norm();
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::DegenerateDesign, "design column " + std::to_string(c) + " is zero");
    }
    col_scale(c) = norm;
    design.col(c) /= norm;
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
  const double smax = sv(0);
  const double smin = sv(cols - 1);
  const double condition =
      smin > 0.0 ? (smax / smin) * (smax / smin) : std::numeric_limits<double>::infinity();
  if (!(condition <= options.condition_max)) {
    throw Error(ErrorCode::DegenerateDesign,
                "surface design is rank deficient (condition " + std::to_string(condition) + ")");
  }

  Eigen::VectorXd solution = qr.solve(target);
  for (Eigen::Index c = 0; c < cols; ++c) solution(c) /= col_scale(c);

  FitParams p;
  p.kind = FitKind::Planar;
  p.alpha = solution(0);
  if (options.fix_slopes) {
    p.delta = solution(1);
  } else {
    p.beta = solution(1);
    p.gamma = solution(2);
    p.delta = solution(3);
  }
  p.support = obs.size();
  p.condition = condition;
  return p;
}

FitParams fit_median_ratio(const PairedObservations& obs) {
  require_support(obs, 1, "median-ratio fit");
  const double m2 = lower_median(obs.z2);
  if (m2 == 0.0) throw Error(ErrorCode::ZeroMedian, "median relative depth is zero");
  FitParams p;
  p.kind = FitKind::MedianRatio;
  p.alpha = lower_median(obs.z1) / m2;
  p.support = obs.size();
  return p;
}

double predict(const FitParams& params, double z2, double x, double y) {
  switch (params.kind) {
    case FitKind::Affine: return params.alpha * z2 + params.beta;
    case FitKind::Planar: return params.alpha * z2 + params.beta * x + params.gamma * y + params.delta;
    case FitKind::MedianRatio: return params.alpha * z2;
  }
  return 0.0;
}

void apply_fit_into(const DepthGrid& relative, const FitParams& params,
                    std::span<const std::size_t> pixels, DepthRange clamp, DepthGrid& out) {
  if (!out.same_shape(relative)) {
    throw Error(ErrorCode::DimensionMismatch, "output grid does not match relative grid");
  }
  const std::size_t w = relative.width();
  const std::size_t h = relative.height();
  for (std::size_t i : pixels) {
    if (!relative.valid(i)) {
      out.invalidate(i);
      continue;
    }
    const double x = normalized_coordinate(i % w, w);
    const double y = normalized_coordinate(i / w, h);
    out.set(i, clamp.clamp(predict(params, relative.value(i), x, y)));
  }
}

DepthGrid apply_fit(const DepthGrid& relative, const FitParams& params,
                    std::span<const std::size_t> pixels, DepthRange clamp) {
  DepthGrid out(relative.height(), relative.width());
  apply_fit_into(relative, params, pixels, clamp, out);
  return out;
}

}  // namespace regscale
