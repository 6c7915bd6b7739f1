#include "regscale/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "regscale/error.hpp"
#include "regscale/rng.hpp"

namespace regscale {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double noisy_depth(double depth, double sigma, Rng& rng) {
  if (sigma <= 0.0) return depth;
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double v = depth + sigma * rng.normal();
    if (v > 0.0) return v;
  }
  return depth;
}

double distortion_scale(const Distortion& d) {
  return std::visit(Overloaded{[](const AffineDistortion& a) { return a.scale; },
                               [](const PlanarDistortion& p) { return p.scale; },
                               [](const NonlinearDistortion& n) { return n.gamma; }},
                    d);
}

}  // namespace

std::size_t layout_region_count(const Layout& layout) {
  return std::visit(Overloaded{[](const GridLayout& g) { return g.rows * g.cols; },
                               [](const VoronoiLayout& v) { return v.sites; }},
                    layout);
}

std::vector<Point2> voronoi_sites(std::size_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, SeedPurpose::Layout));
  std::vector<Point2> sites(count);
  for (Point2& s : sites) {
    s.x = rng.uniform(-1.0, 1.0);
    s.y = rng.uniform(-1.0, 1.0);
  }
  return sites;
}

LabelGrid render_layout(std::size_t height, std::size_t width, const Layout& layout,
                        std::uint64_t seed) {
  LabelGrid mask(height, width);
  if (const auto* grid = std::get_if<GridLayout>(&layout)) {
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const std::size_t cell_r = r * grid->rows / height;
        const std::size_t cell_c = c * grid->cols / width;
        mask.set(r, c, static_cast<std::uint32_t>(cell_r * grid->cols + cell_c));
      }
    }
    return mask;
  }
  const auto& voronoi = std::get<VoronoiLayout>(layout);
  const std::vector<Point2> sites = voronoi_sites(voronoi.sites, seed);
  // Distances in pixel units so cells are not stretched by the aspect ratio.
  const double sx = 0.5 * static_cast<double>(width > 1 ? width - 1 : 1);
  const double sy = 0.5 * static_cast<double>(height > 1 ? height - 1 : 1);
  for (std::size_t r = 0; r < height; ++r) {
    const double py = normalized_coordinate(r, height);
    for (std::size_t c = 0; c < width; ++c) {
      const double px = normalized_coordinate(c, width);
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_site = 0;
      for (std::size_t k = 0; k < sites.size(); ++k) {
        const double dx = (px - sites[k].x) * sx;
        const double dy = (py - sites[k].y) * sy;
        const double d = dx * dx + dy * dy;
        if (d < best) {
          best = d;
          best_site = k;
        }
      }
      mask.set(r, c, static_cast<std::uint32_t>(best_site));
    }
  }
  return mask;
}

double surface_depth(const RegionSurface& s, double x, double y) {
  const double dx = x - s.center_x;
  const double dy = y - s.center_y;
  return s.plane.m * x + s.plane.n * y + s.plane.l + s.curvature * (dx * dx + dy * dy);
}

double distort_inverse(const Distortion& d, double gt, double x, double y) {
  return std::visit(
      Overloaded{[&](const AffineDistortion& a) { return (gt - a.shift) / a.scale; },
                 [&](const PlanarDistortion& p) {
                   return (gt - p.slope_x * x - p.slope_y * y - p.shift) / p.scale;
                 },
                 [&](const NonlinearDistortion& n) { return std::pow(gt, n.gamma); }},
      d);
}

double distort_forward(const Distortion& d, double rel, double x, double y) {
  return std::visit(
      Overloaded{[&](const AffineDistortion& a) { return a.scale * rel + a.shift; },
                 [&](const PlanarDistortion& p) {
                   return p.scale * rel + p.slope_x * x + p.slope_y * y + p.shift;
                 },
                 [&](const NonlinearDistortion& n) { return std::pow(rel, 1.0 / n.gamma); }},
      d);
}

Scene generate_scene(const SceneSpec& spec) {
  if (spec.height == 0 || spec.width == 0) throw Error(ErrorCode::InvalidSpec, "empty scene");
  if (const auto* grid = std::get_if<GridLayout>(&spec.layout);
      grid && (grid->rows == 0 || grid->cols == 0)) {
    throw Error(ErrorCode::InvalidSpec, "grid layout needs at least one row and column");
  }
  const std::size_t count = layout_region_count(spec.layout);
  if (count == 0 || spec.regions.size() != count) {
    throw Error(ErrorCode::InvalidSpec, "layout has " + std::to_string(count) +
                                            " regions but spec describes " +
                                            std::to_string(spec.regions.size()));
  }
  if (!(spec.depth_range.min > 0.0) || !(spec.depth_range.max > spec.depth_range.min)) {
    throw Error(ErrorCode::InvalidSpec, "depth range must satisfy 0 < min < max");
  }
  if (!(spec.noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidSpec, "negative noise sigma");
  for (const RegionSurface& r : spec.regions) {
    if (!(distortion_scale(r.distortion) > 0.0)) {
      throw Error(ErrorCode::InvalidSpec, "distortions must be monotone increasing (scale > 0)");
    }
  }

  Scene scene;
  scene.mask = render_layout(spec.height, spec.width, spec.layout, spec.seed);
  scene.gt = DepthGrid(spec.height, spec.width);
  scene.relative = DepthGrid(spec.height, spec.width);
  for (std::size_t r = 0; r < spec.height; ++r) {
    const double y = normalized_coordinate(r, spec.height);
    for (std::size_t c = 0; c < spec.width; ++c) {
      const double x = normalized_coordinate(c, spec.width);
      const RegionSurface& surface = spec.regions[scene.mask.label(r, c)];
      const double g = surface_depth(surface, x, y);
      if (!spec.depth_range.contains(g)) {
        throw Error(ErrorCode::InvalidSpec, "ground truth " + std::to_string(g) + " at (" +
                                                std::to_string(r) + ", " + std::to_string(c) +
                                                ") leaves the depth range");
      }
      scene.gt.set(r, c, g);
      scene.relative.set(r, c, distort_inverse(surface.distortion, g, x, y));
    }
  }
  return scene;
}

SceneSpec random_scene_spec(const RandomSceneOptions& options, std::uint64_t seed) {
  if (options.min_regions == 0 || options.max_regions < options.min_regions) {
    throw Error(ErrorCode::InvalidSpec, "region count range is empty");
  }
  SceneSpec spec;
  spec.height = options.height;
  spec.width = options.width;
  spec.seed = seed;
  spec.depth_range = options.depth_range;
  spec.noise_sigma = options.noise_sigma;

  Rng rng(derive_seed(seed, SeedPurpose::Surfaces));
  bool voronoi = options.layout == LayoutChoice::Voronoi;
  if (options.layout == LayoutChoice::Either) voronoi = rng.below(2) == 1;
  if (voronoi) {
    const std::size_t span = options.max_regions - options.min_regions + 1;
    spec.layout = VoronoiLayout{options.min_regions + rng.below(span)};
  } else {
    std::vector<GridLayout> shapes;
    for (std::size_t rows = 1; rows <= options.max_regions; ++rows) {
      for (std::size_t cols = rows; cols <= options.max_regions; ++cols) {
        const std::size_t n = rows * cols;
        if (n >= options.min_regions && n <= options.max_regions && cols <= 2 * rows + 1) {
          shapes.push_back({rows, cols});
        }
      }
    }
    if (shapes.empty()) shapes.push_back({1, options.min_regions});
    spec.layout = shapes[rng.below(shapes.size())];
  }

  const std::size_t count = layout_region_count(spec.layout);
  const LabelGrid mask = render_layout(spec.height, spec.width, spec.layout, seed);

  // Extent of every region in normalized coordinates.
  struct Extent {
    double sum_x = 0, sum_y = 0;
    std::size_t n = 0;
  };
  std::vector<Extent> extents(count);
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      Extent& e = extents[mask.label(r, c)];
      e.sum_x += normalized_coordinate(c, spec.width);
      e.sum_y += normalized_coordinate(r, spec.height);
      ++e.n;
    }
  }
  std::vector<Point2> centers(count);
  std::vector<double> max_dx(count, 0.0), max_dy(count, 0.0), max_r2(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    if (extents[k].n > 0) {
      centers[k] = {extents[k].sum_x / static_cast<double>(extents[k].n),
                    extents[k].sum_y / static_cast<double>(extents[k].n)};
    }
  }
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      const std::size_t k = mask.label(r, c);
      const double dx = std::abs(normalized_coordinate(c, spec.width) - centers[k].x);
      const double dy = std::abs(normalized_coordinate(r, spec.height) - centers[k].y);
      max_dx[k] = std::max(max_dx[k], dx);
      max_dy[k] = std::max(max_dy[k], dy);
      max_r2[k] = std::max(max_r2[k], dx * dx + dy * dy);
    }
  }

  const double lo = options.depth_range.min;
  const double hi = options.depth_range.max;
  const double margin = 0.35 * (hi - lo);
  constexpr double kTiny = 1e-9;
  spec.regions.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    RegionSurface& s = spec.regions[k];
    const double center_depth = rng.uniform(lo + margin, hi - margin);
    // Slope and bump budgets sum to 0.95 * margin over the region's support.
    const double m = rng.sign() * rng.uniform(0.5, 1.0) * 0.3 * margin / std::max(max_dx[k], kTiny);
    const double n = rng.sign() * rng.uniform(0.5, 1.0) * 0.3 * margin / std::max(max_dy[k], kTiny);
    const double q = rng.sign() * rng.uniform(0.5, 1.0) * 0.35 * margin / std::max(max_r2[k], kTiny);
    s.center_x = centers[k].x;
    s.center_y = centers[k].y;
    s.plane = {m, n, center_depth - m * s.center_x - n * s.center_y};
    s.curvature = q;

    DistortionFamily family = options.family;
    if (family == DistortionFamily::Mixed) family = static_cast<DistortionFamily>(rng.below(3));
    switch (family) {
      case DistortionFamily::Affine:
        s.distortion = AffineDistortion{rng.uniform(options.scale_min, options.scale_max),
                                        rng.uniform(options.shift_min, options.shift_max)};
        break;
      case DistortionFamily::Planar: {
        const double scale = rng.uniform(options.scale_min, options.scale_max);
        const double bx = rng.sign() * rng.uniform(options.slope_min, options.slope_max);
        const double by = rng.sign() * rng.uniform(options.slope_min, options.slope_max);
        s.distortion = PlanarDistortion{scale, bx, by,
                                        rng.uniform(options.shift_min, options.shift_max)};
        break;
      }
      case DistortionFamily::Nonlinear:
      case DistortionFamily::Mixed:
        s.distortion = NonlinearDistortion{rng.uniform(options.gamma_min, options.gamma_max)};
        break;
    }
  }
  return spec;
}

SparseSamples sample_uniform(const DepthGrid& gt, std::size_t n, std::uint64_t seed,
                             double noise_sigma) {
  std::vector<std::size_t> pool;
  pool.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt.valid(i)) pool.push_back(i);
  }
  if (n > pool.size()) {
    throw Error(ErrorCode::TooManyRequested, "requested " + std::to_string(n) + " samples from " +
                                                 std::to_string(pool.size()) + " valid pixels");
  }
  Rng pick(derive_seed(seed, SeedPurpose::Sampling));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + pick.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());

  Rng noise(derive_seed(seed, SeedPurpose::Noise));
  std::vector<Sample> points;
  points.reserve(n);
  for (std::size_t i : pool) {
    points.push_back({i / gt.width(), i % gt.width(), noisy_depth(gt.value(i), noise_sigma, noise)});
  }
  return SparseSamples(std::move(points));
}

std::size_t beam_row(std::size_t k, std::size_t beams, std::size_t height) {
  return ((2 * k + 1) * height) / (2 * beams);
}

SparseSamples sample_beams(const DepthGrid& gt, std::size_t beams, std::uint64_t seed,
                           double noise_sigma) {
  if (beams == 0 || beams > gt.height()) {
    throw Error(ErrorCode::InvalidSpec, "beam count must be in [1, height]");
  }
  Rng noise(derive_seed(seed, SeedPurpose::Noise));
  std::vector<Sample> points;
  for (std::size_t k = 0; k < beams; ++k) {
    const std::size_t row = beam_row(k, beams, gt.height());
    for (std::size_t c = 0; c < gt.width(); ++c) {
      if (gt.valid(row, c)) points.push_back({row, c, noisy_depth(gt.value(row, c), noise_sigma, noise)});
    }
  }
  return SparseSamples(std::move(points));
}

}  // namespace regscale
