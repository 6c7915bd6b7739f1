#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "regscale/fitting.hpp"
#include "regscale/grids.hpp"

namespace regscale {

// depth = m * x + n * y + l over normalized coordinates x, y in [-1, 1].
struct Plane {
  double m = 0.0;
  double n = 0.0;
  double l = 0.0;
};

// gt = scale * rel + shift
struct AffineDistortion {
  double scale = 1.0;
  double shift = 0.0;
};

// gt = scale * rel + slope_x * x + slope_y * y + shift
struct PlanarDistortion {
  double scale = 1.0;
  double slope_x = 0.0;
  double slope_y = 0.0;
  double shift = 0.0;
};

// rel = gt ^ gamma; neither fit family represents it exactly.
struct NonlinearDistortion {
  double gamma = 1.2;
};

using Distortion = std::variant<AffineDistortion, PlanarDistortion, NonlinearDistortion>;

// Ground truth of one region: a plane plus an optional paraboloid bump
// curvature * ((x - center_x)^2 + (y - center_y)^2) that makes it non-planar.
struct RegionSurface {
  Plane plane;
  double curvature = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  Distortion distortion = AffineDistortion{};
};

struct GridLayout {
  std::size_t rows = 1;
  std::size_t cols = 1;
};

// Nearest-site labeling with sites drawn from the scene seed; ties go to the
// lower site index.
struct VoronoiLayout {
  std::size_t sites = 1;
};

using Layout = std::variant<GridLayout, VoronoiLayout>;

struct SceneSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  Layout layout = GridLayout{};
  std::vector<RegionSurface> regions;  // one per layout cell / site
  std::uint64_t seed = 0;
  DepthRange depth_range{0.5, 8.0};
  double noise_sigma = 0.0;  // meters, applied to sparse samples only
};

struct Scene {
  DepthGrid gt;
  DepthGrid relative;
  LabelGrid mask;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

std::size_t layout_region_count(const Layout& layout);
// Sites in normalized coordinates.
std::vector<Point2> voronoi_sites(std::size_t count, std::uint64_t seed);
LabelGrid render_layout(std::size_t height, std::size_t width, const Layout& layout,
                        std::uint64_t seed);

double surface_depth(const RegionSurface& surface, double x, double y);
// Relative depth the distortion maps onto `gt`.
double distort_inverse(const Distortion& d, double gt, double x, double y);
// Metric depth recovered from relative depth.
double distort_forward(const Distortion& d, double rel, double x, double y);

// Throws InvalidSpec for bad dimensions, a region count that does not match the
// layout, a non-positive distortion scale, or ground truth leaving depth_range.
Scene generate_scene(const SceneSpec& spec);

enum class DistortionFamily { Affine, Planar, Nonlinear, Mixed };
enum class LayoutChoice { Grid, Voronoi, Either };

struct RandomSceneOptions {
  std::size_t height = 480;
  std::size_t width = 640;
  std::size_t min_regions = 6;
  std::size_t max_regions = 20;
  LayoutChoice layout = LayoutChoice::Either;
  DistortionFamily family = DistortionFamily::Affine;
  DepthRange depth_range{0.5, 8.0};
  double scale_min = 0.5;
  double scale_max = 3.0;
  double shift_min = -15.0;
  double shift_max = 7.0;
  double slope_min = 0.5;  // |planar distortion slopes|, meters per normalized unit
  double slope_max = 2.0;
  double gamma_min = 1.1;
  double gamma_max = 1.4;
  double noise_sigma = 0.0;
};

// A random but valid SceneSpec; every region has a sloped, curved surface that
// stays inside depth_range.
SceneSpec random_scene_spec(const RandomSceneOptions& options, std::uint64_t seed);

// n distinct valid pixels drawn uniformly without replacement, returned in
// row-major order. Gaussian noise of noise_sigma is added to the depths.
SparseSamples sample_uniform(const DepthGrid& gt, std::size_t n, std::uint64_t seed,
                             double noise_sigma = 0.0);

// Row index of beam k out of `beams`: floor((k + 0.5) * height / beams).
std::size_t beam_row(std::size_t k, std::size_t beams, std::size_t height);

// Every valid pixel on `beams` evenly spaced rows.
SparseSamples sample_beams(const DepthGrid& gt, std::size_t beams, std::uint64_t seed,
                           double noise_sigma = 0.0);

}  // namespace regscale
