#include <doctest.h>

#include <cmath>
#include <set>

#include "regscale/error.hpp"
#include "regscale/fitting.hpp"
#include "regscale/normalize.hpp"
#include "regscale/pipeline.hpp"
#include "regscale/rng.hpp"
#include "regscale/synth.hpp"

using namespace regscale;

namespace {

SceneSpec one_region(double depth, Distortion d) {
  SceneSpec spec;
  spec.height = 6;
  spec.width = 9;
  spec.layout = GridLayout{1, 1};
  RegionSurface s;
  s.plane = {0.0, 0.0, depth};
  s.distortion = d;
  spec.regions.push_back(s);
  return spec;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("identity distortion of a flat plane") {
  const Scene scene = generate_scene(one_region(2.0, AffineDistortion{1.0, 0.0}));
  for (std::size_t i = 0; i < scene.gt.size(); ++i) {
    CHECK(scene.gt.value(i) == 2.0);
    CHECK(scene.relative.value(i) == 2.0);
    CHECK(scene.mask.label(i) == 0);
  }
}

TEST_CASE("invalid specs") {
  SceneSpec spec = one_region(2.0, AffineDistortion{1.0, 0.0});
  spec.regions.push_back(spec.regions[0]);
  CHECK(code_of([&] { generate_scene(spec); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { generate_scene(one_region(2.0, AffineDistortion{0.0, 1.0})); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { generate_scene(one_region(20.0, AffineDistortion{1.0, 0.0})); }) == ErrorCode::InvalidSpec);
  SceneSpec empty = one_region(2.0, AffineDistortion{});
  empty.width = 0;
  CHECK(code_of([&] { generate_scene(empty); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("two affine regions are recovered by SLF") {
  SceneSpec spec;
  spec.height = 30;
  spec.width = 40;
  spec.layout = GridLayout{1, 2};
  RegionSurface a, b;
  a.plane = {0.3, -0.2, 3.0};
  a.curvature = 0.4;
  a.distortion = AffineDistortion{2.0, 1.0};
  b.plane = {-0.5, 0.1, 4.0};
  b.distortion = AffineDistortion{0.5, 3.0};
  spec.regions = {a, b};
  const Scene scene = generate_scene(spec);
  const SparseSamples s = sample_uniform(scene.gt, 40, 1);
  const RescaleResult r = rescale(scene.relative, scene.mask, s, PipelineConfig{});
  for (std::size_t i = 0; i < scene.gt.size(); ++i) CHECK(std::abs(r.depth.value(i) - scene.gt.value(i)) < 1e-9);
}

TEST_CASE("planar distortion of a curved surface separates SLF from SSF") {
  SceneSpec spec = one_region(3.0, PlanarDistortion{1.5, 1.0, -0.8, 0.5});
  spec.height = 40;
  spec.width = 50;
  spec.regions[0].curvature = 0.6;
  spec.regions[0].center_x = 0.2;
  const Scene scene = generate_scene(spec);
  const SparseSamples s = sample_uniform(scene.gt, 100, 2);
  PipelineConfig cfg;
  const RescaleResult slf = rescale(scene.relative, scene.mask, s, cfg);
  cfg.method = Method::SSF;
  const RescaleResult ssf = rescale(scene.relative, scene.mask, s, cfg);
  CHECK(*slf.reports[0].residual_rmse > 1e-3);
  CHECK(*ssf.reports[0].residual_rmse < 1e-9);
}

TEST_CASE("forward distortion inverts the generated relative depth") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    RandomSceneOptions opt;
    opt.height = 60;
    opt.width = 80;
    opt.family = static_cast<DistortionFamily>(seed % 4);
    const SceneSpec spec = random_scene_spec(opt, seed);
    const Scene scene = generate_scene(spec);
    const auto regions = layout_region_count(spec.layout);
    CHECK(spec.regions.size() == regions);
    CHECK(regions >= opt.min_regions);
    CHECK(regions <= opt.max_regions);
    for (std::size_t r = 0; r < scene.gt.height(); ++r) {
      for (std::size_t c = 0; c < scene.gt.width(); ++c) {
        const double x = normalized_coordinate(c, scene.gt.width());
        const double y = normalized_coordinate(r, scene.gt.height());
        const Distortion& d = spec.regions[scene.mask.label(r, c)].distortion;
        const double g = scene.gt.value(r, c);
        CHECK(std::abs(distort_forward(d, scene.relative.value(r, c), x, y) - g) <= 1e-12 * std::max(1.0, g));
        CHECK(spec.depth_range.contains(g));
      }
    }
    // Same seed, same scene.
    const Scene again = generate_scene(random_scene_spec(opt, seed));
    CHECK(again.gt == scene.gt);
    CHECK(again.relative == scene.relative);
    CHECK(again.mask == scene.mask);
  }
}

TEST_CASE("monotone distortions preserve ordering within a region") {
  RandomSceneOptions opt;
  opt.height = 30;
  opt.width = 40;
  opt.family = DistortionFamily::Nonlinear;
  const SceneSpec spec = random_scene_spec(opt, 77);
  const Scene scene = generate_scene(spec);
  for (std::size_t i = 0; i + 1 < scene.gt.size(); ++i) {
    if (scene.mask.label(i) != scene.mask.label(i + 1)) continue;
    const double dg = scene.gt.value(i + 1) - scene.gt.value(i);
    const double dr = scene.relative.value(i + 1) - scene.relative.value(i);
    CHECK(dg * dr >= 0.0);
  }
}

TEST_CASE("voronoi layouts") {
  const LabelGrid a = render_layout(50, 70, VoronoiLayout{9}, 5);
  CHECK(a == render_layout(50, 70, VoronoiLayout{9}, 5));
  CHECK(a.max_label() < 9);
  const auto sites = voronoi_sites(9, 5);
  CHECK(sites.size() == 9);
  for (const Point2& p : sites) {
    CHECK(std::abs(p.x) <= 1.0);
    CHECK(std::abs(p.y) <= 1.0);
  }
  const LabelGrid g = render_layout(4, 6, GridLayout{2, 3}, 0);
  CHECK(g.label(0, 0) == 0);
  CHECK(g.label(0, 5) == 2);
  CHECK(g.label(3, 0) == 3);
  CHECK(g.label(3, 5) == 5);
}

TEST_CASE("uniform sampling") {
  const Scene scene = generate_scene(random_scene_spec({.height = 48, .width = 64}, 3));
  const SparseSamples all = sample_uniform(scene.gt, scene.gt.size(), 1);
  CHECK(all.size() == scene.gt.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i].row * 64 + all[i].col == i);
    CHECK(all[i].depth == scene.gt.value(i));
  }
  const SparseSamples a = sample_uniform(scene.gt, 250, 9);
  CHECK(a.size() == 250);
  CHECK(a == sample_uniform(scene.gt, 250, 9));
  CHECK_FALSE(a == sample_uniform(scene.gt, 250, 10));
  std::set<std::size_t> seen;
  for (const Sample& s : a.points()) seen.insert(s.row * 64 + s.col);
  CHECK(seen.size() == 250);

  const SparseSamples noisy = sample_uniform(scene.gt, 250, 9, 0.02);
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    CHECK(noisy[i].row == a[i].row);
    CHECK(noisy[i].col == a[i].col);
    CHECK(noisy[i].depth > 0.0);
  }
  CHECK(code_of([&] { sample_uniform(scene.gt, scene.gt.size() + 1, 1); }) == ErrorCode::TooManyRequested);
}

TEST_CASE("beam sampling") {
  const DepthGrid gt = DepthGrid::filled(480, 640, 2.0);
  const SparseSamples one = sample_beams(gt, 1, 0);
  CHECK(one.size() == 640);
  for (const Sample& s : one.points()) CHECK(s.row == 240);
  CHECK(beam_row(0, 2, 480) == 120);
  CHECK(beam_row(1, 2, 480) == 360);
  CHECK(sample_beams(gt, 480, 0).size() == 480 * 640);
  CHECK(code_of([&] { sample_beams(gt, 0, 0); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([&] { sample_beams(gt, 481, 0); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, SeedPurpose::Sampling, 0) == derive_seed(1, SeedPurpose::Sampling, 0));
  CHECK(derive_seed(1, SeedPurpose::Sampling, 0) != derive_seed(1, SeedPurpose::Noise, 0));
  CHECK(derive_seed(1, SeedPurpose::Sampling, 0) != derive_seed(2, SeedPurpose::Sampling, 0));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(a.below(7) < 7);
    b.below(7);
  }
}
