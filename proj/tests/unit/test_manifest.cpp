#include <doctest.h>

#include <filesystem>

#include "regscale/error.hpp"
#include "regscale/manifest.hpp"

using namespace regscale;
namespace fs = std::filesystem;

namespace {

RunManifest sample_manifest() {
  RunManifest m;
  m.image_id = "scene_003";
  m.relative = "/data/rel.pfm";
  m.mask = "/data/mask.pgm";
  m.gt = "/data/gt.dpg";
  m.n_samples = 500;
  m.seed = 42;
  m.noise_sigma = 0.02;
  m.already_depth = true;
  m.pgm_scale = 256.0;
  m.pipeline.method = Method::SSF;
  m.pipeline.min_samples_planar = 6;
  m.pipeline.max_hops = 2;
  m.pipeline.clamp = {0.2, 5.0};
  m.pipeline.regions.connectivity = Connectivity::Eight;
  m.pipeline.regions.merge_same_label = true;
  m.pipeline.normalization = Normalization::MeanStd;
  m.pipeline.fallback_chain = std::vector<Method>{Method::RegionMedian, Method::GlobalLinear};
  m.eval_range = DepthRange::void_dataset();
  m.output_depth = "/out/depth.pfm";
  m.output_report = "/out/regions.csv";
  m.output_metrics = "/out/metrics.csv";
  return m;
}

void check_same(const RunManifest& a, const RunManifest& b) {
  CHECK(a.image_id == b.image_id);
  CHECK(a.relative == b.relative);
  CHECK(a.mask == b.mask);
  CHECK(a.samples == b.samples);
  CHECK(a.gt == b.gt);
  CHECK(a.already_depth == b.already_depth);
  CHECK(a.inverse_epsilon == b.inverse_epsilon);
  CHECK(a.pgm_scale == b.pgm_scale);
  CHECK(a.n_samples == b.n_samples);
  CHECK(a.beams == b.beams);
  CHECK(a.seed == b.seed);
  CHECK(a.noise_sigma == b.noise_sigma);
  CHECK(a.pipeline.method == b.pipeline.method);
  CHECK(a.pipeline.min_samples_linear == b.pipeline.min_samples_linear);
  CHECK(a.pipeline.min_samples_planar == b.pipeline.min_samples_planar);
  CHECK(a.pipeline.min_samples_median == b.pipeline.min_samples_median);
  CHECK(a.pipeline.max_hops == b.pipeline.max_hops);
  CHECK(a.pipeline.clamp == b.pipeline.clamp);
  CHECK(a.pipeline.regions.connectivity == b.pipeline.regions.connectivity);
  CHECK(a.pipeline.regions.merge_same_label == b.pipeline.regions.merge_same_label);
  CHECK(a.pipeline.normalization == b.pipeline.normalization);
  CHECK(a.pipeline.fallback_chain == b.pipeline.fallback_chain);
  CHECK(a.pipeline.condition_max == b.pipeline.condition_max);
  CHECK(a.eval_range == b.eval_range);
  CHECK(a.output_depth == b.output_depth);
  CHECK(a.output_report == b.output_report);
  CHECK(a.output_metrics == b.output_metrics);
  CHECK(a.output_samples == b.output_samples);
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

TEST_CASE("manifest JSON round trip") {
  const RunManifest m = sample_manifest();
  const std::string text = manifest_to_json(m);
  check_same(manifest_from_json(text, "/elsewhere"), m);
  CHECK(manifest_to_json(manifest_from_json(text, "/elsewhere")) == text);

  RunManifest plain;
  plain.relative = "/r.pfm";
  plain.mask = "/m.pgm";
  plain.samples = "/s.csv";
  plain.output_depth = "/o.pfm";
  check_same(manifest_from_json(manifest_to_json(plain), "/"), plain);
}

TEST_CASE("relative paths resolve against the manifest directory") {
  const std::string text = R"({
    "format_version": 1,
    "inputs": {"relative": "rel.pfm", "mask": "sub/mask.pgm", "samples": "/abs/s.csv"},
    "outputs": {"depth": "out/depth.pfm"}
  })";
  const RunManifest m = manifest_from_json(text, "/runs/a");
  CHECK(m.relative == fs::path("/runs/a/rel.pfm"));
  CHECK(m.mask == fs::path("/runs/a/sub/mask.pgm"));
  CHECK(m.samples == fs::path("/abs/s.csv"));
  CHECK(m.output_depth == fs::path("/runs/a/out/depth.pfm"));
  CHECK(m.pipeline.method == Method::SLF);
}

TEST_CASE("invalid manifests") {
  RunManifest m = sample_manifest();
  m.beams = 4;  // together with n_samples
  CHECK(code_of([&] { validate(m); }) == ErrorCode::InvalidSpec);
  m = sample_manifest();
  m.gt.reset();
  CHECK(code_of([&] { validate(m); }) == ErrorCode::InvalidSpec);
  m = sample_manifest();
  m.pipeline.clamp = {5.0, 1.0};
  CHECK(code_of([&] { validate(m); }) == ErrorCode::InvalidSpec);
  m = sample_manifest();
  m.pipeline.fallback_chain = std::vector<Method>{Method::SLF};
  CHECK(code_of([&] { validate(m); }) == ErrorCode::InvalidSpec);

  CHECK(code_of([] { manifest_from_json("{", "/"); }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          manifest_from_json(R"({"format_version": 2, "inputs": {"relative": "a", "mask": "b", "samples": "c"},
                                 "outputs": {"depth": "d"}})",
                             "/");
        }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] {
          manifest_from_json(R"({"format_version": 1, "inputs": {"relative": "a", "mask": "b", "samples": "c"},
                                 "pipeline": {"method": "magic"}, "outputs": {"depth": "d"}})",
                             "/");
        }) == ErrorCode::InvalidSpec);
}
