#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regscale/manifest.hpp"
#include "regscale/metrics.hpp"
#include "regscale/pipeline.hpp"
#include "regscale/synth.hpp"

namespace regscale {

// --- scenes on disk -------------------------------------------------------
// A scene directory holds scene.json, gt.dpg, relative.dpg (already depth) and
// mask.pgm.

std::string scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(std::string_view text);

void write_scene_dir(const std::filesystem::path& dir, const SceneSpec& spec, const Scene& scene);

struct LoadedScene {
  std::string id;
  Scene scene;
  std::optional<SceneSpec> spec;
};
LoadedScene load_scene_dir(const std::filesystem::path& dir);

// --- rescale --------------------------------------------------------------

struct RescaleOutcome {
  RescaleResult result;
  SparseSamples samples;
  std::optional<MetricReport> metrics;
};

// Loads the manifest's inputs, runs the pipeline and writes every requested output.
RescaleOutcome run_rescale(const RunManifest& manifest, std::ostream* warnings = nullptr);

// --- sample ---------------------------------------------------------------

struct SampleRequest {
  std::optional<std::size_t> n_samples;
  std::optional<std::size_t> beams;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
};
SparseSamples draw_samples(const DepthGrid& gt, const SampleRequest& request);

// --- bench ----------------------------------------------------------------

struct BenchOptions {
  std::filesystem::path scenes_dir;
  std::vector<Method> methods{Method::SLF, Method::SSF};
  std::vector<std::size_t> budgets{250, 500, 1000, 2000};
  std::vector<std::size_t> beams;  // extra beam-sampled runs, one per entry
  std::size_t seeds = 5;
  std::uint64_t seed_base = 0;
  std::optional<double> noise_sigma;  // unset: each scene's own noise_sigma
  PipelineConfig pipeline;            // method is overridden per run
  DepthRange eval_range = DepthRange::nyu();
  std::size_t threads = 1;
};

// Rows ordered by scene name, then sampling (budgets, then beams), seed, method.
std::vector<MetricRow> run_bench(const BenchOptions& options);

// Runs one scene against one set of samples for every listed method.
std::vector<MetricRow> bench_scene(const LoadedScene& scene, const SparseSamples& samples,
                                   std::string_view sampling_label, std::uint64_t seed,
                                   const BenchOptions& options);

}  // namespace regscale
