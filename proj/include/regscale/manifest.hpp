#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "regscale/fitting.hpp"
#include "regscale/pipeline.hpp"

namespace regscale {

// Everything needed to replay one rescale run bit-exactly.
struct RunManifest {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::string image_id = "image";

  std::filesystem::path relative;  // model output; inverse depth unless already_depth
  std::filesystem::path mask;
  std::optional<std::filesystem::path> samples;  // CSV; otherwise drawn from gt
  std::optional<std::filesystem::path> gt;       // sampling source and/or evaluation target
  bool already_depth = false;
  double inverse_epsilon = 1e-6;
  std::optional<double> pgm_scale;

  std::optional<std::size_t> n_samples;
  std::optional<std::size_t> beams;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;

  PipelineConfig pipeline;
  DepthRange eval_range = DepthRange::nyu();

  std::filesystem::path output_depth;
  std::optional<std::filesystem::path> output_report;
  std::optional<std::filesystem::path> output_metrics;
  std::optional<std::filesystem::path> output_samples;
};

// Throws InvalidSpec when the manifest cannot describe a run.
void validate(const RunManifest& manifest);

std::string manifest_to_json(const RunManifest& manifest);
// Relative paths inside the document resolve against base_dir.
RunManifest manifest_from_json(std::string_view text, const std::filesystem::path& base_dir);

RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace regscale
