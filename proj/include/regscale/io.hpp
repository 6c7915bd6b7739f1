#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "regscale/grids.hpp"
#include "regscale/pipeline.hpp"

namespace regscale {

enum class DepthFormat {
  Pfm,    // single-channel Portable Float Map, float32
  Pgm16,  // 16-bit binary PGM holding depth * scale (default millimeters)
  Dpg1,   // "DPG1", u32 height, u32 width (little-endian), then float64 values
};

inline constexpr double kDefaultPgmScale = 1000.0;  // PGM units per meter

// .pfm, .pgm and .dpg; nullopt otherwise.
std::optional<DepthFormat> format_from_extension(const std::filesystem::path& path);

struct DepthLoadOptions {
  // PGM units per meter. Unset: read "<file>.scale" if present, else 1000.
  std::optional<double> pgm_scale;
};

// Format is detected from the file's magic bytes. PFM and PGM zeros (and any
// non-finite PFM value) load as invalid; DPG1 stores invalid pixels as NaN so
// valid zeros survive.
DepthGrid load_depth(const std::filesystem::path& path, const DepthLoadOptions& options = {});
void save_depth(const std::filesystem::path& path, const DepthGrid& grid,
                std::optional<DepthFormat> format = std::nullopt,
                double pgm_scale = kDefaultPgmScale);

DepthGrid read_pfm(std::istream& in);
void write_pfm(std::ostream& out, const DepthGrid& grid);
DepthGrid read_dpg1(std::istream& in);
void write_dpg1(std::ostream& out, const DepthGrid& grid);
DepthGrid read_pgm_depth(std::istream& in, double scale);
void write_pgm_depth(std::ostream& out, const DepthGrid& grid, double scale);

// 8- or 16-bit binary PGM; label = pixel value.
LabelGrid load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const LabelGrid& mask);
LabelGrid read_pgm_labels(std::istream& in);
void write_pgm_labels(std::ostream& out, const LabelGrid& mask);

// CSV "row,col,depth_m" with an optional header line. Rows whose depth is not
// positive and finite are skipped with a message on `warnings`.
SparseSamples parse_samples(std::istream& in, const std::string& source, std::ostream* warnings);
SparseSamples load_samples(const std::filesystem::path& path, std::ostream* warnings = nullptr);
void write_samples(std::ostream& out, const SparseSamples& samples);
void save_samples(const std::filesystem::path& path, const SparseSamples& samples);

inline constexpr const char* kRegionReportHeader =
    "region,label,pixels,own_samples,method,kind,provenance,hop,support,alpha,beta,gamma,delta,"
    "condition,residual_rmse";
void write_region_report(std::ostream& out, const std::vector<RegionReport>& reports);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace regscale
