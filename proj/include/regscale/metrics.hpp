#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "regscale/fitting.hpp"
#include "regscale/grids.hpp"

namespace regscale {

struct MetricReport {
  double abs_rel = 0.0;
  double rmse = 0.0;      // meters
  double rmse_log = 0.0;  // natural log
  double log10 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  std::size_t valid_pixel_count = 0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Evaluated where both grids are valid and the ground truth lies in `range`.
// Predictions below range.min are raised to range.min for the log terms and the
// threshold ratios. Throws NoOverlap when no pixel qualifies.
MetricReport evaluate(const DepthGrid& pred, const DepthGrid& gt, DepthRange range);

// One row of a benchmark / evaluation CSV.
struct MetricRow {
  std::string image_id;
  std::string method;
  bool region_aware = false;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  MetricReport report;
};

inline constexpr const char* kMetricCsvHeader =
    "image_id,method,region_aware,n_samples,seed,abs_rel,rmse,rmse_log,log10,d1,d2,d3,n_valid";

void write_metric_csv(std::ostream& out, const std::vector<MetricRow>& rows, bool header = true);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

}  // namespace regscale
