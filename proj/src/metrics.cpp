#include "regscale/metrics.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "regscale/error.hpp"
#include "regscale/numeric.hpp"

namespace regscale {

MetricReport evaluate(const DepthGrid& pred, const DepthGrid& gt, DepthRange range) {
  if (!pred.same_shape(gt)) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and ground truth differ in size");
  }
  NeumaierSum abs_rel, sq, sq_log, abs_log10;
  std::array<std::size_t, 3> within{0, 0, 0};
  const std::array<double, 3> thresholds{1.25, 1.25 * 1.25, 1.25 * 1.25 * 1.25};
  std::size_t n = 0;

  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.valid(i) || !pred.valid(i)) continue;
    const double g = gt.value(i);
    if (!range.contains(g)) continue;
    const double p = pred.value(i);
    const double pc = std::max(p, range.min);
    ++n;
    abs_rel.add(std::abs(p - g) / g);
    sq.add((p - g) * (p - g));
    const double dl = std::log(pc) - std::log(g);
    sq_log.add(dl * dl);
    abs_log10.add(std::abs(std::log10(pc) - std::log10(g)));
    const double ratio = std::max(pc / g, g / pc);
    for (std::size_t k = 0; k < 3; ++k) {
      if (ratio < thresholds[k]) ++within[k];
    }
  }
  if (n == 0) throw Error(ErrorCode::NoOverlap, "no pixel is valid in both grids and within range");

  const double count = static_cast<double>(n);
  MetricReport r;
  r.abs_rel = abs_rel.value() / count;
  r.rmse = std::sqrt(sq.value() / count);
  r.rmse_log = std::sqrt(sq_log.value() / count);
  r.log10 = abs_log10.value() / count;
  r.delta1 = static_cast<double>(within[0]) / count;
  r.delta2 = static_cast<double>(within[1]) / count;
  r.delta3 = static_cast<double>(within[2]) / count;
  r.valid_pixel_count = n;
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_metric_csv(std::ostream& out, const std::vector<MetricRow>& rows, bool header) {
  if (header) out << kMetricCsvHeader << '\n';
  for (const MetricRow& row : rows) {
    const MetricReport& m = row.report;
    out << row.image_id << ',' << row.method << ',' << (row.region_aware ? 1 : 0) << ','
        << row.n_samples << ',' << row.seed << ',' << format_double(m.abs_rel) << ','
        << format_double(m.rmse) << ',' << format_double(m.rmse_log) << ','
        << format_double(m.log10) << ',' << format_double(m.delta1) << ','
        << format_double(m.delta2) << ',' << format_double(m.delta3) << ','
        << m.valid_pixel_count << '\n';
  }
}

}  // namespace regscale
