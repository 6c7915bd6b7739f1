#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "regscale/error.hpp"
#include "regscale/metrics.hpp"
#include "support/oracles.hpp"

using namespace regscale;

TEST_CASE("perfect prediction") {
  const DepthGrid g = DepthGrid::from_values(2, 2, {1.0, 2.0, 3.0, 4.0});
  const MetricReport m = evaluate(g, g, DepthRange::nyu());
  CHECK(m.abs_rel == 0.0);
  CHECK(m.rmse == 0.0);
  CHECK(m.rmse_log == 0.0);
  CHECK(m.log10 == 0.0);
  CHECK(m.delta1 == 1.0);
  CHECK(m.delta2 == 1.0);
  CHECK(m.delta3 == 1.0);
  CHECK(m.valid_pixel_count == 4);
}

TEST_CASE("two-pixel hand computation") {
  const MetricReport m =
      evaluate(DepthGrid::from_values(1, 2, {2.0, 4.0}), DepthGrid::from_values(1, 2, {1.0, 4.0}), DepthRange::nyu());
  CHECK(m.abs_rel == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.rmse == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(m.delta1 == 0.5);
  CHECK(m.delta2 == 0.5);
  CHECK(m.delta3 == 0.5);  // 2 > 1.25^3
  CHECK(m.rmse_log == doctest::Approx(std::log(2.0) / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("invalid and out-of-range ground truth is excluded") {
  const DepthGrid gt = DepthGrid::from_values_zero_invalid(1, 4, {0.0, 2.0, 20.0, 4.0});
  const DepthGrid pred = DepthGrid::from_values(1, 4, {9.0, 2.0, 1.0, 4.0});
  const MetricReport m = evaluate(pred, gt, DepthRange::nyu());
  CHECK(m.valid_pixel_count == 2);
  CHECK(m.abs_rel == 0.0);

  DepthGrid none(1, 4);
  try {
    evaluate(pred, none, DepthRange::nyu());
    FAIL("expected NoOverlap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoOverlap);
  }
}

TEST_CASE("non-positive predictions are clamped before logarithms") {
  const MetricReport m =
      evaluate(DepthGrid::from_values(1, 2, {-1.0, 0.0}), DepthGrid::from_values(1, 2, {1.0, 1.0}), {0.5, 5.0});
  CHECK(std::isfinite(m.rmse_log));
  CHECK(m.rmse_log == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(m.abs_rel == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("agrees with a naive loop and orders the thresholds") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = 1 + gen() % 64, w = 1 + gen() % 64;
    std::uniform_real_distribution<double> u(-0.5, 12.0);
    std::vector<double> pv(h * w), gv(h * w);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      gv[i] = gen() % 10 == 0 ? 0.0 : u(gen);
      pv[i] = gv[i] * std::exp(0.4 * (u(gen) / 12.0 - 0.5)) + 0.1 * u(gen);
    }
    gv[0] = 3.0;
    const DepthGrid gt = DepthGrid::from_values_zero_invalid(h, w, gv);
    const DepthGrid pred = DepthGrid::from_values(h, w, pv);
    const MetricReport m = evaluate(pred, gt, DepthRange::nyu());
    const MetricReport o = oracle::naive_metrics(pred, gt, DepthRange::nyu());
    CHECK(m.valid_pixel_count == o.valid_pixel_count);
    CHECK(std::abs(m.abs_rel - o.abs_rel) <= 1e-12);
    CHECK(std::abs(m.rmse - o.rmse) <= 1e-12);
    CHECK(std::abs(m.rmse_log - o.rmse_log) <= 1e-12);
    CHECK(std::abs(m.log10 - o.log10) <= 1e-12);
    CHECK(m.delta1 == o.delta1);
    CHECK(m.delta2 == o.delta2);
    CHECK(m.delta3 == o.delta3);
    CHECK(m.delta1 <= m.delta2);
    CHECK(m.delta2 <= m.delta3);
  }
}

TEST_CASE("uniform scaling inside the first threshold keeps delta1 at 1") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.01, 9.0);
  std::vector<double> gv(300);
  for (double& v : gv) v = u(gen);
  const DepthGrid gt = DepthGrid::from_values(15, 20, gv);
  for (double c : {0.81, 0.9, 1.0, 1.1, 1.249}) {
    std::vector<double> pv(gv);
    for (double& v : pv) v *= c;
    CHECK(evaluate(DepthGrid::from_values(15, 20, pv), gt, {0.001, 10.0}).delta1 == 1.0);
  }
}

TEST_CASE("metric CSV") {
  MetricRow row;
  row.image_id = "scene_000";
  row.method = "slf";
  row.region_aware = true;
  row.n_samples = 250;
  row.seed = 7;
  row.report = {0.5, 0.25, 0.1, 0.05, 0.9, 0.95, 1.0, 42};
  std::ostringstream out;
  write_metric_csv(out, {row});
  CHECK(out.str() == std::string(kMetricCsvHeader) + "\nscene_000,slf,1,250,7,0.5,0.25,0.1,0.05,0.9,0.95,1,42\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
