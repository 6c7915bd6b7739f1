#include <doctest.h>

#include <cmath>
#include <random>

#include "regscale/error.hpp"
#include "regscale/fitting.hpp"
#include "support/oracles.hpp"

using namespace regscale;

namespace {

PairedObservations make_obs(std::vector<double> z2, std::vector<double> z1, std::vector<double> x = {},
                            std::vector<double> y = {}) {
  PairedObservations obs;
  for (std::size_t i = 0; i < z1.size(); ++i) {
    obs.push(0, i, z1[i], z2[i], x.empty() ? 0.0 : x[i], y.empty() ? 0.0 : y[i]);
  }
  return obs;
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

PairedObservations random_obs(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PairedObservations obs;
  for (std::size_t i = 0; i < n; ++i) obs.push(0, i, 0.0, 3.0 * u(gen), u(gen), u(gen));
  return obs;
}

}  // namespace

TEST_CASE("pair_observations keeps samples on valid relative pixels") {
  DepthGrid rel = DepthGrid::from_values(2, 3, {1, 2, 3, 4, 5, 6});
  const SparseSamples s({{0, 0, 1.0}, {0, 1, 2.0}, {1, 2, 3.0}});
  PairedObservations obs = pair_observations(rel, s);
  CHECK(obs.size() == 3);
  CHECK(obs.z2 == std::vector<double>{1, 2, 6});
  CHECK(obs.x == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(obs.y == std::vector<double>{-1.0, -1.0, 1.0});

  rel.invalidate(1);
  CHECK(pair_observations(rel, s).size() == 2);

  std::vector<std::uint8_t> subset(6, 0);
  subset[5] = 1;
  obs = pair_observations(rel, s, std::span<const std::uint8_t>(subset));
  CHECK(obs.size() == 1);
  CHECK(obs.z1[0] == 3.0);

  const std::vector<std::size_t> picked{2, 0};
  obs = pair_observations(rel, s, std::span<const std::size_t>(picked));
  CHECK(obs.z1 == std::vector<double>{3.0, 1.0});
  CHECK(normalized_coordinate(0, 1) == 0.0);
}

TEST_CASE("affine fit") {
  FitParams p = fit_affine(make_obs({1, 2, 3}, {3, 5, 7}));
  CHECK(p.kind == FitKind::Affine);
  CHECK(p.alpha == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.support == 3);
  CHECK(std::isfinite(p.condition));

  p = fit_affine(make_obs({0.3, 1.7, -2.0, 5.5}, {0.3, 1.7, -2.0, 5.5}));
  CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  CHECK(code_of([] { fit_affine(make_obs({2, 2, 2}, {1, 2, 3})); }) == ErrorCode::DegenerateDesign);
  CHECK(code_of([] { fit_affine(make_obs({2}, {1})); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("planar fit") {
  const PairedObservations obs = make_obs({0, 0, 0, 1}, {3, 3, 3, 5}, {0, 1, 0, 1}, {0, 0, 1, 1});
  FitParams p = fit_planar(obs);
  CHECK(p.kind == FitKind::Planar);
  CHECK(p.alpha == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.beta == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(p.gamma == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(p.delta == doctest::Approx(3.0).epsilon(1e-12));

  const PairedObservations ident =
      make_obs({0.5, 2.0, -1.0, 3.0, 0.1}, {0.5, 2.0, -1.0, 3.0, 0.1}, {-1, 0, 1, 0.5, -0.2}, {0, -1, 1, 0.3, 0.9});
  p = fit_planar(ident);
  CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.beta) < 1e-12);
  CHECK(std::abs(p.gamma) < 1e-12);
  CHECK(std::abs(p.delta) < 1e-12);

  // z2 = x + y lies in the span of the coordinate columns.
  const std::vector<double> x{-1, 0, 1, 0.5, -0.5}, y{0, 1, -1, 0.25, 0.75};
  std::vector<double> z2(5);
  for (int i = 0; i < 5; ++i) z2[i] = x[i] + y[i];
  CHECK(code_of([&] { fit_planar(make_obs(z2, {1, 2, 3, 4, 5}, x, y)); }) == ErrorCode::DegenerateDesign);
  CHECK(code_of([] { fit_planar(make_obs({1, 2, 3}, {1, 2, 3}, {0, 1, 0}, {0, 0, 1})); }) ==
        ErrorCode::InsufficientSamples);
}

TEST_CASE("median-ratio fit") {
  CHECK(fit_median_ratio(make_obs({1, 2, 3}, {2, 4, 6})).alpha == 2.0);
  CHECK(fit_median_ratio(make_obs({1.5, 7.0}, {1.5, 7.0})).alpha == 1.0);
  CHECK(code_of([] { fit_median_ratio(make_obs({-1, 0, 1}, {1, 2, 3})); }) == ErrorCode::ZeroMedian);
  CHECK(code_of([] { fit_median_ratio(PairedObservations{}); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("apply_fit evaluates and clamps") {
  const DepthGrid rel = DepthGrid::from_values(2, 2, {3.0, -1.0, 0.0, 1.0});
  FitParams affine;
  affine.alpha = 2.0;
  affine.beta = 1.0;
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const DepthGrid out = apply_fit(rel, affine, all, DepthRange::nyu());
  CHECK(out.value(0) == 7.0);
  CHECK(out.value(1) == 0.001);  // -1 clamps to the floor

  FitParams planar;
  planar.kind = FitKind::Planar;
  planar.alpha = 2.0;
  planar.delta = 3.0;
  const std::vector<std::size_t> corner{3};  // x = 1, y = 1
  const DepthGrid p = apply_fit(rel, planar, corner, {0.001, 10.0});
  CHECK(p.value(3) == 5.0);
  CHECK(p.valid_count() == 1);

  FitParams ratio;
  ratio.kind = FitKind::MedianRatio;
  ratio.alpha = 4.0;
  CHECK(apply_fit(rel, ratio, all, {0.001, 10.0}).value(0) == 10.0);
}

TEST_CASE("residuals are orthogonal to the design columns") {
  std::mt19937_64 gen(101);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    PairedObservations obs = random_obs(gen, 6 + gen() % 40);
    for (std::size_t i = 0; i < obs.size(); ++i) obs.z1[i] = 4.0 + 1.5 * obs.z2[i] + noise(gen);
    double z1_norm = 0;
    for (double v : obs.z1) z1_norm += v * v;
    z1_norm = std::sqrt(z1_norm);

    const FitParams a = fit_affine(obs);
    const FitParams p = fit_planar(obs);
    double ga[2] = {0, 0}, gp[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double ra = predict(a, obs.z2[i], obs.x[i], obs.y[i]) - obs.z1[i];
      const double rp = predict(p, obs.z2[i], obs.x[i], obs.y[i]) - obs.z1[i];
      ga[0] += obs.z2[i] * ra;
      ga[1] += ra;
      gp[0] += obs.z2[i] * rp;
      gp[1] += obs.x[i] * rp;
      gp[2] += obs.y[i] * rp;
      gp[3] += rp;
    }
    for (double g : ga) CHECK(std::abs(g) < 1e-8 * z1_norm);
    for (double g : gp) CHECK(std::abs(g) < 1e-8 * z1_norm);
  }
}

TEST_CASE("noiseless data is interpolated exactly") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    PairedObservations obs = random_obs(gen, 4 + gen() % 60);
    const double alpha = u(gen), beta = u(gen), gamma = u(gen), delta = u(gen);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      obs.z1[i] = alpha * obs.z2[i] + beta * obs.x[i] + gamma * obs.y[i] + delta;
    }
    const FitParams p = fit_planar(obs);
    if (p.condition >= 1e6) continue;
    auto rel_err = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
    CHECK(rel_err(p.alpha, alpha) < 1e-9);
    CHECK(rel_err(p.beta, beta) < 1e-9);
    CHECK(rel_err(p.gamma, gamma) < 1e-9);
    CHECK(rel_err(p.delta, delta) < 1e-9);

    for (std::size_t i = 0; i < obs.size(); ++i) obs.z1[i] = alpha * obs.z2[i] + delta;
    const FitParams a = fit_affine(obs);
    CHECK(rel_err(a.alpha, alpha) < 1e-9);
    CHECK(rel_err(a.beta, delta) < 1e-9);
  }
}

TEST_CASE("closed form agrees with the brute-force search oracle") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  int checked = 0;
  while (checked < 60) {
    const std::size_t k = checked % 2 == 0 ? 2 : 4;
    PairedObservations obs = random_obs(gen, k + gen() % (7 - k));
    for (std::size_t i = 0; i < obs.size(); ++i) obs.z1[i] = u(gen);
    if (oracle::normalized_gram_determinant(obs, k) < 1e-2) continue;
    const auto ref = oracle::brute_force_fit(obs, k);
    REQUIRE(ref.converged);
    const FitParams p = k == 2 ? fit_affine(obs) : fit_planar(obs);
    if (k == 2) {
      CHECK(std::abs(p.alpha - ref.params[0]) < 1e-4);
      CHECK(std::abs(p.beta - ref.params[1]) < 1e-4);
    } else {
      CHECK(std::abs(p.alpha - ref.params[0]) < 1e-4);
      CHECK(std::abs(p.beta - ref.params[1]) < 1e-4);
      CHECK(std::abs(p.gamma - ref.params[2]) < 1e-4);
      CHECK(std::abs(p.delta - ref.params[3]) < 1e-4);
    }
    ++checked;
  }
}

TEST_CASE("scaling metric depths scales every parameter") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.5, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    PairedObservations obs = random_obs(gen, 5 + gen() % 20);
    for (double& v : obs.z1) v = u(gen);
    const FitParams a = fit_affine(obs);
    const FitParams p = fit_planar(obs);
    for (double c : {0.25, 2.0, 8.0}) {  // powers of two: exact
      PairedObservations scaled = obs;
      for (double& v : scaled.z1) v *= c;
      const FitParams as = fit_affine(scaled);
      const FitParams ps = fit_planar(scaled);
      CHECK(as.alpha == c * a.alpha);
      CHECK(as.beta == c * a.beta);
      CHECK(ps.alpha == c * p.alpha);
      CHECK(ps.beta == c * p.beta);
      CHECK(ps.gamma == c * p.gamma);
      CHECK(ps.delta == c * p.delta);
    }
    PairedObservations scaled = obs;
    for (double& v : scaled.z1) v *= 3.7;
    const FitParams ps = fit_planar(scaled);
    CHECK(ps.alpha == doctest::Approx(3.7 * p.alpha).epsilon(1e-12).scale(1.0));
    CHECK(ps.delta == doctest::Approx(3.7 * p.delta).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("planar fit with pinned slopes reproduces the affine fit") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.5, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    PairedObservations obs = random_obs(gen, 2 + gen() % 20);
    for (double& v : obs.z1) v = u(gen);
    const FitParams a = fit_affine(obs);
    const FitParams p = fit_planar(obs, {kDefaultConditionMax, true});
    CHECK(p.beta == 0.0);
    CHECK(p.gamma == 0.0);
    CHECK(p.alpha == doctest::Approx(a.alpha).epsilon(1e-10).scale(1.0));
    CHECK(p.delta == doctest::Approx(a.beta).epsilon(1e-10).scale(1.0));
  }
}
