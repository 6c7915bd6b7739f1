#include "regscale/pipeline.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "regscale/error.hpp"
#include "regscale/numeric.hpp"

namespace regscale {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::SLF: return "slf";
    case Method::SSF: return "ssf";
    case Method::RegionMedian: return "median";
    case Method::GlobalLinear: return "global-linear";
    case Method::GlobalMedian: return "global-median";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::SLF, Method::SSF, Method::RegionMedian, Method::GlobalLinear,
                   Method::GlobalMedian}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool is_region_aware(Method method) {
  return method == Method::SLF || method == Method::SSF || method == Method::RegionMedian;
}

std::vector<Method> default_fallback_chain(Method method) {
  switch (method) {
    case Method::SSF: return {Method::SLF, Method::RegionMedian, Method::GlobalLinear};
    case Method::SLF: return {Method::RegionMedian, Method::GlobalLinear};
    case Method::RegionMedian: return {Method::GlobalLinear};
    case Method::GlobalLinear:
    case Method::GlobalMedian: return {};
  }
  return {};
}

std::vector<Method> effective_chain(const PipelineConfig& cfg) {
  std::vector<Method> chain{cfg.method};
  const auto tail = cfg.fallback_chain.value_or(default_fallback_chain(cfg.method));
  chain.insert(chain.end(), tail.begin(), tail.end());
  const Method last = chain.back();
  const bool terminal = last == Method::GlobalLinear || last == Method::GlobalMedian ||
                        (last == Method::RegionMedian && cfg.min_samples_median <= 1);
  if (!terminal) {
    throw Error(ErrorCode::InvalidSpec,
                "fallback chain must end in global-linear or a single-sample method");
  }
  return chain;
}

namespace {

// Relative grids seen by the fits: scale-and-shift style fits work on the
// normalized map, ratio fits on the un-normalized (positive) one.
struct FitInputs {
  const DepthGrid& relative;
  const DepthGrid& normalized;
  const SparseSamples& samples;
  const PipelineConfig& cfg;

  const DepthGrid& grid_for(FitKind kind) const {
    return kind == FitKind::MedianRatio ? relative : normalized;
  }
};

FitKind kind_of(Method method) {
  switch (method) {
    case Method::SLF:
    case Method::GlobalLinear: return FitKind::Affine;
    case Method::SSF: return FitKind::Planar;
    case Method::RegionMedian:
    case Method::GlobalMedian: return FitKind::MedianRatio;
  }
  return FitKind::Affine;
}

std::size_t min_samples(Method method, const PipelineConfig& cfg) {
  switch (kind_of(method)) {
    case FitKind::Affine: return std::max<std::size_t>(cfg.min_samples_linear, 2);
    case FitKind::Planar: return std::max<std::size_t>(cfg.min_samples_planar, 4);
    case FitKind::MedianRatio: return std::max<std::size_t>(cfg.min_samples_median, 1);
  }
  return 1;
}

// Throws on degeneracy; the caller decides whether that is fatal.
FitParams fit_on(const FitInputs& in, Method method, std::span<const std::size_t> sample_indices) {
  const FitKind kind = kind_of(method);
  const PairedObservations obs = pair_observations(in.grid_for(kind), in.samples, sample_indices);
  const std::size_t needed = min_samples(method, in.cfg);
  if (obs.size() < needed) {
    throw Error(ErrorCode::InsufficientSamples,
                "need " + std::to_string(needed) + " samples, have " + std::to_string(obs.size()));
  }
  switch (kind) {
    case FitKind::Affine: return fit_affine(obs);
    case FitKind::Planar: return fit_planar(obs, {in.cfg.condition_max, false});
    case FitKind::MedianRatio: return fit_median_ratio(obs);
  }
  return {};
}

std::optional<FitParams> try_fit(const FitInputs& in, Method method,
                                 std::span<const std::size_t> sample_indices) {
  try {
    return fit_on(in, method, sample_indices);
  } catch (const Error& e) {
    if (!is_numerical(e.code())) throw;
    return std::nullopt;
  }
}

std::optional<double> residual_rmse(const FitInputs& in, const FitParams& params,
                                    std::span<const std::size_t> own_samples) {
  const PairedObservations obs =
      pair_observations(in.grid_for(params.kind), in.samples, own_samples);
  if (obs.size() == 0) return std::nullopt;
  NeumaierSum sq;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double r = in.cfg.clamp.clamp(predict(params, obs.z2[i], obs.x[i], obs.y[i])) - obs.z1[i];
    sq.add(r * r);
  }
  return std::sqrt(sq.value() / static_cast<double>(obs.size()));
}

void check_inputs(const DepthGrid& relative, const LabelGrid& mask, const SparseSamples& samples) {
  if (relative.height() != mask.height() || relative.width() != mask.width()) {
    throw Error(ErrorCode::DimensionMismatch,
                "relative depth is " + std::to_string(relative.height()) + "x" +
                    std::to_string(relative.width()) + " but mask is " +
                    std::to_string(mask.height()) + "x" + std::to_string(mask.width()));
  }
  if (samples.empty()) throw Error(ErrorCode::NoSamples, "no sparse depth samples");
  samples.check_bounds(relative.height(), relative.width());
}

}  // namespace

RescaleResult rescale(const DepthGrid& relative, const LabelGrid& mask, const SparseSamples& samples,
                      const PipelineConfig& cfg) {
  check_inputs(relative, mask, samples);
  const std::vector<Method> chain = effective_chain(cfg);

  NormalizedDepth normalized = affine_invariant_normalize(relative, cfg.normalization);
  const RegionGraph graph = build_region_graph(mask, samples, cfg.regions);
  const FitInputs in{relative, normalized.grid, samples, cfg};

  std::vector<std::size_t> all_samples(samples.size());
  std::iota(all_samples.begin(), all_samples.end(), std::size_t{0});

  // Whole-image fits are shared by every region that needs one.
  std::optional<FitParams> global_linear;
  std::optional<FitParams> global_median;
  auto global_fit = [&](Method method) -> FitParams {
    auto& slot = method == Method::GlobalLinear ? global_linear : global_median;
    if (!slot) slot = fit_on(in, method, all_samples);
    return *slot;
  };

  RescaleResult result;
  result.depth = DepthGrid(relative.height(), relative.width());
  result.normalization = normalized.stats;
  result.write_counts.assign(relative.size(), 0);
  result.reports.reserve(graph.region_count());

  for (const Region& region : graph.regions()) {
    RegionReport report;
    report.region = region.id;
    report.label = region.label;
    report.pixel_count = region.pixels.size();
    report.own_samples = region.sample_indices.size();

    std::optional<FitParams> chosen;
    std::optional<Error> last_error;
    for (Method method : chain) {
      if (method == Method::GlobalLinear || method == Method::GlobalMedian) {
        try {
          chosen = global_fit(method);
        } catch (const Error& e) {
          if (!is_numerical(e.code())) throw;
          last_error = e;
          continue;
        }
        chosen->provenance =
            method == cfg.method ? Provenance::Global : Provenance::GlobalFallback;
        report.method = method;
        break;
      }
      std::optional<FitParams> fitted;
      const Expansion expansion = expand_until(
          graph, region.id,
          [&](std::span<const std::size_t> indices) {
            fitted = try_fit(in, method, indices);
            return fitted.has_value();
          },
          cfg.max_hops);
      if (expansion.satisfied) {
        chosen = fitted;
        chosen->provenance = expansion.hop == 0 ? Provenance::OwnRegion : Provenance::Expanded;
        chosen->hop = expansion.hop;
        report.method = method;
        break;
      }
    }
    if (!chosen) {
      const std::string reason = last_error ? std::string(last_error->what()) : "no fit succeeded";
      throw Error(last_error ? last_error->code() : ErrorCode::FallbackExhausted,
                  "region " + std::to_string(region.id) + ": fallback chain exhausted (" + reason +
                      ")");
    }

    report.params = *chosen;
    report.residual_rmse = residual_rmse(in, report.params, region.sample_indices);
    apply_fit_into(in.grid_for(report.params.kind), report.params, region.pixels, cfg.clamp,
                   result.depth);
    for (std::size_t p : region.pixels) ++result.write_counts[p];
    result.reports.push_back(report);
  }

  for (std::uint8_t count : result.write_counts) {
    if (count != 1) throw std::logic_error("region merge left a pixel unwritten or overwritten");
  }
  return result;
}

DepthGrid rescale_global(const DepthGrid& relative, const SparseSamples& samples, GlobalMethod method,
                         const PipelineConfig& cfg) {
  if (samples.empty()) throw Error(ErrorCode::NoSamples, "no sparse depth samples");
  samples.check_bounds(relative.height(), relative.width());
  const NormalizedDepth normalized = affine_invariant_normalize(relative, cfg.normalization);
  const FitInputs in{relative, normalized.grid, samples, cfg};

  std::vector<std::size_t> all_samples(samples.size());
  std::iota(all_samples.begin(), all_samples.end(), std::size_t{0});
  const Method as_method = method == GlobalMethod::Linear ? Method::GlobalLinear : Method::GlobalMedian;
  const FitParams params = fit_on(in, as_method, all_samples);

  std::vector<std::size_t> pixels(relative.size());
  std::iota(pixels.begin(), pixels.end(), std::size_t{0});
  return apply_fit(in.grid_for(params.kind), params, pixels, cfg.clamp);
}

}  // namespace regscale
