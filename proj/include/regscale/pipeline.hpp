#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "regscale/fitting.hpp"
#include "regscale/grids.hpp"
#include "regscale/normalize.hpp"
#include "regscale/regions.hpp"

namespace regscale {

enum class Method {
  SLF,           // per-region scale and shift
  SSF,           // per-region surface fit
  RegionMedian,  // per-region median ratio
  GlobalLinear,  // one scale and shift for the whole image
  GlobalMedian,  // one median ratio for the whole image
};

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);
bool is_region_aware(Method method);

struct PipelineConfig {
  Method method = Method::SLF;
  std::size_t min_samples_linear = 2;
  std::size_t min_samples_planar = 4;
  std::size_t min_samples_median = 1;
  std::optional<std::size_t> max_hops;  // unset: expand until exhaustion
  DepthRange clamp = DepthRange::nyu();
  RegionOptions regions;
  Normalization normalization = Normalization::MedianMad;
  // Methods tried after `method` when it cannot produce a fit for a region.
  // Unset: default_fallback_chain(method).
  std::optional<std::vector<Method>> fallback_chain;
  double condition_max = kDefaultConditionMax;
};

// SSF -> SLF -> RegionMedian -> GlobalLinear, truncated to what follows `method`.
std::vector<Method> default_fallback_chain(Method method);

// `method` followed by its fallbacks. Throws InvalidSpec if the chain does not end
// in GlobalLinear or a method that needs at most one sample.
std::vector<Method> effective_chain(const PipelineConfig& cfg);

struct RegionReport {
  std::size_t region = 0;
  std::uint32_t label = 0;
  std::size_t pixel_count = 0;
  std::size_t own_samples = 0;
  Method method = Method::SLF;  // chain entry that produced the parameters
  FitParams params;
  // Over the region's own samples, after clamping; unset without own samples.
  std::optional<double> residual_rmse;

  friend bool operator==(const RegionReport&, const RegionReport&) = default;
};

struct RescaleResult {
  DepthGrid depth;
  std::vector<RegionReport> reports;  // one per region, ordered by region id
  NormalizationStats normalization;
  std::vector<std::uint8_t> write_counts;  // per pixel; 1 everywhere on success
};

// Region-aware conversion of a relative depth map (already depth-like, not
// inverse depth) into metric depth using sparse measurements.
RescaleResult rescale(const DepthGrid& relative, const LabelGrid& mask, const SparseSamples& samples,
                      const PipelineConfig& cfg);

enum class GlobalMethod { Linear, Median };

// One fit over all samples applied to every pixel. Bit-identical to rescale()
// with a single-region mask and SLF / RegionMedian respectively.
DepthGrid rescale_global(const DepthGrid& relative, const SparseSamples& samples, GlobalMethod method,
                         const PipelineConfig& cfg);

}  // namespace regscale
