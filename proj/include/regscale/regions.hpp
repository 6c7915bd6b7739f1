#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "regscale/grids.hpp"

namespace regscale {

enum class Connectivity { Four = 4, Eight = 8 };

struct RegionOptions {
  Connectivity connectivity = Connectivity::Four;
  // When false every spatially connected component of a label is its own region.
  bool merge_same_label = false;
};

struct Region {
  std::size_t id = 0;
  std::uint32_t label = 0;                  // mask label the region came from
  std::vector<std::size_t> pixels;          // row-major flat indices, ascending
  std::vector<std::size_t> sample_indices;  // indices into SparseSamples, ascending
};

// Regions of a mask plus their adjacency. Region ids follow the order in which a
// row-major scan first meets each region.
class RegionGraph {
 public:
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t region_count() const { return regions_.size(); }

  const Region& region(std::size_t id) const { return regions_[id]; }
  std::span<const Region> regions() const { return regions_; }
  // Sorted ascending, never contains id itself.
  std::span<const std::size_t> neighbors(std::size_t id) const { return neighbors_[id]; }
  bool adjacent(std::size_t a, std::size_t b) const;
  std::size_t edge_count() const;

  std::size_t region_of_pixel(std::size_t flat_index) const { return pixel_region_[flat_index]; }

 private:
  friend RegionGraph build_region_graph(const LabelGrid&, const SparseSamples&, const RegionOptions&);

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<Region> regions_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::size_t> pixel_region_;
};

RegionGraph build_region_graph(const LabelGrid& mask, const SparseSamples& samples,
                               const RegionOptions& options = {});

struct Expansion {
  std::size_t origin = 0;
  std::vector<std::size_t> included;        // origin first, then ring by ring
  std::size_t hop = 0;                      // rings absorbed beyond the origin
  std::vector<std::size_t> sample_indices;  // accumulated samples, ascending
  bool satisfied = false;
};

// Receives the accumulated sample indices (ascending).
using SampleNeed = std::function<bool(std::span<const std::size_t>)>;

// Breadth-first growth from origin, one whole ring at a time with each ring
// absorbed in ascending id order, until `need` holds, the reachable regions are
// exhausted, or max_hops rings have been added.
Expansion expand_until(const RegionGraph& graph, std::size_t origin, const SampleNeed& need,
                       std::optional<std::size_t> max_hops = std::nullopt);

}  // namespace regscale
