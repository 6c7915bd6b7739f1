#include "regscale/regions.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "regscale/error.hpp"

namespace regscale {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

struct Offset {
  int dr;
  int dc;
};

constexpr Offset kFour[] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
constexpr Offset kEight[] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

std::span<const Offset> offsets(Connectivity c) {
  if (c == Connectivity::Eight) return kEight;
  return kFour;
}

}  // namespace

bool RegionGraph::adjacent(std::size_t a, std::size_t b) const {
  const auto& n = neighbors_[a];
  return std::binary_search(n.begin(), n.end(), b);
}

std::size_t RegionGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : neighbors_) twice += n.size();
  return twice / 2;
}

RegionGraph build_region_graph(const LabelGrid& mask, const SparseSamples& samples,
                               const RegionOptions& options) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  samples.check_bounds(h, w);

  RegionGraph graph;
  graph.height_ = h;
  graph.width_ = w;
  graph.pixel_region_.assign(h * w, kUnassigned);
  const auto steps = offsets(options.connectivity);

  if (options.merge_same_label) {
    std::unordered_map<std::uint32_t, std::size_t> label_region;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const std::uint32_t label = mask.label(i);
      auto [it, inserted] = label_region.try_emplace(label, graph.regions_.size());
      if (inserted) graph.regions_.push_back({it->second, label, {}, {}});
      graph.pixel_region_[i] = it->second;
      graph.regions_[it->second].pixels.push_back(i);
    }
  } else {
    std::deque<std::size_t> queue;
    for (std::size_t seed = 0; seed < mask.size(); ++seed) {
      if (graph.pixel_region_[seed] != kUnassigned) continue;
      const std::size_t id = graph.regions_.size();
      const std::uint32_t label = mask.label(seed);
      Region region{id, label, {}, {}};
      graph.pixel_region_[seed] = id;
      queue.push_back(seed);
      while (!queue.empty()) {
        const std::size_t p = queue.front();
        queue.pop_front();
        region.pixels.push_back(p);
        const auto r = static_cast<long>(p / w);
        const auto c = static_cast<long>(p % w);
        for (const Offset& o : steps) {
          const long nr = r + o.dr;
          const long nc = c + o.dc;
          if (nr < 0 || nc < 0 || nr >= static_cast<long>(h) || nc >= static_cast<long>(w)) continue;
          const std::size_t q = static_cast<std::size_t>(nr) * w + static_cast<std::size_t>(nc);
          if (graph.pixel_region_[q] != kUnassigned || mask.label(q) != label) continue;
          graph.pixel_region_[q] = id;
          queue.push_back(q);
        }
      }
      std::sort(region.pixels.begin(), region.pixels.end());
      graph.regions_.push_back(std::move(region));
    }
  }

  const std::size_t n = graph.regions_.size();
  std::unordered_set<std::uint64_t> edges;
  graph.neighbors_.assign(n, {});
  for (std::size_t p = 0; p < h * w; ++p) {
    const std::size_t a = graph.pixel_region_[p];
    const auto r = static_cast<long>(p / w);
    const auto c = static_cast<long>(p % w);
    for (const Offset& o : steps) {
      const long nr = r + o.dr;
      const long nc = c + o.dc;
      if (nr < 0 || nc < 0 || nr >= static_cast<long>(h) || nc >= static_cast<long>(w)) continue;
      const std::size_t b =
          graph.pixel_region_[static_cast<std::size_t>(nr) * w + static_cast<std::size_t>(nc)];
      if (a >= b) continue;
      if (edges.insert(static_cast<std::uint64_t>(a) * n + b).second) {
        graph.neighbors_[a].push_back(b);
        graph.neighbors_[b].push_back(a);
      }
    }
  }
  for (auto& list : graph.neighbors_) std::sort(list.begin(), list.end());

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    graph.regions_[graph.pixel_region_[s.row * w + s.col]].sample_indices.push_back(i);
  }
  return graph;
}

Expansion expand_until(const RegionGraph& graph, std::size_t origin, const SampleNeed& need,
                       std::optional<std::size_t> max_hops) {
  if (origin >= graph.region_count()) {
    throw Error(ErrorCode::OutOfBounds, "region " + std::to_string(origin) + " does not exist");
  }
  Expansion result;
  result.origin = origin;
  result.included.push_back(origin);
  const auto& own = graph.region(origin).sample_indices;
  result.sample_indices.assign(own.begin(), own.end());

  std::vector<std::uint8_t> visited(graph.region_count(), 0);
  visited[origin] = 1;
  std::vector<std::size_t> ring{origin};

  result.satisfied = need(result.sample_indices);
  while (!result.satisfied) {
    if (max_hops && result.hop >= *max_hops) break;
    std::vector<std::size_t> next;
    for (std::size_t id : ring) {
      for (std::size_t nb : graph.neighbors(id)) {
        if (!visited[nb]) {
          visited[nb] = 1;
          next.push_back(nb);
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    for (std::size_t id : next) {
      result.included.push_back(id);
      const auto& s = graph.region(id).sample_indices;
      result.sample_indices.insert(result.sample_indices.end(), s.begin(), s.end());
    }
    std::sort(result.sample_indices.begin(), result.sample_indices.end());
    ++result.hop;
    ring = std::move(next);
    result.satisfied = need(result.sample_indices);
  }
  return result;
}

}  // namespace regscale
