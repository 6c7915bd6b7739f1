#include "regscale/commands.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "regscale/error.hpp"
#include "regscale/io.hpp"
#include "regscale/normalize.hpp"

namespace regscale {

using nlohmann::json;

namespace {

json distortion_to_json(const Distortion& d) {
  if (const auto* a = std::get_if<AffineDistortion>(&d)) {
    return {{"type", "affine"}, {"scale", a->scale}, {"shift", a->shift}};
  }
  if (const auto* p = std::get_if<PlanarDistortion>(&d)) {
    return {{"type", "planar"},
            {"scale", p->scale},
            {"slope_x", p->slope_x},
            {"slope_y", p->slope_y},
            {"shift", p->shift}};
  }
  return {{"type", "nonlinear"}, {"gamma", std::get<NonlinearDistortion>(d).gamma}};
}

Distortion distortion_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "affine") return AffineDistortion{j.at("scale").get<double>(), j.value("shift", 0.0)};
  if (type == "planar") {
    return PlanarDistortion{j.at("scale").get<double>(), j.value("slope_x", 0.0),
                            j.value("slope_y", 0.0), j.value("shift", 0.0)};
  }
  if (type == "nonlinear") return NonlinearDistortion{j.value("gamma", 1.2)};
  throw Error(ErrorCode::InvalidSpec, "unknown distortion type '" + type + "'");
}

}  // namespace

std::string scene_spec_to_json(const SceneSpec& spec) {
  json j;
  j["height"] = spec.height;
  j["width"] = spec.width;
  j["seed"] = spec.seed;
  j["depth_range"] = {spec.depth_range.min, spec.depth_range.max};
  j["noise_sigma"] = spec.noise_sigma;
  if (const auto* g = std::get_if<GridLayout>(&spec.layout)) {
    j["layout"] = {{"type", "grid"}, {"rows", g->rows}, {"cols", g->cols}};
  } else {
    j["layout"] = {{"type", "voronoi"}, {"sites", std::get<VoronoiLayout>(spec.layout).sites}};
  }
  json regions = json::array();
  for (const RegionSurface& r : spec.regions) {
    regions.push_back({{"plane", {{"m", r.plane.m}, {"n", r.plane.n}, {"l", r.plane.l}}},
                       {"curvature", r.curvature},
                       {"center", {r.center_x, r.center_y}},
                       {"distortion", distortion_to_json(r.distortion)}});
  }
  j["regions"] = regions;
  return j.dump(2) + "\n";
}

SceneSpec scene_spec_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    SceneSpec spec;
    spec.height = j.at("height").get<std::size_t>();
    spec.width = j.at("width").get<std::size_t>();
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("depth_range")) {
      spec.depth_range = {j["depth_range"].at(0).get<double>(), j["depth_range"].at(1).get<double>()};
    }
    spec.noise_sigma = j.value("noise_sigma", 0.0);
    const json& layout = j.at("layout");
    const std::string type = layout.at("type").get<std::string>();
    if (type == "grid") {
      spec.layout = GridLayout{layout.at("rows").get<std::size_t>(), layout.at("cols").get<std::size_t>()};
    } else if (type == "voronoi") {
      spec.layout = VoronoiLayout{layout.at("sites").get<std::size_t>()};
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown layout type '" + type + "'");
    }
    for (const json& r : j.at("regions")) {
      RegionSurface s;
      const json& plane = r.at("plane");
      s.plane = {plane.value("m", 0.0), plane.value("n", 0.0), plane.at("l").get<double>()};
      s.curvature = r.value("curvature", 0.0);
      if (r.contains("center")) {
        s.center_x = r["center"].at(0).get<double>();
        s.center_y = r["center"].at(1).get<double>();
      }
      if (r.contains("distortion")) s.distortion = distortion_from_json(r["distortion"]);
      spec.regions.push_back(s);
    }
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("scene spec: ") + e.what());
  }
}

void write_scene_dir(const std::filesystem::path& dir, const SceneSpec& spec, const Scene& scene) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "scene.json", scene_spec_to_json(spec));
  save_depth(dir / "gt.dpg", scene.gt);
  save_depth(dir / "relative.dpg", scene.relative);
  save_mask(dir / "mask.pgm", scene.mask);
}

LoadedScene load_scene_dir(const std::filesystem::path& dir) {
  LoadedScene loaded;
  loaded.id = dir.filename().string();
  loaded.scene.gt = load_depth(dir / "gt.dpg");
  loaded.scene.relative = load_depth(dir / "relative.dpg");
  loaded.scene.mask = load_mask(dir / "mask.pgm");
  if (std::filesystem::exists(dir / "scene.json")) {
    try {
      loaded.spec = scene_spec_from_json(read_text_file(dir / "scene.json"));
    } catch (const Error& e) {
      throw Error(e.code(), (dir / "scene.json").string() + ": " + e.detail());
    }
  }
  return loaded;
}

SparseSamples draw_samples(const DepthGrid& gt, const SampleRequest& request) {
  if (request.n_samples.has_value() == request.beams.has_value()) {
    throw Error(ErrorCode::InvalidSpec, "request exactly one of a sample count and a beam count");
  }
  if (request.beams) return sample_beams(gt, *request.beams, request.seed, request.noise_sigma);
  return sample_uniform(gt, *request.n_samples, request.seed, request.noise_sigma);
}

RescaleOutcome run_rescale(const RunManifest& m, std::ostream* warnings) {
  validate(m);
  const DepthLoadOptions load_options{m.pgm_scale};
  const DepthGrid model_output = load_depth(m.relative, load_options);
  const DepthGrid relative =
      m.already_depth ? model_output : invert_depth(model_output, m.inverse_epsilon);
  const LabelGrid mask = load_mask(m.mask);

  std::optional<DepthGrid> gt;
  if (m.gt) gt = load_depth(*m.gt, load_options);

  RescaleOutcome outcome;
  if (m.samples) {
    outcome.samples = load_samples(*m.samples, warnings);
  } else {
    outcome.samples = draw_samples(*gt, {m.n_samples, m.beams, m.seed, m.noise_sigma});
  }
  try {
    outcome.samples.check_bounds(relative.height(), relative.width());
  } catch (const Error& e) {
    throw Error(e.code(), (m.samples ? m.samples->string() : std::string("samples")) + ": " + e.detail());
  }

  outcome.result = rescale(relative, mask, outcome.samples, m.pipeline);
  save_depth(m.output_depth, outcome.result.depth);
  if (m.output_report) {
    std::ostringstream report;
    write_region_report(report, outcome.result.reports);
    write_text_file(*m.output_report, report.str());
  }
  if (m.output_samples) save_samples(*m.output_samples, outcome.samples);
  if (gt) {
    outcome.metrics = evaluate(outcome.result.depth, *gt, m.eval_range);
    if (m.output_metrics) {
      std::ostringstream csv;
      write_metric_csv(csv, {MetricRow{m.image_id, std::string(to_string(m.pipeline.method)),
                                       is_region_aware(m.pipeline.method), outcome.samples.size(),
                                       m.seed, *outcome.metrics}});
      write_text_file(*m.output_metrics, csv.str());
    }
  }
  return outcome;
}

std::vector<MetricRow> bench_scene(const LoadedScene& scene, const SparseSamples& samples,
                                   std::string_view sampling_label, std::uint64_t seed,
                                   const BenchOptions& options) {
  std::vector<MetricRow> rows;
  for (Method method : options.methods) {
    PipelineConfig cfg = options.pipeline;
    cfg.method = method;
    const RescaleResult result = rescale(scene.scene.relative, scene.scene.mask, samples, cfg);
    MetricRow row;
    row.image_id = scene.id;
    row.method = std::string(to_string(method)) + std::string(sampling_label);
    row.region_aware = is_region_aware(method);
    row.n_samples = samples.size();
    row.seed = seed;
    row.report = evaluate(result.depth, scene.scene.gt, options.eval_range);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MetricRow> run_bench(const BenchOptions& options) {
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(options.scenes_dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "gt.dpg")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) {
    throw Error(ErrorCode::Io, "no scene directories under " + options.scenes_dir.string());
  }

  std::vector<std::vector<MetricRow>> per_scene(dirs.size());
  std::vector<std::optional<Error>> failures(dirs.size());

  auto process = [&](std::size_t k) {
    try {
      const LoadedScene scene = load_scene_dir(dirs[k]);
      const double sigma =
          options.noise_sigma.value_or(scene.spec ? scene.spec->noise_sigma : 0.0);
      auto& rows = per_scene[k];
      auto run = [&](const SampleRequest& request, std::string_view label) {
        const SparseSamples samples = draw_samples(scene.scene.gt, request);
        auto out = bench_scene(scene, samples, label, request.seed, options);
        rows.insert(rows.end(), out.begin(), out.end());
      };
      for (std::size_t budget : options.budgets) {
        for (std::size_t s = 0; s < options.seeds; ++s) {
          run({budget, std::nullopt, options.seed_base + s, sigma}, "");
        }
      }
      for (std::size_t beams : options.beams) {
        for (std::size_t s = 0; s < options.seeds; ++s) {
          run({std::nullopt, beams, options.seed_base + s, sigma}, "+beams" + std::to_string(beams));
        }
      }
    } catch (const Error& e) {
      failures[k] = Error(e.code(), dirs[k].string() + ": " + e.detail());
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, dirs.size());
  if (threads == 1) {
    for (std::size_t k = 0; k < dirs.size(); ++k) process(k);
  } else {
    std::mutex next_mutex;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t k;
          {
            std::lock_guard lock(next_mutex);
            if (next >= dirs.size()) return;
            k = next++;
          }
          process(k);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<MetricRow> rows;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    if (failures[k]) throw *failures[k];
    rows.insert(rows.end(), per_scene[k].begin(), per_scene[k].end());
  }
  return rows;
}

}  // namespace regscale
