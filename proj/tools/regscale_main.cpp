// Command-line entry point: rescale, evaluate, synth, sample, bench.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "regscale/commands.hpp"
#include "regscale/error.hpp"
#include "regscale/io.hpp"
#include "regscale/metrics.hpp"

namespace fs = std::filesystem;
using namespace regscale;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

DepthRange parse_range(const std::string& text) {
  if (text == "nyu") return DepthRange::nyu();
  if (text == "void") return DepthRange::void_dataset();
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "range must be 'min,max', 'nyu' or 'void'");
  DepthRange r{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  if (!(r.min < r.max)) throw Error(ErrorCode::ParseError, "range needs min < max");
  return r;
}

Method method_or_throw(const std::string& name) {
  if (auto m = parse_method(name)) return *m;
  throw Error(ErrorCode::ParseError, "unknown method '" + name + "'");
}

// Flags shared by rescale and bench that shape the pipeline.
struct PipelineFlags {
  std::string method = "slf";
  std::size_t min_linear = 2;
  std::size_t min_planar = 4;
  int connectivity = 4;
  std::string clamp = "nyu";
  std::string normalization = "median-mad";
  bool merge_same_label = false;
  long max_hops = -1;

  void attach(CLI::App* app, bool with_method) {
    if (with_method) {
      app->add_option("--method", method, "slf, ssf, median, global-linear or global-median")
          ->check(CLI::IsMember({"slf", "ssf", "median", "global-linear", "global-median"}));
    }
    app->add_option("--min-samples-linear", min_linear, "samples required for a scale-and-shift fit")
        ->check(CLI::Range(2, 1 << 30));
    app->add_option("--min-samples-planar", min_planar, "samples required for a surface fit")
        ->check(CLI::Range(4, 1 << 30));
    app->add_option("--connectivity", connectivity, "pixel adjacency, 4 or 8")->check(CLI::IsMember({4, 8}));
    app->add_option("--clamp", clamp, "output depth range 'min,max', 'nyu' or 'void'");
    app->add_option("--normalization", normalization)->check(CLI::IsMember({"median-mad", "mean-std"}));
    app->add_flag("--merge-same-label", merge_same_label,
                  "treat all pixels of a label as one region even when disconnected");
    app->add_option("--max-hops", max_hops, "cap on neighbour expansion rings (-1: unlimited)");
  }

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.method = method_or_throw(method);
    cfg.min_samples_linear = min_linear;
    cfg.min_samples_planar = min_planar;
    cfg.regions.connectivity = connectivity == 8 ? Connectivity::Eight : Connectivity::Four;
    cfg.regions.merge_same_label = merge_same_label;
    cfg.clamp = parse_range(clamp);
    cfg.normalization = normalization == "mean-std" ? Normalization::MeanStd : Normalization::MedianMad;
    if (max_hops >= 0) cfg.max_hops = static_cast<std::size_t>(max_hops);
    return cfg;
  }
};

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  return out;
}

void print_report(const MetricReport& m) {
  std::cout << "abs_rel  " << format_double(m.abs_rel) << "\nrmse     " << format_double(m.rmse)
            << "\nrmse_log " << format_double(m.rmse_log) << "\nlog10    " << format_double(m.log10)
            << "\nd1       " << format_double(m.delta1) << "\nd2       " << format_double(m.delta2)
            << "\nd3       " << format_double(m.delta3) << "\nn_valid  " << m.valid_pixel_count << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-aware metric scaling of relative depth maps"};
  app.require_subcommand(1);

  // rescale
  auto* rescale_cmd = app.add_subcommand("rescale", "convert a relative depth map to metric depth");
  std::string manifest_path, write_manifest_path;
  RunManifest manifest;
  std::string relative_path, mask_path, samples_path, gt_path, out_path, report_path, metrics_path;
  std::size_t n_samples = 0, beams = 0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  double pgm_scale = 0.0;
  std::string eval_range = "nyu";
  std::string image_id = "image";
  bool already_depth = false;
  PipelineFlags rescale_flags;
  rescale_cmd->add_option("--manifest", manifest_path, "replay a run manifest (other flags ignored)");
  rescale_cmd->add_option("--write-manifest", write_manifest_path, "record this run as a manifest");
  rescale_cmd->add_option("--relative", relative_path, "model output (inverse depth unless --already-depth)");
  rescale_cmd->add_option("--mask", mask_path, "segmentation mask, 8/16-bit PGM");
  rescale_cmd->add_option("--samples", samples_path, "sparse depth CSV (row,col,depth_m)");
  rescale_cmd->add_option("--gt", gt_path, "ground truth, used for sampling and evaluation");
  rescale_cmd->add_option("--n-samples", n_samples, "uniform samples drawn from --gt");
  rescale_cmd->add_option("--beams", beams, "beam rows drawn from --gt");
  rescale_cmd->add_option("--seed", seed);
  rescale_cmd->add_option("--noise", noise, "Gaussian noise on drawn samples (meters)");
  rescale_cmd->add_option("--depth-scale", pgm_scale, "PGM units per meter (default: sidecar or 1000)");
  rescale_cmd->add_option("--out", out_path, "metric depth output (.pfm, .pgm or .dpg)");
  rescale_cmd->add_option("--report", report_path, "per-region report CSV");
  rescale_cmd->add_option("--metrics", metrics_path, "metric CSV (needs --gt)");
  rescale_cmd->add_option("--eval-range", eval_range, "ground-truth range for metrics");
  rescale_cmd->add_option("--image-id", image_id);
  rescale_cmd->add_flag("--already-depth", already_depth, "model output is depth, skip inversion");
  rescale_flags.attach(rescale_cmd, true);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "compare a metric prediction to ground truth");
  std::string pred_path, eval_gt_path, eval_out, eval_method = "unknown", eval_id = "image";
  std::string eval_range_flag = "nyu";
  double eval_pgm_scale = 0.0;
  bool eval_region_aware = false;
  std::size_t eval_n = 0;
  std::uint64_t eval_seed = 0;
  evaluate_cmd->add_option("--pred", pred_path)->required();
  evaluate_cmd->add_option("--gt", eval_gt_path)->required();
  evaluate_cmd->add_option("--range", eval_range_flag, "'min,max', 'nyu' or 'void'");
  evaluate_cmd->add_option("--depth-scale", eval_pgm_scale, "PGM units per meter");
  evaluate_cmd->add_option("--out", eval_out, "write a one-row metric CSV");
  evaluate_cmd->add_option("--image-id", eval_id);
  evaluate_cmd->add_option("--method", eval_method, "label for the CSV row");
  evaluate_cmd->add_flag("--region-aware", eval_region_aware);
  evaluate_cmd->add_option("--n-samples", eval_n, "label for the CSV row");
  evaluate_cmd->add_option("--seed", eval_seed, "label for the CSV row");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write synthetic scenes with known distortions");
  std::string spec_path, synth_out;
  RandomSceneOptions random_options;
  std::string layout = "either", family = "affine";
  std::uint64_t synth_seed = 0;
  std::size_t count = 1;
  synth_cmd->add_option("--spec", spec_path, "SceneSpec JSON; otherwise a random scene is drawn");
  synth_cmd->add_option("--out-dir", synth_out)->required();
  synth_cmd->add_option("--seed", synth_seed);
  synth_cmd->add_option("--count", count, "number of random scenes (seeds seed..seed+count-1)");
  synth_cmd->add_option("--height", random_options.height);
  synth_cmd->add_option("--width", random_options.width);
  synth_cmd->add_option("--min-regions", random_options.min_regions);
  synth_cmd->add_option("--max-regions", random_options.max_regions);
  synth_cmd->add_option("--layout", layout)->check(CLI::IsMember({"grid", "voronoi", "either"}));
  synth_cmd->add_option("--distortion", family)->check(CLI::IsMember({"affine", "planar", "nonlinear", "mixed"}));
  synth_cmd->add_option("--noise", random_options.noise_sigma, "sample noise recorded in scene.json");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw sparse samples from a ground-truth grid");
  std::string sample_gt, sample_out;
  SampleRequest sample_request;
  std::size_t sample_n = 0, sample_beams_count = 0;
  double sample_pgm_scale = 0.0;
  sample_cmd->add_option("--gt", sample_gt)->required();
  sample_cmd->add_option("--n-samples", sample_n);
  sample_cmd->add_option("--beams", sample_beams_count);
  sample_cmd->add_option("--seed", sample_request.seed);
  sample_cmd->add_option("--noise", sample_request.noise_sigma);
  sample_cmd->add_option("--depth-scale", sample_pgm_scale, "PGM units per meter");
  sample_cmd->add_option("--out", sample_out)->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "sweep methods x budgets x seeds over scene directories");
  BenchOptions bench;
  std::string bench_scenes, bench_out, bench_methods = "slf,ssf", bench_budgets = "250,500,1000,2000";
  std::string bench_beams, bench_range = "nyu";
  double bench_noise = -1.0;
  PipelineFlags bench_flags;
  bench_cmd->add_option("--scenes", bench_scenes, "directory of scene directories")->required();
  bench_cmd->add_option("--out", bench_out, "metric CSV")->required();
  bench_cmd->add_option("--methods", bench_methods, "comma-separated methods");
  bench_cmd->add_option("--budgets", bench_budgets, "comma-separated sample counts");
  bench_cmd->add_option("--beam-counts", bench_beams, "comma-separated beam counts");
  bench_cmd->add_option("--seeds", bench.seeds, "seeds per configuration");
  bench_cmd->add_option("--seed", bench.seed_base, "first seed");
  bench_cmd->add_option("--noise", bench_noise, "override sample noise (meters)");
  bench_cmd->add_option("--eval-range", bench_range);
  bench_cmd->add_option("--threads", bench.threads);
  bench_flags.attach(bench_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (rescale_cmd->parsed()) {
      if (!manifest_path.empty()) {
        manifest = load_manifest(manifest_path);
      } else {
        manifest.image_id = image_id;
        manifest.relative = fs::absolute(relative_path);
        manifest.mask = fs::absolute(mask_path);
        if (!samples_path.empty()) manifest.samples = fs::absolute(samples_path);
        if (!gt_path.empty()) manifest.gt = fs::absolute(gt_path);
        manifest.already_depth = already_depth;
        if (pgm_scale > 0.0) manifest.pgm_scale = pgm_scale;
        if (n_samples > 0) manifest.n_samples = n_samples;
        if (beams > 0) manifest.beams = beams;
        manifest.seed = seed;
        manifest.noise_sigma = noise;
        manifest.pipeline = rescale_flags.config();
        manifest.eval_range = parse_range(eval_range);
        manifest.output_depth = fs::absolute(out_path);
        if (!report_path.empty()) manifest.output_report = fs::absolute(report_path);
        if (!metrics_path.empty()) manifest.output_metrics = fs::absolute(metrics_path);
        validate(manifest);
      }
      if (!write_manifest_path.empty()) save_manifest(write_manifest_path, manifest);
      const RescaleOutcome outcome = run_rescale(manifest, &std::cerr);
      std::size_t fallback = 0, expanded = 0;
      for (const auto& r : outcome.result.reports) {
        if (r.params.provenance == Provenance::GlobalFallback) ++fallback;
        if (r.params.provenance == Provenance::Expanded) ++expanded;
      }
      std::cout << "regions " << outcome.result.reports.size() << " (expanded " << expanded
                << ", global fallback " << fallback << "), samples " << outcome.samples.size() << '\n';
      if (outcome.metrics) print_report(*outcome.metrics);
    } else if (evaluate_cmd->parsed()) {
      DepthLoadOptions options;
      if (eval_pgm_scale > 0.0) options.pgm_scale = eval_pgm_scale;
      const MetricReport report =
          evaluate(load_depth(pred_path, options), load_depth(eval_gt_path, options), parse_range(eval_range_flag));
      print_report(report);
      if (!eval_out.empty()) {
        std::ostringstream csv;
        write_metric_csv(csv, {MetricRow{eval_id, eval_method, eval_region_aware, eval_n, eval_seed, report}});
        write_text_file(eval_out, csv.str());
      }
    } else if (synth_cmd->parsed()) {
      if (!spec_path.empty()) {
        const SceneSpec spec = scene_spec_from_json(read_text_file(spec_path));
        write_scene_dir(synth_out, spec, generate_scene(spec));
        std::cout << "wrote " << synth_out << '\n';
      } else {
        random_options.layout = layout == "grid"      ? LayoutChoice::Grid
                                : layout == "voronoi" ? LayoutChoice::Voronoi
                                                      : LayoutChoice::Either;
        random_options.family = family == "planar"      ? DistortionFamily::Planar
                                : family == "nonlinear" ? DistortionFamily::Nonlinear
                                : family == "mixed"     ? DistortionFamily::Mixed
                                                        : DistortionFamily::Affine;
        for (std::size_t i = 0; i < count; ++i) {
          const SceneSpec spec = random_scene_spec(random_options, synth_seed + i);
          fs::path dir = synth_out;
          if (count > 1) {
            std::ostringstream name;
            name << "scene_" << std::setw(3) << std::setfill('0') << i;
            dir /= name.str();
          }
          write_scene_dir(dir, spec, generate_scene(spec));
        }
        std::cout << "wrote " << count << " scene(s) to " << synth_out << '\n';
      }
    } else if (sample_cmd->parsed()) {
      if (sample_n > 0) sample_request.n_samples = sample_n;
      if (sample_beams_count > 0) sample_request.beams = sample_beams_count;
      DepthLoadOptions options;
      if (sample_pgm_scale > 0.0) options.pgm_scale = sample_pgm_scale;
      const SparseSamples samples = draw_samples(load_depth(sample_gt, options), sample_request);
      save_samples(sample_out, samples);
      std::cout << "wrote " << samples.size() << " samples to " << sample_out << '\n';
    } else if (bench_cmd->parsed()) {
      bench.scenes_dir = bench_scenes;
      bench.methods.clear();
      std::stringstream ss(bench_methods);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) bench.methods.push_back(method_or_throw(item));
      }
      bench.budgets = parse_list(bench_budgets);
      bench.beams = parse_list(bench_beams);
      if (bench_noise >= 0.0) bench.noise_sigma = bench_noise;
      bench.pipeline = bench_flags.config();
      bench.eval_range = parse_range(bench_range);
      const std::vector<MetricRow> rows = run_bench(bench);
      std::ostringstream csv;
      write_metric_csv(csv, rows);
      write_text_file(bench_out, csv.str());
      std::cout << "wrote " << rows.size() << " rows to " << bench_out << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? kExitNumerical : kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
