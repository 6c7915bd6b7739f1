#include "regscale/manifest.hpp"

#include <json.hpp>

#include "regscale/error.hpp"
#include "regscale/io.hpp"

namespace regscale {

using nlohmann::json;

namespace {

std::string_view connectivity_name(Connectivity c) { return c == Connectivity::Eight ? "8" : "4"; }

std::string_view normalization_name(Normalization n) {
  return n == Normalization::MeanStd ? "mean-std" : "median-mad";
}

Normalization parse_normalization(const std::string& s) {
  if (s == "median-mad") return Normalization::MedianMad;
  if (s == "mean-std") return Normalization::MeanStd;
  throw Error(ErrorCode::InvalidSpec, "unknown normalization '" + s + "'");
}

Method parse_method_or_throw(const std::string& s) {
  if (auto m = parse_method(s)) return *m;
  throw Error(ErrorCode::InvalidSpec, "unknown method '" + s + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

void put_optional_path(json& j, const char* key, const std::optional<std::filesystem::path>& p) {
  if (p) {
    j[key] = p->string();
  } else {
    j[key] = nullptr;
  }
}

}  // namespace

void validate(const RunManifest& m) {
  if (m.format_version != RunManifest::kFormatVersion) {
    throw Error(ErrorCode::InvalidSpec, "unsupported manifest version " + std::to_string(m.format_version));
  }
  if (m.relative.empty() || m.mask.empty()) {
    throw Error(ErrorCode::InvalidSpec, "manifest needs relative depth and mask inputs");
  }
  if (m.output_depth.empty()) throw Error(ErrorCode::InvalidSpec, "manifest needs an output depth path");
  if (!m.samples) {
    if (!m.gt) throw Error(ErrorCode::InvalidSpec, "give either a samples file or a ground truth to sample");
    if (m.n_samples.has_value() == m.beams.has_value()) {
      throw Error(ErrorCode::InvalidSpec, "sampling from ground truth needs exactly one of n_samples and beams");
    }
  }
  if (m.output_metrics && !m.gt) throw Error(ErrorCode::InvalidSpec, "metrics need a ground truth");
  if (!(m.pipeline.clamp.min < m.pipeline.clamp.max)) {
    throw Error(ErrorCode::InvalidSpec, "clamp range must satisfy min < max");
  }
  effective_chain(m.pipeline);
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["format_version"] = m.format_version;
  j["image_id"] = m.image_id;

  json inputs;
  inputs["relative"] = m.relative.string();
  inputs["mask"] = m.mask.string();
  put_optional_path(inputs, "samples", m.samples);
  put_optional_path(inputs, "gt", m.gt);
  inputs["already_depth"] = m.already_depth;
  inputs["inverse_epsilon"] = m.inverse_epsilon;
  put_optional(inputs, "pgm_scale", m.pgm_scale);
  j["inputs"] = inputs;

  json sampling;
  put_optional(sampling, "n_samples", m.n_samples);
  put_optional(sampling, "beams", m.beams);
  sampling["seed"] = m.seed;
  sampling["noise_sigma"] = m.noise_sigma;
  j["sampling"] = sampling;

  const PipelineConfig& p = m.pipeline;
  json pipeline;
  pipeline["method"] = std::string(to_string(p.method));
  pipeline["min_samples_linear"] = p.min_samples_linear;
  pipeline["min_samples_planar"] = p.min_samples_planar;
  pipeline["min_samples_median"] = p.min_samples_median;
  put_optional(pipeline, "max_hops", p.max_hops);
  pipeline["clamp"] = {p.clamp.min, p.clamp.max};
  pipeline["connectivity"] = std::string(connectivity_name(p.regions.connectivity));
  pipeline["merge_same_label"] = p.regions.merge_same_label;
  pipeline["normalization"] = std::string(normalization_name(p.normalization));
  if (p.fallback_chain) {
    json chain = json::array();
    for (Method mm : *p.fallback_chain) chain.push_back(std::string(to_string(mm)));
    pipeline["fallback_chain"] = chain;
  } else {
    pipeline["fallback_chain"] = nullptr;
  }
  pipeline["condition_max"] = p.condition_max;
  j["pipeline"] = pipeline;

  j["evaluation_range"] = {m.eval_range.min, m.eval_range.max};

  json outputs;
  outputs["depth"] = m.output_depth.string();
  put_optional_path(outputs, "report", m.output_report);
  put_optional_path(outputs, "metrics", m.output_metrics);
  put_optional_path(outputs, "samples", m.output_samples);
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.format_version = j.at("format_version").get<int>();
    m.image_id = j.value("image_id", std::string("image"));

    const json& in = j.at("inputs");
    m.relative = resolve(base_dir, in.at("relative").get<std::string>());
    m.mask = resolve(base_dir, in.at("mask").get<std::string>());
    if (in.contains("samples") && !in["samples"].is_null()) {
      m.samples = resolve(base_dir, in["samples"].get<std::string>());
    }
    if (in.contains("gt") && !in["gt"].is_null()) m.gt = resolve(base_dir, in["gt"].get<std::string>());
    m.already_depth = in.value("already_depth", false);
    m.inverse_epsilon = in.value("inverse_epsilon", 1e-6);
    if (in.contains("pgm_scale") && !in["pgm_scale"].is_null()) m.pgm_scale = in["pgm_scale"].get<double>();

    if (j.contains("sampling")) {
      const json& s = j["sampling"];
      if (s.contains("n_samples") && !s["n_samples"].is_null()) m.n_samples = s["n_samples"].get<std::size_t>();
      if (s.contains("beams") && !s["beams"].is_null()) m.beams = s["beams"].get<std::size_t>();
      m.seed = s.value("seed", std::uint64_t{0});
      m.noise_sigma = s.value("noise_sigma", 0.0);
    }

    if (j.contains("pipeline")) {
      const json& p = j["pipeline"];
      PipelineConfig& cfg = m.pipeline;
      cfg.method = parse_method_or_throw(p.value("method", std::string("slf")));
      cfg.min_samples_linear = p.value("min_samples_linear", cfg.min_samples_linear);
      cfg.min_samples_planar = p.value("min_samples_planar", cfg.min_samples_planar);
      cfg.min_samples_median = p.value("min_samples_median", cfg.min_samples_median);
      if (p.contains("max_hops") && !p["max_hops"].is_null()) cfg.max_hops = p["max_hops"].get<std::size_t>();
      if (p.contains("clamp")) cfg.clamp = {p["clamp"].at(0).get<double>(), p["clamp"].at(1).get<double>()};
      const std::string conn = p.value("connectivity", std::string("4"));
      if (conn != "4" && conn != "8") throw Error(ErrorCode::InvalidSpec, "connectivity must be 4 or 8");
      cfg.regions.connectivity = conn == "8" ? Connectivity::Eight : Connectivity::Four;
      cfg.regions.merge_same_label = p.value("merge_same_label", false);
      cfg.normalization = parse_normalization(p.value("normalization", std::string("median-mad")));
      if (p.contains("fallback_chain") && !p["fallback_chain"].is_null()) {
        std::vector<Method> chain;
        for (const auto& name : p["fallback_chain"]) chain.push_back(parse_method_or_throw(name.get<std::string>()));
        cfg.fallback_chain = chain;
      }
      cfg.condition_max = p.value("condition_max", kDefaultConditionMax);
    }
    if (j.contains("evaluation_range")) {
      m.eval_range = {j["evaluation_range"].at(0).get<double>(), j["evaluation_range"].at(1).get<double>()};
    }

    const json& out = j.at("outputs");
    m.output_depth = resolve(base_dir, out.at("depth").get<std::string>());
    auto optional_out = [&](const char* key) -> std::optional<std::filesystem::path> {
      if (out.contains(key) && !out[key].is_null()) return resolve(base_dir, out[key].get<std::string>());
      return std::nullopt;
    };
    m.output_report = optional_out("report");
    m.output_metrics = optional_out("metrics");
    m.output_samples = optional_out("samples");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("manifest: ") + e.what());
  }
  validate(m);
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(read_text_file(path), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  write_text_file(path, manifest_to_json(manifest));
}

}  // namespace regscale
