#include "tissuegmm/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "text_util.hpp"
#include "tissuegmm/error.hpp"

namespace tissuegmm {
namespace {

using nlohmann::json;

void flatten_into(const json& node, const std::string& prefix, std::map<std::string, json>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten_into(value, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  if (out.count(prefix)) fail(ErrorKind::ConfigError, "config key '" + prefix + "' given twice");
  out[prefix] = node;
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(ErrorKind::ConfigError, key + " must be an integer");
  return v.get<int>();
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(ErrorKind::ConfigError, key + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) fail(ErrorKind::ConfigError, key + " must be numeric");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail(ErrorKind::ConfigError, key + " must be a string");
  return v.get<std::string>();
}

using Setter = std::function<void(PipelineConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"cluster.mode",
       [](PipelineConfig& c, const json& v, const std::string& k) {
         const std::string mode = as_string(v, k);
         if (mode == "labeled") {
           c.cluster.mode = ClusterSpec::Mode::Labeled;
         } else if (mode == "kmeans") {
           c.cluster.mode = ClusterSpec::Mode::KMeans;
         } else {
           fail(ErrorKind::ConfigError, "cluster.mode must be 'labeled' or 'kmeans'");
         }
       }},
      {"cluster.k", [](PipelineConfig& c, const json& v, const std::string& k) { c.cluster.k = as_int(v, k); }},
      {"cluster.seed", [](PipelineConfig& c, const json& v, const std::string& k) { c.cluster.seed = as_seed(v, k); }},
      {"reg.epsilon", [](PipelineConfig& c, const json& v, const std::string& k) { c.cluster.epsilon = as_double(v, k); }},
      {"gmm.N",
       [](PipelineConfig& c, const json& v, const std::string& k) {
         if (v.is_number_integer()) {
           const int n = as_int(v, k);
           c.components = {n, n};
         } else {
           c.components = parse_component_range(as_string(v, k));
         }
       }},
      {"gmm.max_iters", [](PipelineConfig& c, const json& v, const std::string& k) { c.gmm.max_iters = as_int(v, k); }},
      {"gmm.tol", [](PipelineConfig& c, const json& v, const std::string& k) { c.gmm.loglik_tol = as_double(v, k); }},
      {"gmm.floor", [](PipelineConfig& c, const json& v, const std::string& k) { c.gmm.floor = as_double(v, k); }},
      {"gmm.seed", [](PipelineConfig& c, const json& v, const std::string& k) { c.gmm.seed = as_seed(v, k); }},
      {"gmm.restarts", [](PipelineConfig& c, const json& v, const std::string& k) { c.gmm.restarts = as_int(v, k); }},
      {"split.train", [](PipelineConfig& c, const json& v, const std::string& k) { c.split_train = as_int(v, k); }},
      {"split.test", [](PipelineConfig& c, const json& v, const std::string& k) { c.split_test = as_int(v, k); }},
      {"synth.frame_count", [](PipelineConfig& c, const json& v, const std::string& k) { c.synth.frame_count = as_int(v, k); }},
      {"synth.cluster_count", [](PipelineConfig& c, const json& v, const std::string& k) { c.synth.cluster_count = as_int(v, k); }},
      {"synth.points_per_cluster", [](PipelineConfig& c, const json& v, const std::string& k) { c.synth.points_per_cluster = as_int(v, k); }},
      {"synth.drift_amplitude", [](PipelineConfig& c, const json& v, const std::string& k) { c.synth.drift_amplitude = as_double(v, k); }},
      {"synth.rotation_amplitude", [](PipelineConfig& c, const json& v, const std::string& k) { c.synth.rotation_amplitude = as_double(v, k); }},
      {"synth.noise_sigma", [](PipelineConfig& c, const json& v, const std::string& k) { c.synth.noise_sigma = as_double(v, k); }},
      {"synth.tool_path",
       [](PipelineConfig& c, const json& v, const std::string& k) {
         const auto path = parse_tool_path(as_string(v, k));
         if (!path) fail(ErrorKind::ConfigError, "synth.tool_path must be line, arc or cut_stroke");
         c.synth.tool_path = *path;
       }},
      {"synth.seed", [](PipelineConfig& c, const json& v, const std::string& k) { c.synth.seed = as_seed(v, k); }},
      {"io.tracks", [](PipelineConfig& c, const json& v, const std::string& k) { c.tracks = as_string(v, k); }},
      {"io.model", [](PipelineConfig& c, const json& v, const std::string& k) { c.model = as_string(v, k); }},
      {"io.out", [](PipelineConfig& c, const json& v, const std::string& k) { c.out = as_string(v, k); }},
  };
  return table;
}

}  // namespace

ComponentRange parse_component_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto n = detail::parse_int(text);
    if (!n || *n < 1) fail(ErrorKind::ConfigError, "component count '" + text + "' is invalid");
    return {static_cast<int>(*n), static_cast<int>(*n)};
  }
  const auto lo = detail::parse_int(std::string_view(text).substr(0, dots));
  const auto hi = detail::parse_int(std::string_view(text).substr(dots + 2));
  if (!lo || !hi || *lo < 1 || *hi < *lo) {
    fail(ErrorKind::ConfigError, "component range '" + text + "' is invalid");
  }
  return {static_cast<int>(*lo), static_cast<int>(*hi)};
}

PipelineConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorKind::ConfigError, "config must be a JSON object");
  std::map<std::string, json> flat;
  flatten_into(root, "", flat);

  PipelineConfig config;
  for (const auto& [key, value] : flat) {
    const auto it = setters().find(key);
    if (it == setters().end()) fail(ErrorKind::ConfigError, "unknown config key '" + key + "'");
    it->second(config, value, key);
  }
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::NotFound, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace tissuegmm
