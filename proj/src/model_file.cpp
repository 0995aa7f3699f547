#include "tissuegmm/model_file.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "tissuegmm/error.hpp"

namespace tissuegmm {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "format_version", "dimension",          "component_count",  "priors",
    "means",          "covariances",        "time_normalization", "frame_provenance"};

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(ErrorKind::FormatError, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(ErrorKind::FormatError, "unknown key '" + key + "' in " + where);
  }
  for (const auto& key : allowed) {
    if (!obj.contains(key)) fail(ErrorKind::FormatError, "missing key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) fail(ErrorKind::FormatError, what + " must be numeric");
  return v.get<double>();
}

int integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) fail(ErrorKind::FormatError, what + " must be an integer");
  return v.get<int>();
}

}  // namespace

void ModelFile::validate() const {
  if (dimension != 4) fail(ErrorKind::ValidationError, "model dimension must be 4");
  if (frame_count < 2) fail(ErrorKind::ValidationError, "frame_count must be >= 2");
  model.validate(0.0);
}

void write_model(std::ostream& out, const ModelFile& file) {
  file.validate();
  json j;
  j["format_version"] = file.format_version;
  j["dimension"] = file.dimension;
  j["component_count"] = file.model.size();
  j["priors"] = file.model.priors;
  json means = json::array();
  json covs = json::array();
  for (int k = 0; k < file.model.size(); ++k) {
    const auto& mu = file.model.means[static_cast<size_t>(k)];
    means.push_back({mu(0), mu(1), mu(2), mu(3)});
    const auto& c = file.model.covariances[static_cast<size_t>(k)];
    json rows = json::array();
    for (int r = 0; r < 4; ++r) rows.push_back({c(r, 0), c(r, 1), c(r, 2), c(r, 3)});
    covs.push_back(std::move(rows));
  }
  j["means"] = std::move(means);
  j["covariances"] = std::move(covs);
  j["time_normalization"] = {{"frame_count", file.frame_count}};
  j["frame_provenance"] = file.provenance;
  out << j.dump(2) << '\n';
}

void write_model(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::NotFound, "cannot write model file " + path.string());
  write_model(out, file);
}

ModelFile read_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::FormatError, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::FormatError, "model file must be a JSON object");
  if (!j.contains("format_version")) fail(ErrorKind::FormatError, "missing key 'format_version'");

  ModelFile file;
  file.format_version = integer(j["format_version"], "format_version");
  if (file.format_version != kModelFormatVersion) {
    fail(ErrorKind::VersionMismatch,
         "unsupported model format_version " + std::to_string(file.format_version));
  }
  require_keys(j, kTopLevelKeys, "model file");
  file.dimension = integer(j["dimension"], "dimension");
  if (file.dimension != 4) fail(ErrorKind::FormatError, "dimension must be 4");
  const int n = integer(j["component_count"], "component_count");
  if (n < 1) fail(ErrorKind::FormatError, "component_count must be >= 1");

  const json& priors = j["priors"];
  const json& means = j["means"];
  const json& covs = j["covariances"];
  if (!priors.is_array() || !means.is_array() || !covs.is_array() ||
      static_cast<int>(priors.size()) != n || static_cast<int>(means.size()) != n ||
      static_cast<int>(covs.size()) != n) {
    fail(ErrorKind::FormatError, "priors, means and covariances must each hold component_count entries");
  }
  for (int k = 0; k < n; ++k) {
    file.model.priors.push_back(number(priors[static_cast<size_t>(k)], "prior"));
    const json& mu = means[static_cast<size_t>(k)];
    if (!mu.is_array() || mu.size() != 4) fail(ErrorKind::FormatError, "each mean needs 4 entries");
    Vec4 m;
    for (int d = 0; d < 4; ++d) m(d) = number(mu[static_cast<size_t>(d)], "mean entry");
    file.model.means.push_back(m);
    const json& c = covs[static_cast<size_t>(k)];
    if (!c.is_array() || c.size() != 4) fail(ErrorKind::FormatError, "each covariance needs 4 rows");
    Mat4 cov;
    for (int r = 0; r < 4; ++r) {
      const json& row = c[static_cast<size_t>(r)];
      if (!row.is_array() || row.size() != 4) {
        fail(ErrorKind::FormatError, "each covariance row needs 4 entries");
      }
      for (int col = 0; col < 4; ++col) {
        cov(r, col) = number(row[static_cast<size_t>(col)], "covariance entry");
      }
    }
    file.model.covariances.push_back(cov);
  }

  const json& norm = j["time_normalization"];
  require_keys(norm, {"frame_count"}, "time_normalization");
  file.frame_count = integer(norm["frame_count"], "frame_count");

  const json& prov = j["frame_provenance"];
  if (!prov.is_object()) fail(ErrorKind::FormatError, "frame_provenance must be an object");
  for (const auto& [key, value] : prov.items()) {
    if (!value.is_string()) fail(ErrorKind::FormatError, "frame_provenance values must be strings");
    file.provenance[key] = value.get<std::string>();
  }

  file.validate();
  return file;
}

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::NotFound, "cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace tissuegmm
