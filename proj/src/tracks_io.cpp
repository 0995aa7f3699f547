#include "tissuegmm/tracks_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "text_util.hpp"
#include "tissuegmm/error.hpp"

namespace tissuegmm {
namespace {

constexpr std::string_view kHeader = "frame,track_id,role,cluster_label,x,y,visible";

[[noreturn]] void format_error(size_t line, const std::string& what) {
  fail(ErrorKind::FormatError, "line " + std::to_string(line) + ": " + what);
}

LandmarkSample parse_row(std::string_view row, size_t line) {
  const auto cols = detail::split(row, ',');
  if (cols.size() != 7) {
    format_error(line, "expected 7 columns, found " + std::to_string(cols.size()));
  }
  LandmarkSample s;
  const auto frame = detail::parse_int(cols[0]);
  if (!frame) format_error(line, "non-numeric frame");
  if (*frame < 1) format_error(line, "frame index must be >= 1");
  s.frame = static_cast<int>(*frame);

  s.track_id = std::string(detail::trim(cols[1]));
  if (s.track_id.empty()) format_error(line, "empty track_id");

  const auto role = parse_role(detail::trim(cols[2]));
  if (!role) format_error(line, "unknown role '" + std::string(detail::trim(cols[2])) + "'");
  s.role = *role;

  const auto label = detail::trim(cols[3]);
  if (!label.empty()) {
    if (s.role != LandmarkRole::Tissue) format_error(line, "tool landmark carries a cluster label");
    s.cluster_label = std::string(label);
  }

  const auto x = detail::parse_double(cols[4]);
  const auto y = detail::parse_double(cols[5]);
  if (!x || !y) format_error(line, "non-numeric coordinate");
  if (!std::isfinite(*x) || !std::isfinite(*y)) format_error(line, "non-finite coordinate");
  s.position = Vec2(*x, *y);

  const auto vis = detail::trim(cols[6]);
  if (vis == "1") {
    s.visible = true;
  } else if (vis == "0") {
    s.visible = false;
  } else {
    format_error(line, "visible must be 0 or 1");
  }
  return s;
}

}  // namespace

std::string_view to_string(LandmarkRole role) noexcept {
  switch (role) {
    case LandmarkRole::ToolCenter: return "tool_center";
    case LandmarkRole::ToolTip: return "tool_tip";
    case LandmarkRole::Tissue: return "tissue";
  }
  return "tissue";
}

std::optional<LandmarkRole> parse_role(std::string_view text) noexcept {
  if (text == "tool_center") return LandmarkRole::ToolCenter;
  if (text == "tool_tip") return LandmarkRole::ToolTip;
  if (text == "tissue") return LandmarkRole::Tissue;
  return std::nullopt;
}

TrackSet TrackSet::from_samples(std::vector<LandmarkSample> samples,
                                const TrackValidation& validation) {
  if (samples.empty()) fail(ErrorKind::EmptyInput, "track set has no samples");

  std::stable_sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.track_id < b.track_id;
  });

  std::map<std::string, LandmarkRole, std::less<>> roles;
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.role != LandmarkRole::Tissue && s.cluster_label) {
      fail(ErrorKind::ValidationError, "tool track '" + s.track_id + "' carries a cluster label");
    }
    if (i > 0 && samples[i - 1].frame == s.frame && samples[i - 1].track_id == s.track_id) {
      fail(ErrorKind::ValidationError, "frame " + std::to_string(s.frame) +
                                           " repeats track '" + s.track_id + "'");
    }
    auto [it, inserted] = roles.emplace(s.track_id, s.role);
    if (!inserted && it->second != s.role) {
      fail(ErrorKind::ValidationError, "track '" + s.track_id + "' changes role");
    }
  }

  const int frame_count = samples.back().frame;
  TrackSet set;
  set.frame_offsets_.assign(static_cast<size_t>(frame_count) + 1, 0);
  {
    size_t i = 0;
    for (int f = 1; f <= frame_count; ++f) {
      set.frame_offsets_[static_cast<size_t>(f) - 1] = i;
      while (i < samples.size() && samples[i].frame == f) ++i;
    }
    set.frame_offsets_.back() = samples.size();
  }

  const int min_tissue = 2 * std::max(validation.min_clusters, 1);
  for (int f = 1; f <= frame_count; ++f) {
    int centers = 0, tips = 0, tissue = 0;
    for (size_t i = set.frame_offsets_[static_cast<size_t>(f) - 1];
         i < set.frame_offsets_[static_cast<size_t>(f)]; ++i) {
      if (!samples[i].visible) continue;
      switch (samples[i].role) {
        case LandmarkRole::ToolCenter: ++centers; break;
        case LandmarkRole::ToolTip: ++tips; break;
        case LandmarkRole::Tissue: ++tissue; break;
      }
    }
    const std::string where = "frame " + std::to_string(f);
    if (centers == 0) fail(ErrorKind::ValidationError, where + " has no visible tool_center");
    if (tips == 0) fail(ErrorKind::ValidationError, where + " has no visible tool_tip");
    if (tissue < min_tissue) {
      fail(ErrorKind::ValidationError, where + " has " + std::to_string(tissue) +
                                           " visible tissue samples, needs " +
                                           std::to_string(min_tissue));
    }
  }
  set.samples_ = std::move(samples);
  return set;
}

std::span<const LandmarkSample> TrackSet::frame(int index) const {
  if (index < 1 || index > frame_count()) {
    fail(ErrorKind::ValidationError, "frame " + std::to_string(index) + " out of range");
  }
  const size_t begin = frame_offsets_[static_cast<size_t>(index) - 1];
  const size_t end = frame_offsets_[static_cast<size_t>(index)];
  return std::span<const LandmarkSample>(samples_).subspan(begin, end - begin);
}

bool TrackSet::fully_labeled() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](const auto& s) {
    return s.role != LandmarkRole::Tissue || s.cluster_label.has_value();
  });
}

TrackSet parse_tracks(std::istream& in, const TrackValidation& validation) {
  std::string line;
  size_t lineno = 0;
  bool have_header = false;
  std::vector<LandmarkSample> samples;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!have_header) {
      std::string_view header = text;
      if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
      if (header != kHeader) {
        format_error(lineno, "bad header, expected '" + std::string(kHeader) + "'");
      }
      have_header = true;
      continue;
    }
    samples.push_back(parse_row(text, lineno));
  }
  if (samples.empty()) fail(ErrorKind::EmptyInput, "track file has no data rows");
  return TrackSet::from_samples(std::move(samples), validation);
}

TrackSet parse_tracks(const std::filesystem::path& path, const TrackValidation& validation) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::NotFound, "cannot open track file " + path.string());
  return parse_tracks(in, validation);
}

void write_tracks(std::ostream& out, const TrackSet& tracks) {
  out << kHeader << '\n';
  for (const auto& s : tracks.samples()) {
    out << s.frame << ',' << s.track_id << ',' << to_string(s.role) << ','
        << s.cluster_label.value_or("") << ',' << detail::format_double(s.position.x()) << ','
        << detail::format_double(s.position.y()) << ',' << (s.visible ? 1 : 0) << '\n';
  }
}

void write_tracks(const std::filesystem::path& path, const TrackSet& tracks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::NotFound, "cannot write track file " + path.string());
  write_tracks(out, tracks);
}

Pose2 tool_pose(std::span<const LandmarkSample> frame) {
  Vec2 center = Vec2::Zero();
  Vec2 tip = Vec2::Zero();
  int centers = 0;
  int tips = 0;
  for (const auto& s : frame) {
    if (!s.visible) continue;
    if (s.role == LandmarkRole::ToolCenter) {
      center += s.position;
      ++centers;
    } else if (s.role == LandmarkRole::ToolTip) {
      tip += s.position;
      ++tips;
    }
  }
  if (centers == 0 || tips == 0) {
    fail(ErrorKind::MissingToolLandmarks, "frame lacks a visible tool_center or tool_tip");
  }
  center /= centers;
  tip /= tips;
  const Vec2 heading = tip - center;
  return Pose2{center, Rotation2(std::atan2(heading.y(), heading.x()))};
}

}  // namespace tissuegmm
