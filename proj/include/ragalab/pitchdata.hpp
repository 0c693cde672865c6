#pragma once

// Pitch tracks: parsing, validation, and frequency-to-pitch conversion.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ragalab/error.hpp"

namespace ragalab {

inline constexpr std::string_view kTrackHeader = "time_sec,f0_hz";

struct PitchSample {
  double t = 0.0;                // seconds
  std::optional<double> f0;      // Hz; empty when unvoiced

  bool voiced() const noexcept { return f0.has_value(); }
};

// Time-ordered samples of a monophonic performance. Construction validates
// ordering and voicing; the object is immutable afterwards.
class PitchTrack {
 public:
  PitchTrack() = default;

  explicit PitchTrack(std::vector<PitchSample> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (!std::isfinite(s.t) || s.t < 0.0)
        throw ValidationError("sample " + std::to_string(i) + ": time must be finite and non-negative");
      if (s.f0 && !(*s.f0 > 0.0 && std::isfinite(*s.f0)))
        throw ValidationError("sample " + std::to_string(i) + ": f0 must be positive");
      if (i > 0 && !(s.t > samples_[i - 1].t))
        throw ValidationError("sample " + std::to_string(i) + ": non-increasing time");
    }
  }

  const std::vector<PitchSample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double duration() const noexcept { return samples_.empty() ? 0.0 : samples_.back().t; }

  std::size_t voiced_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : samples_) n += s.voiced() ? 1 : 0;
    return n;
  }

 private:
  std::vector<PitchSample> samples_;
};

struct PitchValue {
  double midi_real = 0.0;  // semitones, A440 = 69
  int midi_int = 0;        // round-half-up of midi_real
};

inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

inline PitchValue to_midi(double f0_hz) {
  if (!(f0_hz > 0.0) || !std::isfinite(f0_hz))
    throw ValidationError("to_midi: frequency must be positive");
  const double p = 69.0 + 12.0 * std::log2(f0_hz / 440.0);
  return {p, round_half_up(p)};
}

// Semitone value only, for geometry code that does not need the integer.
inline double semitones(double f0_hz) { return to_midi(f0_hz).midi_real; }

struct PitchProfile {
  std::vector<std::pair<double, double>> points;  // (t, midi_real)
  int min_midi = 0;
  int max_midi = 0;
};

inline PitchProfile pitch_profile(const PitchTrack& track) {
  PitchProfile out;
  bool first = true;
  for (const auto& s : track.samples()) {
    if (!s.voiced()) continue;
    const auto v = to_midi(*s.f0);
    out.points.emplace_back(s.t, v.midi_real);
    if (first) {
      out.min_midi = out.max_midi = v.midi_int;
      first = false;
    } else {
      out.min_midi = std::min(out.min_midi, v.midi_int);
      out.max_midi = std::max(out.max_midi, v.midi_int);
    }
  }
  if (first) throw ValidationError("pitch_profile: track has no voiced samples");
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Reads lines, strips CR and a leading UTF-8 BOM. Line numbers are 1-based.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (number_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::size_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

inline std::string format_g(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Shortest text that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Parses the `time_sec,f0_hz` CSV. Blank or 0 in the f0 column marks an
// unvoiced sample. Errors carry the offending line number.
inline PitchTrack parse_track(std::istream& in) {
  detail::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw InputError(1, "missing header");
  if (detail::trim(line) != kTrackHeader)
    throw InputError(1, "expected header '" + std::string(kTrackHeader) + "'");

  std::vector<PitchSample> samples;
  while (reader.next(line)) {
    const auto n = reader.number();
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != 2) throw InputError(n, "expected 2 columns, got " + std::to_string(cols.size()));
    const auto t = detail::parse_double(cols[0]);
    if (!t) throw InputError(n, "time_sec is not a number");
    if (!std::isfinite(*t) || *t < 0.0) throw InputError(n, "time_sec must be finite and non-negative");
    if (!samples.empty() && !(*t > samples.back().t)) throw InputError(n, "non-increasing time");

    PitchSample s{*t, std::nullopt};
    if (!detail::trim(cols[1]).empty()) {
      const auto f = detail::parse_double(cols[1]);
      if (!f) throw InputError(n, "f0_hz is not a number");
      if (!std::isfinite(*f) || *f < 0.0) throw InputError(n, "negative f0_hz");
      if (*f > 0.0) s.f0 = *f;
    }
    samples.push_back(s);
  }
  return PitchTrack(std::move(samples));
}

inline PitchTrack parse_track(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_track(in);
}

// Emits the CSV accepted by parse_track; unvoiced samples get a blank f0.
inline std::string serialize_track(const PitchTrack& track) {
  std::string out(kTrackHeader);
  out += '\n';
  for (const auto& s : track.samples()) {
    out += detail::format_exact(s.t);
    out += ',';
    if (s.f0) out += detail::format_exact(*s.f0);
    out += '\n';
  }
  return out;
}

}  // namespace ragalab
