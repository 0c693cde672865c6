#pragma once

// Pitch-contour ornament taxonomy: stays, rising/falling/mixed transitions
// with shape, and hats/valleys with skew and magnitude. All geometry is in
// semitones.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ragalab/error.hpp"
#include "ragalab/notedetect.hpp"
#include "ragalab/pitchdata.hpp"

namespace ragalab {

enum class ContourKind { Stay, Rising, Falling, Mixed, Hat, Valley };
enum class Shape { Convex, Concave, Linear, NotApplicable };
enum class Skew { Positive, Negative, Symmetric, NotApplicable };
enum class Magnitude { Low, Moderate, High, NotApplicable };

inline std::string_view kind_name(ContourKind k) {
  static constexpr std::array<std::string_view, 6> names = {"Stay", "Rising", "Falling", "Mixed", "Hat", "Valley"};
  return names[static_cast<std::size_t>(k)];
}
inline std::string_view shape_name(Shape s) {
  static constexpr std::array<std::string_view, 4> names = {"Convex", "Concave", "Linear", "NotApplicable"};
  return names[static_cast<std::size_t>(s)];
}
inline std::string_view skew_name(Skew s) {
  static constexpr std::array<std::string_view, 4> names = {"Positive", "Negative", "Symmetric", "NotApplicable"};
  return names[static_cast<std::size_t>(s)];
}
// Valleys read Shallow/Moderate/Deep.
inline std::string_view magnitude_name(Magnitude m, ContourKind kind = ContourKind::Hat) {
  static constexpr std::array<std::string_view, 4> hat = {"Low", "Moderate", "High", "NotApplicable"};
  static constexpr std::array<std::string_view, 4> valley = {"Shallow", "Moderate", "Deep", "NotApplicable"};
  return (kind == ContourKind::Valley ? valley : hat)[static_cast<std::size_t>(m)];
}

struct ContourParams {
  double reversal_threshold = 0.5;  // semitones
  double return_tolerance = 0.5;    // semitones
  double linear_tolerance = 0.05;   // normalized signed area
  double skew_tolerance = 0.1;
  double mag_lo = 1.0;  // semitones
  double mag_hi = 3.0;  // semitones
  double cv_threshold = 0.3;

  void validate() const {
    const bool ok = reversal_threshold > 0.0 && return_tolerance > 0.0 && linear_tolerance > 0.0 &&
                    skew_tolerance > 0.0 && skew_tolerance < 0.5 && mag_lo > 0.0 && mag_hi >= mag_lo &&
                    cv_threshold > 0.0;
    if (!ok) throw ValidationError("contour parameters must be positive (skew_tolerance < 0.5, mag_hi >= mag_lo)");
  }
};

struct SpanPoint {
  double t = 0.0;
  double pitch = 0.0;  // semitones
};

struct ContourSegment {
  ContourKind kind = ContourKind::Mixed;
  double t0 = 0.0;
  double t1 = 0.0;
  Shape shape = Shape::NotApplicable;
  Skew skew = Skew::NotApplicable;
  Magnitude magnitude = Magnitude::NotApplicable;
  double extent_semitones = 0.0;
  std::optional<NoteKey> note;  // stays only
};

namespace detail {
inline constexpr double kGeomEps = 1e-9;

inline bool at_least(double v, double threshold) { return v >= threshold - kGeomEps; }

struct SpanExtremes {
  double lo, hi, run_up, draw_down;
};

inline SpanExtremes extremes(std::span<const SpanPoint> pts) {
  SpanExtremes e{pts.front().pitch, pts.front().pitch, 0.0, 0.0};
  double running_min = pts.front().pitch, running_max = pts.front().pitch;
  for (const auto& p : pts) {
    e.lo = std::min(e.lo, p.pitch);
    e.hi = std::max(e.hi, p.pitch);
    e.run_up = std::max(e.run_up, p.pitch - running_min);
    e.draw_down = std::max(e.draw_down, running_max - p.pitch);
    running_min = std::min(running_min, p.pitch);
    running_max = std::max(running_max, p.pitch);
  }
  return e;
}
}  // namespace detail

inline ContourKind classify_direction(std::span<const SpanPoint> pts, const ContourParams& params = {}) {
  if (pts.size() < 2) throw ValidationError("classify_direction: need at least 2 samples");
  const double start = pts.front().pitch;
  const double end = pts.back().pitch;
  const auto ex = detail::extremes(pts);
  const bool returns = std::fabs(end - start) < params.return_tolerance;
  const double peak = ex.hi - std::max(start, end);
  const double dip = std::min(start, end) - ex.lo;
  const bool hat = returns && detail::at_least(peak, params.reversal_threshold);
  const bool valley = returns && detail::at_least(dip, params.reversal_threshold);
  if (hat && (!valley || peak >= dip)) return ContourKind::Hat;
  if (valley) return ContourKind::Valley;

  const double net = end - start;
  if (detail::at_least(net, params.reversal_threshold) && !detail::at_least(ex.draw_down, params.reversal_threshold))
    return ContourKind::Rising;
  if (detail::at_least(-net, params.reversal_threshold) && !detail::at_least(ex.run_up, params.reversal_threshold))
    return ContourKind::Falling;
  return ContourKind::Mixed;
}

// Trapezoidal signed area between the curve and its endpoint chord, divided
// by duration * |net change|. Negative means the curve sags below the chord.
inline double normalized_chord_area(std::span<const SpanPoint> pts) {
  if (pts.size() < 2) throw ValidationError("classify_shape: need at least 2 samples");
  const auto& a = pts.front();
  const auto& b = pts.back();
  const double duration = b.t - a.t;
  const double net = b.pitch - a.pitch;
  if (!(duration > 0.0) || net == 0.0) throw ValidationError("classify_shape: span has zero net change");
  auto gap = [&](const SpanPoint& p) { return p.pitch - (a.pitch + net * (p.t - a.t) / duration); };
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += 0.5 * (gap(pts[i - 1]) + gap(pts[i])) * (pts[i].t - pts[i - 1].t);
  return area / (duration * std::fabs(net));
}

inline Shape classify_shape(std::span<const SpanPoint> pts, const ContourParams& params = {}) {
  const double area = normalized_chord_area(pts);
  if (area < -params.linear_tolerance) return Shape::Convex;
  if (area > params.linear_tolerance) return Shape::Concave;
  return Shape::Linear;
}

struct HatValleyShape {
  Skew skew = Skew::Symmetric;
  Magnitude magnitude = Magnitude::Low;
  double extent_semitones = 0.0;
  double extremum_position = 0.5;  // (t_extremum - t0) / (t1 - t0)
};

inline HatValleyShape classify_hat_valley(std::span<const SpanPoint> pts, ContourKind kind,
                                          const ContourParams& params = {}) {
  if (pts.size() < 2) throw ValidationError("classify_hat_valley: need at least 2 samples");
  if (kind != ContourKind::Hat && kind != ContourKind::Valley)
    throw ValidationError("classify_hat_valley: kind must be Hat or Valley");
  const bool hat = kind == ContourKind::Hat;
  const auto better = [hat](double a, double b) { return hat ? a > b : a < b; };

  std::size_t first = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (better(pts[i].pitch, pts[first].pitch)) first = i;
  std::size_t last = first;
  for (std::size_t i = first; i < pts.size(); ++i)
    if (pts[i].pitch == pts[first].pitch) last = i;  // flat top: take the middle of the plateau

  HatValleyShape out;
  const double t0 = pts.front().t, t1 = pts.back().t;
  const double t_ext = 0.5 * (pts[first].t + pts[last].t);
  out.extremum_position = (t_ext - t0) / (t1 - t0);
  const double r = out.extremum_position;
  if (r <= 0.5 - params.skew_tolerance + detail::kGeomEps) {
    out.skew = Skew::Positive;
  } else if (r >= 0.5 + params.skew_tolerance - detail::kGeomEps) {
    out.skew = Skew::Negative;
  } else {
    out.skew = Skew::Symmetric;
  }

  out.extent_semitones = std::fabs(pts[first].pitch - 0.5 * (pts.front().pitch + pts.back().pitch));
  if (out.extent_semitones < params.mag_lo) {
    out.magnitude = Magnitude::Low;
  } else if (out.extent_semitones > params.mag_hi) {
    out.magnitude = Magnitude::High;
  } else {
    out.magnitude = Magnitude::Moderate;
  }
  return out;
}

// Full classification of one non-stay span.
inline ContourSegment classify_span(std::span<const SpanPoint> pts, const ContourParams& params = {}) {
  ContourSegment seg;
  seg.t0 = pts.front().t;
  seg.t1 = pts.back().t;
  seg.kind = classify_direction(pts, params);
  switch (seg.kind) {
    case ContourKind::Rising:
    case ContourKind::Falling:
      seg.shape = classify_shape(pts, params);
      seg.extent_semitones = std::fabs(pts.back().pitch - pts.front().pitch);
      break;
    case ContourKind::Hat:
    case ContourKind::Valley: {
      const auto hv = classify_hat_valley(pts, seg.kind, params);
      seg.skew = hv.skew;
      seg.magnitude = hv.magnitude;
      seg.extent_semitones = hv.extent_semitones;
      break;
    }
    default: {
      const auto ex = detail::extremes(pts);
      seg.extent_semitones = ex.hi - ex.lo;
      break;
    }
  }
  return seg;
}

// Stays are the detected note events; each voiced stretch between two
// consecutive stays (anchored on the stays' boundary samples, split at
// unvoiced samples) is classified once. Adjacent segments share only their
// boundary instant.
inline std::vector<ContourSegment> segment_contour(const PitchTrack& track, const NoteDatabase& db,
                                                   double min_dwell = kDefaultMinDwell,
                                                   const ContourParams& params = {}) {
  params.validate();
  const auto events = detect_events(track, db, min_dwell);
  const auto& samples = track.samples();
  auto index_at = [&](double t) {
    const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                     [](const PitchSample& s, double v) { return s.t < v; });
    return static_cast<std::size_t>(it - samples.begin());
  };
  auto points = [&](std::size_t from, std::size_t to) {  // inclusive, all voiced
    std::vector<SpanPoint> pts;
    for (std::size_t i = from; i <= to; ++i) pts.push_back({samples[i].t, semitones(*samples[i].f0)});
    return pts;
  };

  std::vector<ContourSegment> out;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    const std::size_t first = index_at(ev.onset);
    const std::size_t last = index_at(ev.offset);
    const auto stay_pts = points(first, last);
    const auto ex = detail::extremes(stay_pts);
    ContourSegment stay;
    stay.kind = ContourKind::Stay;
    stay.t0 = ev.onset;
    stay.t1 = ev.offset;
    stay.extent_semitones = ex.hi - ex.lo;
    stay.note = ev.note;
    out.push_back(stay);

    if (e + 1 == events.size()) break;
    const std::size_t next = index_at(events[e + 1].onset);
    std::size_t i = last;
    while (i <= next) {
      if (!samples[i].voiced()) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 <= next && samples[j + 1].voiced()) ++j;
      if (j > i) out.push_back(classify_span(points(i, j), params));
      i = j + 1;
    }
  }
  return out;
}

struct ContourSummary {
  std::array<std::size_t, 6> kind{};                // by ContourKind
  std::array<std::array<std::size_t, 3>, 2> shape{};  // [Rising, Falling][Convex, Concave, Linear]
  std::array<std::array<std::size_t, 3>, 2> skew{};   // [Hat, Valley][Positive, Negative, Symmetric]
  std::array<std::array<std::size_t, 3>, 2> magnitude{};  // [Hat, Valley][Low, Moderate, High]

  std::size_t count(ContourKind k) const { return kind[static_cast<std::size_t>(k)]; }
  friend bool operator==(const ContourSummary&, const ContourSummary&) = default;
};

inline ContourSummary summarize(const std::vector<ContourSegment>& segments) {
  ContourSummary s;
  for (const auto& seg : segments) {
    ++s.kind[static_cast<std::size_t>(seg.kind)];
    if (seg.kind == ContourKind::Rising || seg.kind == ContourKind::Falling) {
      const std::size_t row = seg.kind == ContourKind::Rising ? 0 : 1;
      ++s.shape[row][static_cast<std::size_t>(seg.shape)];
    } else if (seg.kind == ContourKind::Hat || seg.kind == ContourKind::Valley) {
      const std::size_t row = seg.kind == ContourKind::Hat ? 0 : 1;
      ++s.skew[row][static_cast<std::size_t>(seg.skew)];
      ++s.magnitude[row][static_cast<std::size_t>(seg.magnitude)];
    }
  }
  return s;
}

struct IOIReport {
  std::vector<double> intervals;
  double mean = 0.0;
  double cv = 0.0;  // population sd / mean
  bool rhythmic = false;
};

inline IOIReport ioi_report(const std::vector<double>& onsets, double cv_threshold = ContourParams{}.cv_threshold) {
  if (onsets.size() < 2) throw ValidationError("ioi_report: need at least 2 onsets");
  IOIReport r;
  for (std::size_t i = 1; i < onsets.size(); ++i) r.intervals.push_back(onsets[i] - onsets[i - 1]);
  for (const auto d : r.intervals) r.mean += d;
  r.mean /= static_cast<double>(r.intervals.size());
  double var = 0.0;
  for (const auto d : r.intervals) var += (d - r.mean) * (d - r.mean);
  var /= static_cast<double>(r.intervals.size());
  r.cv = r.mean > 0.0 ? std::sqrt(var) / r.mean : 0.0;
  r.rhythmic = r.cv <= cv_threshold;
  return r;
}

inline IOIReport ioi_report(const std::vector<NoteEvent>& events,
                            double cv_threshold = ContourParams{}.cv_threshold) {
  std::vector<double> onsets;
  for (const auto& e : events) onsets.push_back(e.onset);
  return ioi_report(onsets, cv_threshold);
}

}  // namespace ragalab
