#pragma once

// Note-occurrence tables: counting, relative and expected frequencies,
// windowed counts, and table comparison.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ragalab/error.hpp"
#include "ragalab/notedetect.hpp"

namespace ragalab {

struct FrequencyTable {
  std::vector<std::string> labels;  // scale order
  std::vector<long long> counts;
  long long total = 0;

  FrequencyTable() = default;
  FrequencyTable(std::vector<std::string> l, std::vector<long long> c) : labels(std::move(l)), counts(std::move(c)) {
    if (labels.size() != counts.size()) throw ValidationError("frequency table: labels and counts differ in length");
    for (const auto v : counts) {
      if (v < 0) throw ValidationError("frequency table: negative count");
      total += v;
    }
  }

  std::size_t size() const noexcept { return counts.size(); }

  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    return std::nullopt;
  }
};

struct SegmentSpec {
  double start = 0.0;
  double end = 0.0;

  SegmentSpec() = default;
  SegmentSpec(double s, double e) : start(s), end(e) {
    if (!(std::isfinite(s) && std::isfinite(e)) || s < 0.0 || !(e > s))
      throw ValidationError("segment " + detail::format_g(s, 6) + ":" + detail::format_g(e, 6) +
                            " must satisfy end > start >= 0");
  }

  bool contains(double t) const noexcept { return start <= t && t < end; }
};

// Parses `start:end[,start:end...]` in seconds.
inline std::vector<SegmentSpec> parse_segments(std::string_view text) {
  std::vector<SegmentSpec> out;
  if (detail::trim(text).empty()) throw InputError("empty segment specification");
  for (const auto part : detail::split(text, ',')) {
    const auto bounds = detail::split(part, ':');
    if (bounds.size() != 2) throw InputError("segment '" + std::string(part) + "' is not start:end");
    const auto s = detail::parse_double(bounds[0]);
    const auto e = detail::parse_double(bounds[1]);
    if (!s || !e) throw InputError("segment '" + std::string(part) + "' has a non-numeric bound");
    try {
      out.emplace_back(*s, *e);
    } catch (const ValidationError& err) {
      throw InputError(err.what());
    }
  }
  return out;
}

inline std::string format_segment(const SegmentSpec& s) {
  return detail::format_g(s.start, 9) + ":" + detail::format_g(s.end, 9);
}

// Distinct note names present in the events, in scale order.
inline std::vector<std::string> labels_for(const std::vector<NoteEvent>& events) {
  std::vector<Swar> present;
  for (const auto& e : events)
    if (std::find(present.begin(), present.end(), e.note.name) == present.end()) present.push_back(e.note.name);
  std::sort(present.begin(), present.end(), [](Swar a, Swar b) { return scale_index(a) < scale_index(b); });
  std::vector<std::string> labels;
  for (const auto s : present) labels.emplace_back(swar_name(s));
  return labels;
}

// Counts events per note name (octaves pooled) whose onset lies in the
// segment, or in the whole list when no segment is given.
inline FrequencyTable count_notes(const std::vector<NoteEvent>& events, const std::vector<std::string>& labels,
                                  const std::optional<SegmentSpec>& segment = std::nullopt) {
  std::vector<long long> counts(labels.size(), 0);
  for (const auto& e : events) {
    if (segment && !segment->contains(e.onset)) continue;
    const auto name = swar_name(e.note.name);
    const auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) throw ValidationError("count_notes: note '" + std::string(name) + "' has no label");
    ++counts[static_cast<std::size_t>(it - labels.begin())];
  }
  return FrequencyTable(labels, std::move(counts));
}

inline FrequencyTable count_notes(const std::vector<NoteEvent>& events,
                                  const std::optional<SegmentSpec>& segment = std::nullopt) {
  return count_notes(events, labels_for(events), segment);
}

inline std::vector<double> relative(const FrequencyTable& table) {
  if (table.total <= 0) throw ValidationError("relative: table total is zero");
  std::vector<double> rel;
  rel.reserve(table.size());
  for (const auto c : table.counts) rel.push_back(static_cast<double>(c) / static_cast<double>(table.total));
  return rel;
}

inline std::vector<double> expected_counts(const std::vector<double>& overall_rel, long long n_segment) {
  if (n_segment < 0) throw ValidationError("expected_counts: n_segment must be non-negative");
  std::vector<double> out;
  out.reserve(overall_rel.size());
  for (const auto p : overall_rel) out.push_back(p * static_cast<double>(n_segment));
  return out;
}

inline void require_same_labels(const FrequencyTable& a, const FrequencyTable& b, std::string_view who) {
  if (a.labels != b.labels) throw ValidationError(std::string(who) + ": tables have different labels");
}

struct TableComparison {
  std::vector<std::string> labels;
  std::vector<long long> counts_a, counts_b;  // paired bar data
  std::vector<double> rel_a, rel_b;
  std::vector<double> deltas;  // rel_a - rel_b
  double total_variation = 0.0;
};

inline TableComparison compare_tables(const FrequencyTable& a, const FrequencyTable& b) {
  require_same_labels(a, b, "compare_tables");
  TableComparison out;
  out.labels = a.labels;
  out.counts_a = a.counts;
  out.counts_b = b.counts;
  out.rel_a = relative(a);
  out.rel_b = relative(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.deltas.push_back(out.rel_a[i] - out.rel_b[i]);
    out.total_variation += std::fabs(out.deltas.back());
  }
  out.total_variation *= 0.5;
  return out;
}

struct WindowedCounts {
  std::string label;
  double window = 0.0;
  SegmentSpec span;
  std::vector<long long> counts;
  std::vector<long long> cumulative;  // less-than type: occurrences before each window's upper limit

  double window_end(std::size_t i) const { return std::min(span.end, span.start + window * static_cast<double>(i + 1)); }
};

// Occurrences of one note per consecutive window of the span, by onset.
inline WindowedCounts windowed_counts(const std::vector<NoteEvent>& events, Swar note, double window,
                                      const SegmentSpec& span) {
  if (!(window > 0.0)) throw ValidationError("windowed_counts: window must be positive");
  WindowedCounts out;
  out.label = std::string(swar_name(note));
  out.window = window;
  out.span = span;
  const auto n_windows = static_cast<std::size_t>(std::ceil((span.end - span.start) / window - 1e-9));
  out.counts.assign(n_windows, 0);
  for (const auto& e : events) {
    if (e.note.name != note || !span.contains(e.onset)) continue;
    auto idx = static_cast<std::size_t>(std::floor((e.onset - span.start) / window));
    idx = std::min(idx, n_windows - 1);
    ++out.counts[idx];
  }
  long long running = 0;
  for (const auto c : out.counts) out.cumulative.push_back(running += c);
  return out;
}

}  // namespace ragalab
