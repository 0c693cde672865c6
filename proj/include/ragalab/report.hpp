#pragma once

// JSON report sections shared by the CLI commands. Output is canonical:
// sorted keys, floats rounded to 6 significant digits, LF endings.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ragalab/contour.hpp"
#include "ragalab/notedetect.hpp"
#include "ragalab/pitchdata.hpp"
#include "ragalab/rastats.hpp"
#include "ragalab/synth.hpp"

namespace ragalab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolName = "ragalab";
inline constexpr std::string_view kToolVersion = "1.0.0";

inline double round_sig6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

inline json canonicalize(const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    return std::isfinite(v) ? json(round_sig6(v)) : json(nullptr);
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(canonicalize(e));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = canonicalize(it.value());
    return out;
  }
  return j;
}

inline std::string canonical_dump(const json& j) { return canonicalize(j).dump(2) + "\n"; }

inline json metadata_json(const json& parameters, const json& inputs) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"inputs", inputs}, {"parameters", parameters}};
}

// ---------------------------------------------------------------------------
// Detection

inline json to_json(const NoteEvent& e) {
  return {{"note", swar_name(e.note.name)},
          {"octave", e.note.octave},
          {"onset_sec", e.onset},
          {"offset_sec", e.offset},
          {"n_samples", e.n_samples}};
}

inline json to_json(const DetectionDiagnostics& d) {
  return {{"voiced", d.voiced},
          {"unvoiced", d.unvoiced},
          {"out_of_band", d.out_of_band},
          {"glide_runs", d.glide_runs},
          {"glide_samples", d.glide_samples}};
}

inline json detection_json(const Detection& det) {
  json events = json::array();
  for (const auto& e : det.events) events.push_back(to_json(e));
  return {{"events", events}, {"diagnostics", to_json(det.diagnostics)}};
}

// ---------------------------------------------------------------------------
// Statistics

inline std::string_view tie_policy_name(TiePolicy p) {
  switch (p) {
    case TiePolicy::AssignL: return "assign_l";
    case TiePolicy::AssignM: return "assign_m";
    case TiePolicy::Drop:    return "drop";
  }
  return "assign_l";
}

inline TiePolicy parse_tie_policy(std::string_view s) {
  if (s == "assign_l") return TiePolicy::AssignL;
  if (s == "assign_m") return TiePolicy::AssignM;
  if (s == "drop") return TiePolicy::Drop;
  throw InputError("unknown tie policy '" + std::string(s) + "' (assign_l, assign_m, drop)");
}

struct StatsOptions {
  std::optional<std::vector<SegmentSpec>> segments;  // default: first half, middle, last half
  std::vector<std::string> pools{"auto"};            // one entry for all segments, or one per segment
  double window = 10.0;
  double min_expected = kDefaultMinExpected;
  std::optional<double> eligibility_floor;
  TiePolicy tie_policy = TiePolicy::AssignL;
  int poly_degree = 4;
};

// Windowed-count span: from 0 to the last event offset rounded up to a
// whole number of windows.
inline SegmentSpec stats_span(const std::vector<NoteEvent>& events, double window) {
  double end = 0.0;
  for (const auto& e : events) end = std::max(end, e.offset);
  const double windows = std::max(1.0, std::ceil(end / window - 1e-9));
  return {0.0, windows * window};
}

inline std::vector<SegmentSpec> default_segments(const SegmentSpec& span) {
  const double d = span.end;
  return {{0.0, d / 2.0}, {d / 3.0, 5.0 * d / 6.0}, {d / 2.0, d}};
}

inline std::string segments_string(const std::vector<SegmentSpec>& segs) {
  std::string s;
  for (const auto& seg : segs) {
    if (!s.empty()) s += ',';
    s += format_segment(seg);
  }
  return s;
}

inline json to_json(const ChiSquareResult& r) {
  return {{"statistic", r.statistic},
          {"df", r.df},
          {"p_value", r.p_value},
          {"significant_5pct", r.significant(0.05)},
          {"pooled_observed", r.observed},
          {"pooled_expected", r.expected}};
}

inline json to_json(const RunTestResult& r) {
  return {{"n", r.n},
          {"runs", r.runs},
          {"expected_runs", r.expected_runs},
          {"variance_runs", r.variance_runs},
          {"z", r.z},
          {"median", r.median},
          {"significant_5pct", r.significant()}};
}

inline json to_json(const StabilityReport& s) {
  json entries = json::array();
  for (const auto& e : s.entries)
    entries.push_back({{"label", e.label}, {"overall_rel", e.overall_rel}, {"score", e.score}, {"eligible", e.eligible}});
  json out = {{"eligibility_floor", s.eligibility_floor}, {"entries", entries}, {"ranking", s.ranking}};
  out["vadi"] = s.vadi ? json(*s.vadi) : json(nullptr);
  out["samvadi"] = s.samvadi ? json(*s.samvadi) : json(nullptr);
  return out;
}

inline json to_json(const PolyFit& f) {
  return {{"degree", f.degree}, {"coefficients", f.coefficients}, {"r2", f.r2}, {"ss_res", f.ss_res}};
}

inline json to_json(const WindowedCounts& w) {
  std::vector<double> ends;
  for (std::size_t i = 0; i < w.counts.size(); ++i) ends.push_back(w.window_end(i));
  return {{"label", w.label}, {"window_end", ends}, {"counts", w.counts}, {"cumulative", w.cumulative}};
}

inline json table_json(const FrequencyTable& t) {
  json out = {{"counts", t.counts}, {"total", t.total}};
  out["relative"] = t.total > 0 ? json(relative(t)) : json(nullptr);
  return out;
}

// Counting, chi-square per segment, runs test, stability ranking, and the
// candidate notes' moments, windowed counts and polynomial fits.
inline json build_stats(const std::vector<NoteEvent>& events, const StatsOptions& opt) {
  if (events.empty()) throw ValidationError("stats: no note events");
  if (!(opt.window > 0.0)) throw InputError("stats: window must be positive");
  const auto span = stats_span(events, opt.window);
  const auto segments = opt.segments.value_or(default_segments(span));
  for (const auto& seg : segments)
    if (seg.start >= span.end)
      throw InputError("stats: segment " + format_segment(seg) + " lies outside the track (ends at " +
                       detail::format_g(span.end, 6) + " s)");
  if (opt.pools.empty() || (opt.pools.size() != 1 && opt.pools.size() != segments.size()))
    throw InputError("stats: give one pooling for all segments or one per segment");

  const auto labels = labels_for(events);
  const auto overall = count_notes(events, labels);
  const auto rel = relative(overall);

  json out;
  out["labels"] = labels;
  out["overall"] = table_json(overall);
  out["segments_spec"] = segments_string(segments);

  json seg_json = json::array();
  std::vector<FrequencyTable> seg_tables;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto table = count_notes(events, labels, segments[s]);
    seg_tables.push_back(table);
    const auto expected = expected_counts(rel, table.total);
    const auto& pool_text = opt.pools.size() == 1 ? opt.pools[0] : opt.pools[s];
    const bool automatic = pool_text == "auto";
    const auto pooling = automatic ? auto_pool(expected, opt.min_expected) : parse_pooling(pool_text, labels.size());
    json entry = table_json(table);
    entry["segment"] = format_segment(segments[s]);
    entry["expected"] = expected;
    entry["pooling"] = pooling.to_string();
    entry["pooling_mode"] = automatic ? "auto" : "explicit";
    entry["chi_square"] = pooling.blocks.size() >= 2 ? to_json(chi_square_gof(table, expected, pooling)) : json(nullptr);
    seg_json.push_back(entry);
  }
  out["segments"] = seg_json;

  std::vector<int> codes;
  for (const auto& e : events) {
    const auto name = swar_name(e.note.name);
    codes.push_back(static_cast<int>(std::find(labels.begin(), labels.end(), name) - labels.begin()) + 1);
  }
  if (codes.size() >= 3) {
    auto rt = to_json(run_test(codes, opt.tie_policy));
    rt["tie_policy"] = tie_policy_name(opt.tie_policy);
    out["run_test"] = rt;
  } else {
    out["run_test"] = nullptr;
  }

  json windowed = {{"window", opt.window}, {"span", format_segment(span)}, {"series", json::array()}};
  json fits = json::array();
  json moments = nullptr;
  if (seg_tables.size() >= 2) {
    const auto stab = stability_report(overall, seg_tables, opt.eligibility_floor);
    out["stability"] = to_json(stab);
    if (stab.vadi && stab.samvadi) {
      const auto model = MultinomialModel::from_table(overall);
      const auto m = multinomial_moments(model);
      const auto i = *overall.index_of(*stab.vadi);
      const auto j = *overall.index_of(*stab.samvadi);
      moments = {{"labels", {*stab.vadi, *stab.samvadi}},
                 {"n", model.n},
                 {"mean", {m.mean[i], m.mean[j]}},
                 {"variance", {m.variance[i], m.variance[j]}},
                 {"covariance", m.covariance[i][j]}};
      moments["correlation"] = m.correlation[i][j] ? json(*m.correlation[i][j]) : json(nullptr);

      for (const auto& label : {*stab.vadi, *stab.samvadi}) {
        const auto w = windowed_counts(events, *parse_swar(label), opt.window, span);
        windowed["series"].push_back(to_json(w));
        if (w.counts.size() >= static_cast<std::size_t>(opt.poly_degree) + 1) {
          std::vector<double> xs, ys_counts, ys_cum;
          for (std::size_t k = 0; k < w.counts.size(); ++k) {
            xs.push_back(w.window_end(k));
            ys_counts.push_back(static_cast<double>(w.counts[k]));
            ys_cum.push_back(static_cast<double>(w.cumulative[k]));
          }
          auto fc = to_json(polyfit(xs, ys_counts, opt.poly_degree));
          fc["label"] = label;
          fc["series"] = "counts";
          fits.push_back(fc);
          auto fcum = to_json(polyfit(xs, ys_cum, opt.poly_degree));
          fcum["label"] = label;
          fcum["series"] = "cumulative";
          fits.push_back(fcum);
        }
      }
    }
  } else {
    out["stability"] = nullptr;
  }
  out["moments"] = moments;
  out["windowed"] = windowed;
  out["polyfit"] = fits;
  return out;
}

inline json stats_parameters_json(const StatsOptions& opt, const std::vector<NoteEvent>& events) {
  const auto span = stats_span(events, opt.window);
  json p = {{"segments", segments_string(opt.segments.value_or(default_segments(span)))},
            {"pool", opt.pools},
            {"window", opt.window},
            {"min_expected", opt.min_expected},
            {"tie_policy", tie_policy_name(opt.tie_policy)},
            {"poly_degree", opt.poly_degree}};
  p["eligibility_floor"] = opt.eligibility_floor ? json(*opt.eligibility_floor) : json("default");
  return p;
}

// ---------------------------------------------------------------------------
// Contour

inline json to_json(const ContourSummary& s) {
  auto row3 = [](const std::array<std::size_t, 3>& a, const char* k0, const char* k1, const char* k2) {
    return json{{k0, a[0]}, {k1, a[1]}, {k2, a[2]}};
  };
  json rising = row3(s.shape[0], "convex", "concave", "linear");
  rising["total"] = s.count(ContourKind::Rising);
  json falling = row3(s.shape[1], "convex", "concave", "linear");
  falling["total"] = s.count(ContourKind::Falling);
  json hat = {{"total", s.count(ContourKind::Hat)},
              {"skew", row3(s.skew[0], "positive", "negative", "symmetric")},
              {"magnitude", row3(s.magnitude[0], "low", "moderate", "high")}};
  json valley = {{"total", s.count(ContourKind::Valley)},
                 {"skew", row3(s.skew[1], "positive", "negative", "symmetric")},
                 {"magnitude", row3(s.magnitude[1], "shallow", "moderate", "deep")}};
  return {{"no_transition", s.count(ContourKind::Stay)},
          {"rising", rising},
          {"falling", falling},
          {"mixed", s.count(ContourKind::Mixed)},
          {"hat", hat},
          {"valley", valley}};
}

inline json to_json(const ContourSegment& seg) {
  json j = {{"kind", kind_name(seg.kind)},
            {"t0", seg.t0},
            {"t1", seg.t1},
            {"shape", shape_name(seg.shape)},
            {"skew", skew_name(seg.skew)},
            {"magnitude", magnitude_name(seg.magnitude, seg.kind)},
            {"extent_semitones", seg.extent_semitones}};
  if (seg.note) {
    j["note"] = swar_name(seg.note->name);
    j["octave"] = seg.note->octave;
  }
  return j;
}

inline json contour_json(const std::vector<ContourSegment>& segments) {
  json list = json::array();
  for (const auto& s : segments) list.push_back(to_json(s));
  return {{"summary", to_json(summarize(segments))}, {"segments", list}};
}

inline constexpr std::string_view kContourCsvHeader = "kind,t0,t1,shape,skew,magnitude,extent_semitones";

inline void write_contour_csv(std::ostream& out, const std::vector<ContourSegment>& segments) {
  out << kContourCsvHeader << '\n';
  for (const auto& s : segments)
    out << kind_name(s.kind) << ',' << detail::format_g(s.t0) << ',' << detail::format_g(s.t1) << ','
        << shape_name(s.shape) << ',' << skew_name(s.skew) << ',' << magnitude_name(s.magnitude, s.kind) << ','
        << detail::format_g(s.extent_semitones, 6) << '\n';
}

inline json to_json(const ContourParams& p) {
  return {{"reversal_threshold", p.reversal_threshold},
          {"return_tolerance", p.return_tolerance},
          {"linear_tolerance", p.linear_tolerance},
          {"skew_tolerance", p.skew_tolerance},
          {"mag_lo", p.mag_lo},
          {"mag_hi", p.mag_hi},
          {"cv_threshold", p.cv_threshold}};
}

inline ContourParams contour_params_from_json(const json& j, ContourParams p = {}) {
  static const char* const keys[] = {"reversal_threshold", "return_tolerance", "linear_tolerance", "skew_tolerance",
                                     "mag_lo",             "mag_hi",           "cv_threshold"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find_if(std::begin(keys), std::end(keys), [&](const char* k) { return it.key() == k; }) == std::end(keys))
      throw InputError("contour config: unknown key '" + it.key() + "'");
  auto read = [&](const char* key, double& field) {
    if (j.contains(key)) {
      if (!j[key].is_number()) throw InputError(std::string("contour config: ") + key + " must be a number");
      field = j[key].get<double>();
    }
  };
  read("reversal_threshold", p.reversal_threshold);
  read("return_tolerance", p.return_tolerance);
  read("linear_tolerance", p.linear_tolerance);
  read("skew_tolerance", p.skew_tolerance);
  read("mag_lo", p.mag_lo);
  read("mag_hi", p.mag_hi);
  read("cv_threshold", p.cv_threshold);
  return p;
}

// ---------------------------------------------------------------------------
// Metrics

inline json to_json(const IOIReport& r) {
  return {{"intervals", r.intervals}, {"mean", r.mean}, {"cv", r.cv}, {"rhythmic", r.rhythmic}};
}

inline json to_json(const LongStayReport& r) {
  json onsets = json::array(), notes = json::array();
  for (const auto& e : r.stays) {
    onsets.push_back(e.onset);
    notes.push_back(swar_name(e.note.name));
  }
  json out = {{"onsets", onsets}, {"notes", notes}};
  out["fit"] = r.fit ? json{{"slope", r.fit->slope}, {"intercept", r.fit->intercept}, {"r2", r.fit->r2}} : json(nullptr);
  return out;
}

inline json to_json(const PitchProfile& p) {
  json points = json::array();
  for (const auto& [t, m] : p.points) points.push_back({t, m});
  return {{"min_midi", p.min_midi}, {"max_midi", p.max_midi}, {"points", points}};
}

// ---------------------------------------------------------------------------
// Comparison

inline json to_json(const TableComparison& c, const std::string& name_a, const std::string& name_b) {
  return {{"labels", c.labels},
          {"names", {name_a, name_b}},
          {"counts_a", c.counts_a},
          {"counts_b", c.counts_b},
          {"relative_a", c.rel_a},
          {"relative_b", c.rel_b},
          {"deltas", c.deltas},
          {"total_variation", c.total_variation}};
}

// ---------------------------------------------------------------------------
// Generator config

inline json to_json(const GeneratorConfig& cfg) {
  json labels = json::array();
  for (const auto& k : cfg.labels) labels.push_back({{"note", swar_name(k.name)}, {"octave", k.octave}});
  return {{"labels", labels},
          {"probabilities", cfg.probabilities},
          {"drift", cfg.drift},
          {"stay_duration_mean", cfg.stay_duration_mean},
          {"stay_duration_jitter", cfg.stay_duration_jitter},
          {"glide_duration", cfg.glide_duration},
          {"f0_jitter_scale", cfg.f0_jitter_scale},
          {"sample_period", cfg.sample_period},
          {"seed", cfg.seed}};
}

inline NoteKey note_key_from_json(const json& j) {
  if (!j.is_object() || !j.contains("note") || !j["note"].is_string())
    throw InputError("generator config: label must be an object with a 'note' string");
  const auto name = parse_swar(j["note"].get<std::string>());
  if (!name) throw InputError("generator config: unknown note '" + j["note"].get<std::string>() + "'");
  return {*name, j.value("octave", 0)};
}

inline GeneratorConfig generator_config_from_json(const json& j, GeneratorConfig cfg = GeneratorConfig::pilu()) {
  try {
    if (j.contains("labels")) {
      cfg.labels.clear();
      for (const auto& l : j["labels"]) cfg.labels.push_back(note_key_from_json(l));
    }
    if (j.contains("probabilities")) cfg.probabilities = j["probabilities"].get<std::vector<double>>();
    if (j.contains("drift")) cfg.drift = j["drift"].get<std::vector<double>>();
    cfg.stay_duration_mean = j.value("stay_duration_mean", cfg.stay_duration_mean);
    cfg.stay_duration_jitter = j.value("stay_duration_jitter", cfg.stay_duration_jitter);
    cfg.glide_duration = j.value("glide_duration", cfg.glide_duration);
    cfg.f0_jitter_scale = j.value("f0_jitter_scale", cfg.f0_jitter_scale);
    cfg.sample_period = j.value("sample_period", cfg.sample_period);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw InputError(std::string("generator config: ") + e.what());
  }
  return cfg;
}

}  // namespace ragalab
