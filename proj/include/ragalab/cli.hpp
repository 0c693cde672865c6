#pragma once

// Command-line front end: detect, stats, contour, synth, compare, analyze,
// plotdata. Exit codes: 0 ok, 1 input error, 2 validation error,
// 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ragalab/report.hpp"

namespace ragalab::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kValidationError = 2, kNumericError = 3 };

inline constexpr const char* kNotedbEnv = "RAGALAB_NOTEDB";
inline constexpr const char* kBuiltinDb = "builtin:table1";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << content;
}

inline PitchTrack load_track(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    return parse_track(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline std::vector<NoteEvent> load_events(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    return parse_events_csv(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct LoadedDb {
  NoteDatabase db;
  std::string source;
};

// --notedb wins, then $RAGALAB_NOTEDB, then the bundled harmonium calibration.
inline LoadedDb load_db(const std::string& flag_path, double k) {
  std::string path = flag_path;
  if (path.empty())
    if (const char* env = std::getenv(kNotedbEnv); env && *env) path = env;
  if (path.empty()) return {default_notedb(k), kBuiltinDb};
  std::istringstream in(read_file(path));
  try {
    return {load_notedb(in, k), path};
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline constexpr std::string_view kCountsHeader = "note,count";

// Either an events CSV or a `note,count` table.
inline FrequencyTable load_table(const std::string& path) {
  const auto text = read_file(path);
  std::istringstream in(text);
  detail::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw InputError(path + ": empty file");
  if (detail::trim(line) == kEventsHeader) {
    std::istringstream again(text);
    return count_notes(parse_events_csv(again));
  }
  if (detail::trim(line) != kCountsHeader)
    throw InputError(path + ": expected header '" + std::string(kCountsHeader) + "' or an events CSV");
  std::vector<std::string> labels;
  std::vector<long long> counts;
  while (reader.next(line)) {
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, ',');
    const auto n = reader.number();
    if (cols.size() != 2) throw InputError(path + ": line " + std::to_string(n) + ": expected 2 columns");
    const auto name = parse_swar(cols[0]);
    const auto count = detail::parse_int(cols[1]);
    if (!name) throw InputError(path + ": line " + std::to_string(n) + ": unknown note");
    if (!count || *count < 0) throw InputError(path + ": line " + std::to_string(n) + ": count must be a non-negative integer");
    labels.emplace_back(swar_name(*name));
    counts.push_back(*count);
  }
  return FrequencyTable(std::move(labels), std::move(counts));
}

// Aligns two tables on the union of their labels in scale order.
inline std::pair<FrequencyTable, FrequencyTable> align_tables(const FrequencyTable& a, const FrequencyTable& b) {
  std::vector<Swar> names;
  for (const auto* t : {&a, &b})
    for (const auto& l : t->labels)
      if (const auto s = parse_swar(l); s && std::find(names.begin(), names.end(), *s) == names.end()) names.push_back(*s);
  std::sort(names.begin(), names.end(), [](Swar x, Swar y) { return scale_index(x) < scale_index(y); });
  std::vector<std::string> labels;
  for (const auto s : names) labels.emplace_back(swar_name(s));
  auto project = [&](const FrequencyTable& t) {
    std::vector<long long> c(labels.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (const auto idx = t.index_of(labels[i])) c[i] = t.counts[*idx];
    return FrequencyTable(labels, c);
  };
  return {project(a), project(b)};
}

inline std::vector<NoteKey> parse_sequence(const std::string& text) {
  std::vector<NoteKey> seq;
  for (const auto part : detail::split(text, ',')) {
    auto item = detail::trim(part);
    int octave = 0;
    if (const auto colon = item.find(':'); colon != std::string_view::npos) {
      const auto o = detail::parse_int(item.substr(colon + 1));
      if (!o || *o < -1 || *o > 1) throw InputError("sequence item '" + std::string(item) + "' has a bad octave");
      octave = static_cast<int>(*o);
      item = item.substr(0, colon);
    }
    const auto name = parse_swar(item);
    if (!name) throw InputError("sequence item '" + std::string(item) + "' is not a note name");
    seq.push_back({*name, octave});
  }
  return seq;
}

// ---------------------------------------------------------------------------

struct DetectArgs {
  std::string track, notedb, out;
  double k = NoteDatabase::kDefaultK;
  double min_dwell = kDefaultMinDwell;
};

inline int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  const auto track = load_track(a.track);
  const auto db = load_db(a.notedb, a.k);
  const auto det = detect(track, db.db, a.min_dwell);
  if (track.voiced_count() == 0) err << "warning: track has no voiced samples\n";
  const auto& d = det.diagnostics;
  err << "diagnostics: events=" << det.events.size() << " voiced=" << d.voiced << " unvoiced=" << d.unvoiced
      << " out_of_band=" << d.out_of_band << " glide_runs=" << d.glide_runs << " glide_samples=" << d.glide_samples
      << '\n';
  std::ostringstream csv;
  write_events_csv(csv, det.events);
  write_output(a.out, csv.str(), out);
  return kOk;
}

struct StatsArgs {
  std::string events, segments, out;
  std::vector<std::string> pools{"auto"};
  double window = 10.0;
  double min_expected = kDefaultMinExpected;
  std::optional<double> floor;
  std::string ties = "assign_l";
};

inline StatsOptions stats_options(const std::string& segments, const std::vector<std::string>& pools, double window,
                                  double min_expected, std::optional<double> floor, const std::string& ties) {
  StatsOptions opt;
  if (!segments.empty()) opt.segments = parse_segments(segments);
  opt.pools = pools.empty() ? std::vector<std::string>{"auto"} : pools;
  opt.window = window;
  opt.min_expected = min_expected;
  opt.eligibility_floor = floor;
  opt.tie_policy = parse_tie_policy(ties);
  return opt;
}

inline int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream&) {
  const auto events = load_events(a.events);
  const auto opt = stats_options(a.segments, a.pools, a.window, a.min_expected, a.floor, a.ties);
  json report = {{"schema_version", kSchemaVersion},
                 {"metadata", metadata_json(stats_parameters_json(opt, events), {{"events", a.events}})},
                 {"stats", build_stats(events, opt)}};
  write_output(a.out, canonical_dump(report), out);
  return kOk;
}

struct ContourArgs {
  std::string track, notedb, out, csv;
  double k = NoteDatabase::kDefaultK;
  double min_dwell = kDefaultMinDwell;
  ContourParams params;
};

inline int cmd_contour(const ContourArgs& a, std::ostream& out, std::ostream&) {
  a.params.validate();
  const auto track = load_track(a.track);
  const auto db = load_db(a.notedb, a.k);
  const auto segments = segment_contour(track, db.db, a.min_dwell, a.params);
  json params = to_json(a.params);
  params["k"] = a.k;
  params["min_dwell"] = a.min_dwell;
  json report = {{"schema_version", kSchemaVersion},
                 {"metadata", metadata_json(params, {{"track", a.track}, {"notedb", db.source}})},
                 {"contour", contour_json(segments)}};
  if (!a.csv.empty()) {
    std::ostringstream csv;
    write_contour_csv(csv, segments);
    write_output(a.csv, csv.str(), out);
  }
  write_output(a.out, canonical_dump(report), out);
  return kOk;
}

struct SynthArgs {
  std::string notedb, out, sidecar, config, sequence;
  double k = NoteDatabase::kDefaultK;
  std::uint64_t seed = 1;
  std::size_t n = 115;
  std::optional<double> stay_mean, stay_jitter, glide, jitter_scale, period;
};

inline int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  GeneratorConfig cfg = GeneratorConfig::pilu(a.seed);
  if (!a.config.empty()) {
    try {
      cfg = generator_config_from_json(json::parse(read_file(a.config)), cfg);
    } catch (const json::parse_error& e) {
      throw InputError(a.config + ": " + e.what());
    }
  }
  cfg.seed = a.seed;
  if (a.stay_mean) cfg.stay_duration_mean = *a.stay_mean;
  if (a.stay_jitter) cfg.stay_duration_jitter = *a.stay_jitter;
  if (a.glide) cfg.glide_duration = *a.glide;
  if (a.jitter_scale) cfg.f0_jitter_scale = *a.jitter_scale;
  if (a.period) cfg.sample_period = *a.period;
  cfg.validate();

  const auto db = load_db(a.notedb, a.k);
  const auto sequence = a.sequence.empty() ? generate_sequence(cfg, a.n) : parse_sequence(a.sequence);
  const auto perf = render(sequence, db.db, cfg);

  json seq = json::array(), stays = json::array();
  for (const auto& key : sequence) seq.push_back({{"note", swar_name(key.name)}, {"octave", key.octave}});
  for (const auto& s : perf.stays)
    stays.push_back({{"note", swar_name(s.note.name)}, {"octave", s.note.octave}, {"onset_sec", s.onset}, {"offset_sec", s.offset}});
  json sidecar = {{"schema_version", kSchemaVersion},
                  {"generator", kGeneratorId},
                  {"seed", cfg.seed},
                  {"notedb", db.source},
                  {"k", a.k},
                  {"config", to_json(cfg)},
                  {"sequence", seq},
                  {"stays", stays},
                  {"explicit_sequence", !a.sequence.empty()}};

  write_output(a.out, serialize_track(perf.track), out);
  std::string sidecar_path = a.sidecar;
  if (sidecar_path.empty() && !a.out.empty() && a.out != "-") sidecar_path = a.out + ".json";
  if (!sidecar_path.empty()) write_output(sidecar_path, canonical_dump(sidecar), out);
  return kOk;
}

struct CompareArgs {
  std::string a, b, name_a = "a", name_b = "b", out;
};

inline int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
  const auto [ta, tb] = align_tables(load_table(a.a), load_table(a.b));
  json report = {{"schema_version", kSchemaVersion},
                 {"metadata", metadata_json(json::object(), {{"a", a.a}, {"b", a.b}})},
                 {"compare", to_json(compare_tables(ta, tb), a.name_a, a.name_b)}};
  write_output(a.out, canonical_dump(report), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalysisConfig {
  double k = NoteDatabase::kDefaultK;
  double min_dwell = kDefaultMinDwell;
  double min_long = kDefaultMinLong;
  std::string segments;  // empty = default split
  std::vector<std::string> pools{"auto"};
  double window = 10.0;
  double min_expected = kDefaultMinExpected;
  std::optional<double> eligibility_floor;
  std::string tie_policy = "assign_l";
  ContourParams contour;

  json to_json() const {
    json j = {{"k", k},
              {"min_dwell", min_dwell},
              {"min_long", min_long},
              {"segments", segments.empty() ? json("default") : json(segments)},
              {"pool", pools},
              {"window", window},
              {"min_expected", min_expected},
              {"tie_policy", tie_policy},
              {"contour", ragalab::to_json(contour)}};
    j["eligibility_floor"] = eligibility_floor ? json(*eligibility_floor) : json("default");
    return j;
  }

  static AnalysisConfig from_json(const json& j) {
    AnalysisConfig c;
    try {
      c.k = j.value("k", c.k);
      c.min_dwell = j.value("min_dwell", c.min_dwell);
      c.min_long = j.value("min_long", c.min_long);
      c.segments = j.value("segments", c.segments);
      if (j.contains("pool")) {
        c.pools = j["pool"].is_string() ? std::vector<std::string>{j["pool"].get<std::string>()}
                                        : j["pool"].get<std::vector<std::string>>();
      }
      c.window = j.value("window", c.window);
      c.min_expected = j.value("min_expected", c.min_expected);
      if (j.contains("eligibility_floor") && j["eligibility_floor"].is_number())
        c.eligibility_floor = j["eligibility_floor"].get<double>();
      c.tie_policy = j.value("tie_policy", c.tie_policy);
      if (j.contains("contour")) c.contour = contour_params_from_json(j["contour"]);
    } catch (const json::exception& e) {
      throw InputError(std::string("analysis config: ") + e.what());
    }
    return c;
  }
};

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, int code, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const noexcept { return stage_; }
  int code() const noexcept { return code_; }

 private:
  std::string stage_;
  int code_;
};

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw StageError(stage, kInputError, e.what());
  } catch (const ValidationError& e) {
    throw StageError(stage, kValidationError, e.what());
  } catch (const NumericError& e) {
    throw StageError(stage, kNumericError, e.what());
  }
}

struct AnalyzeArgs {
  std::string track, notedb, out, config;
  AnalysisConfig cfg;
};

inline json analyze_report(const std::string& track_path, const std::string& notedb_path, const AnalysisConfig& cfg) {
  const auto track = run_stage("ingest", [&] { return load_track(track_path); });
  const auto db = run_stage("detect", [&] { return load_db(notedb_path, cfg.k); });
  const auto det = run_stage("detect", [&] { return detect(track, db.db, cfg.min_dwell); });

  json stats = nullptr;
  if (!det.events.empty()) {
    stats = run_stage("stats", [&] {
      const auto opt = stats_options(cfg.segments, cfg.pools, cfg.window, cfg.min_expected, cfg.eligibility_floor,
                                     cfg.tie_policy);
      return build_stats(det.events, opt);
    });
  }
  const auto contour = run_stage("contour", [&] {
    cfg.contour.validate();
    return contour_json(segment_contour(track, db.db, cfg.min_dwell, cfg.contour));
  });
  const auto metrics = run_stage("metrics", [&] {
    json m;
    m["pitch_profile"] = track.voiced_count() > 0 ? to_json(pitch_profile(track)) : json(nullptr);
    m["ioi"] = det.events.size() >= 2 ? to_json(ioi_report(det.events, cfg.contour.cv_threshold)) : json(nullptr);
    m["long_stays"] = to_json(long_stays(det.events, cfg.min_long));
    return m;
  });

  return {{"schema_version", kSchemaVersion},
          {"metadata", metadata_json(cfg.to_json(), {{"track", track_path}, {"notedb", db.source}})},
          {"detection", detection_json(det)},
          {"stats", stats},
          {"contour", contour},
          {"metrics", metrics}};
}

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const auto report = analyze_report(a.track, a.notedb, a.cfg);
    write_output(a.out, canonical_dump(report), out);
  } catch (const StageError& e) {
    err << "error: stage " << e.stage() << ": " << e.what() << '\n';
    return e.code();
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// plotdata

struct PlotArgs {
  std::string report, which, note, out;
};

inline const json& require(const json& j, std::initializer_list<const char*> path, const std::string& which) {
  const json* cur = &j;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key) || (*cur)[key].is_null())
      throw InputError("plotdata " + which + ": report has no '" + key + "' section");
    cur = &(*cur)[key];
  }
  return *cur;
}

inline std::string plot_csv(const json& report, const std::string& which, const std::string& note) {
  std::ostringstream csv;
  auto num = [](const json& v) { return v.is_null() ? std::string() : detail::format_g(v.get<double>(), 6); };
  if (which == "onsets") {
    const auto& events = require(report, {"detection", "events"}, which);
    csv << "index,onset_sec\n";
    std::size_t i = 0;
    for (const auto& e : events) csv << ++i << ',' << num(e["onset_sec"]) << '\n';
  } else if (which == "ioi") {
    const auto& intervals = require(report, {"metrics", "ioi", "intervals"}, which);
    csv << "index,interval_sec\n";
    std::size_t i = 0;
    for (const auto& v : intervals) csv << ++i << ',' << num(v) << '\n';
  } else if (which == "pitch_profile") {
    const auto& points = require(report, {"metrics", "pitch_profile", "points"}, which);
    csv << "time_sec,midi\n";
    for (const auto& p : points) csv << num(p[0]) << ',' << num(p[1]) << '\n';
  } else if (which == "note_frequencies" || which == "cumulative") {
    const auto& series = require(report, {"stats", "windowed", "series"}, which);
    std::vector<const json*> chosen;
    for (const auto& s : series)
      if (note.empty() || s["label"] == note) chosen.push_back(&s);
    if (chosen.empty()) throw InputError("plotdata " + which + ": no windowed series" + (note.empty() ? "" : " for '" + note + "'"));
    const char* field = which == "cumulative" ? "cumulative" : "counts";
    csv << "window_end";
    for (const auto* s : chosen) csv << ',' << (*s)["label"].get<std::string>();
    csv << '\n';
    const auto& ends = (*chosen.front())["window_end"];
    for (std::size_t i = 0; i < ends.size(); ++i) {
      csv << num(ends[i]);
      for (const auto* s : chosen) csv << ',' << (*s)[field][i].get<long long>();
      csv << '\n';
    }
  } else if (which == "compare_bars") {
    const auto& cmp = require(report, {"compare"}, which);
    csv << "label," << cmp["names"][0].get<std::string>() << ',' << cmp["names"][1].get<std::string>() << '\n';
    for (std::size_t i = 0; i < cmp["labels"].size(); ++i)
      csv << cmp["labels"][i].get<std::string>() << ',' << cmp["counts_a"][i].get<long long>() << ','
          << cmp["counts_b"][i].get<long long>() << '\n';
  } else {
    throw InputError("plotdata: unknown series '" + which + "'");
  }
  return csv.str();
}

inline int cmd_plotdata(const PlotArgs& a, std::ostream& out, std::ostream&) {
  json report;
  try {
    report = json::parse(read_file(a.report));
  } catch (const json::parse_error& e) {
    throw InputError(a.report + ": " + e.what());
  }
  write_output(a.out, plot_csv(report, a.which, a.note), out);
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical analysis of raga performance pitch tracks", "ragalab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  int code = kOk;
  std::function<int()> action;

  auto add_db_flags = [](CLI::App* sub, std::string& notedb, double& k) {
    sub->add_option("--notedb", notedb, std::string("Note database CSV (default: $") + kNotedbEnv + " or bundled calibration)");
    sub->add_option("--k", k, "Chebyshev sigma multiplier")->capture_default_str();
  };

  DetectArgs detect_args;
  auto* detect_cmd = app.add_subcommand("detect", "Detect note events in a pitch track");
  detect_cmd->add_option("--track", detect_args.track, "Pitch-track CSV")->required();
  add_db_flags(detect_cmd, detect_args.notedb, detect_args.k);
  detect_cmd->add_option("--min-dwell", detect_args.min_dwell, "Minimum stay in seconds")->capture_default_str();
  detect_cmd->add_option("--out", detect_args.out, "Events CSV output (default stdout)");
  detect_cmd->callback([&] { action = [&] { return cmd_detect(detect_args, out, err); }; });

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Frequency tables, chi-square, runs test, stability ranking");
  stats_cmd->add_option("--events", stats_args.events, "Events CSV")->required();
  stats_cmd->add_option("--segments", stats_args.segments, "Segments start:end[,start:end...]");
  stats_cmd->add_option("--pool", stats_args.pools, "'auto' or block list like 1;2;3;4-7 (repeat per segment)");
  stats_cmd->add_option("--window", stats_args.window, "Window for windowed counts, seconds")->capture_default_str();
  stats_cmd->add_option("--min-expected", stats_args.min_expected, "Pooling floor")->capture_default_str();
  stats_cmd->add_option("--floor", stats_args.floor, "Stability eligibility floor (default 1/(2k))");
  stats_cmd->add_option("--ties", stats_args.ties, "Runs-test ties: assign_l, assign_m, drop")->capture_default_str();
  stats_cmd->add_option("--out", stats_args.out, "JSON output (default stdout)");
  stats_cmd->callback([&] { action = [&] { return cmd_stats(stats_args, out, err); }; });

  ContourArgs contour_args;
  auto add_contour_flags = [](CLI::App* sub, ContourParams& p) {
    sub->add_option("--reversal-threshold", p.reversal_threshold)->capture_default_str();
    sub->add_option("--return-tolerance", p.return_tolerance)->capture_default_str();
    sub->add_option("--linear-tolerance", p.linear_tolerance)->capture_default_str();
    sub->add_option("--skew-tolerance", p.skew_tolerance)->capture_default_str();
    sub->add_option("--mag-lo", p.mag_lo)->capture_default_str();
    sub->add_option("--mag-hi", p.mag_hi)->capture_default_str();
    sub->add_option("--cv-threshold", p.cv_threshold)->capture_default_str();
  };
  auto* contour_cmd = app.add_subcommand("contour", "Classify contour segments between stays");
  contour_cmd->add_option("--track", contour_args.track, "Pitch-track CSV")->required();
  add_db_flags(contour_cmd, contour_args.notedb, contour_args.k);
  contour_cmd->add_option("--min-dwell", contour_args.min_dwell)->capture_default_str();
  add_contour_flags(contour_cmd, contour_args.params);
  contour_cmd->add_option("--out", contour_args.out, "Summary JSON output (default stdout)");
  contour_cmd->add_option("--csv", contour_args.csv, "Segments CSV output");
  contour_cmd->callback([&] { action = [&] { return cmd_contour(contour_args, out, err); }; });

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Render a seeded synthetic performance");
  add_db_flags(synth_cmd, synth_args.notedb, synth_args.k);
  synth_cmd->add_option("--seed", synth_args.seed)->capture_default_str();
  synth_cmd->add_option("--n", synth_args.n, "Number of notes to draw")->capture_default_str();
  synth_cmd->add_option("--sequence", synth_args.sequence, "Explicit notes, e.g. 'Sa,Sudh Re,Komal Ga:1'");
  synth_cmd->add_option("--config", synth_args.config, "Generator config JSON");
  synth_cmd->add_option("--stay-mean", synth_args.stay_mean);
  synth_cmd->add_option("--stay-jitter", synth_args.stay_jitter);
  synth_cmd->add_option("--glide", synth_args.glide);
  synth_cmd->add_option("--jitter-scale", synth_args.jitter_scale);
  synth_cmd->add_option("--period", synth_args.period);
  synth_cmd->add_option("--out", synth_args.out, "Track CSV output (default stdout)");
  synth_cmd->add_option("--sidecar", synth_args.sidecar, "Truth JSON (default <out>.json)");
  synth_cmd->callback([&] { action = [&] { return cmd_synth(synth_args, out, err); }; });

  CompareArgs compare_args;
  auto* compare_cmd = app.add_subcommand("compare", "Compare two frequency tables");
  compare_cmd->add_option("--a", compare_args.a, "Events CSV or note,count CSV")->required();
  compare_cmd->add_option("--b", compare_args.b, "Events CSV or note,count CSV")->required();
  compare_cmd->add_option("--name-a", compare_args.name_a)->capture_default_str();
  compare_cmd->add_option("--name-b", compare_args.name_b)->capture_default_str();
  compare_cmd->add_option("--out", compare_args.out);
  compare_cmd->callback([&] { action = [&] { return cmd_compare(compare_args, out, err); }; });

  AnalyzeArgs analyze_args;
  AnalysisConfig& acfg = analyze_args.cfg;
  auto* analyze_cmd = app.add_subcommand("analyze", "Full pipeline report");
  analyze_cmd->add_option("--track", analyze_args.track)->required();
  analyze_cmd->add_option("--notedb", analyze_args.notedb);
  analyze_cmd->add_option("--config", analyze_args.config, "Analysis config JSON");
  auto* a_k = analyze_cmd->add_option("--k", acfg.k);
  auto* a_dwell = analyze_cmd->add_option("--min-dwell", acfg.min_dwell);
  auto* a_segments = analyze_cmd->add_option("--segments", acfg.segments);
  auto* a_pool = analyze_cmd->add_option("--pool", acfg.pools);
  analyze_cmd->add_option("--out", analyze_args.out);
  analyze_cmd->callback([&] {
    action = [&, a_k, a_dwell, a_segments, a_pool] {
      if (!analyze_args.config.empty()) {
        // config file first, explicit flags on top
        const AnalysisConfig flags = acfg;
        json cj;
        try {
          cj = json::parse(read_file(analyze_args.config));
        } catch (const json::parse_error& e) {
          err << "error: stage config: " << e.what() << '\n';
          return static_cast<int>(kInputError);
        } catch (const InputError& e) {
          err << "error: stage config: " << e.what() << '\n';
          return static_cast<int>(kInputError);
        }
        try {
          acfg = AnalysisConfig::from_json(cj);
        } catch (const InputError& e) {
          err << "error: stage config: " << e.what() << '\n';
          return static_cast<int>(kInputError);
        }
        if (a_k->count()) acfg.k = flags.k;
        if (a_dwell->count()) acfg.min_dwell = flags.min_dwell;
        if (a_segments->count()) acfg.segments = flags.segments;
        if (a_pool->count()) acfg.pools = flags.pools;
      }
      return cmd_analyze(analyze_args, out, err);
    };
  });

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plotdata", "Emit CSV series behind a figure");
  plot_cmd->add_option("--report", plot_args.report, "Report JSON from analyze/stats/compare")->required();
  plot_cmd->add_option("--which", plot_args.which)
      ->required()
      ->check(CLI::IsMember({"onsets", "ioi", "pitch_profile", "note_frequencies", "cumulative", "compare_bars"}));
  plot_cmd->add_option("--note", plot_args.note, "Restrict windowed series to one note");
  plot_cmd->add_option("--out", plot_args.out);
  plot_cmd->callback([&] { action = [&] { return cmd_plotdata(plot_args, out, err); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    code = action ? action() : kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    code = kInputError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    code = kValidationError;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    code = kNumericError;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    code = kNumericError;
  }
  return code;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"ragalab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ragalab::cli
