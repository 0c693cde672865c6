#pragma once

// Note calibration database, Chebyshev bands, and note-event detection.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ragalab/error.hpp"
#include "ragalab/pitchdata.hpp"

namespace ragalab {

// The twelve chromatic swar, in scale order starting at the tonic.
enum class Swar {
  Sa,
  KomalRe,
  SudhRe,
  KomalGa,
  SudhGa,
  SudhMa,
  TibraMa,
  Pa,
  KomalDha,
  SudhDha,
  KomalNi,
  SudhNi,
};

inline constexpr std::array<std::string_view, 12> kSwarNames = {
    "Sa",      "Komal Re", "Sudh Re",   "Komal Ga", "Sudh Ga",  "Sudh Ma",
    "Tibra Ma", "Pa",      "Komal Dha", "Sudh Dha", "Komal Ni", "Sudh Ni",
};

inline constexpr int scale_index(Swar s) noexcept { return static_cast<int>(s); }

inline std::string_view swar_name(Swar s) noexcept { return kSwarNames[static_cast<std::size_t>(s)]; }

inline std::optional<Swar> parse_swar(std::string_view name) {
  name = detail::trim(name);
  for (std::size_t i = 0; i < kSwarNames.size(); ++i) {
    const auto candidate = kSwarNames[i];
    if (candidate.size() != name.size()) continue;
    bool same = true;
    for (std::size_t j = 0; j < name.size() && same; ++j)
      same = std::tolower(static_cast<unsigned char>(candidate[j])) ==
             std::tolower(static_cast<unsigned char>(name[j]));
    if (same) return static_cast<Swar>(i);
  }
  return std::nullopt;
}

// Identifies a note in a register: octave -1 (lower), 0 (middle), +1 (upper).
struct NoteKey {
  Swar name = Swar::Sa;
  int octave = 0;

  friend bool operator==(const NoteKey&, const NoteKey&) = default;
};

struct NoteSpec {
  Swar name = Swar::Sa;
  int octave = 0;
  double mean_hz = 0.0;
  double sd_hz = 0.0;

  NoteKey key() const noexcept { return {name, octave}; }
};

struct ChebyshevBand {
  double lo = 0.0;
  double hi = 0.0;
  double min_prob = 0.0;  // Chebyshev lower bound 1 - 1/k^2

  bool contains(double f0) const noexcept { return lo <= f0 && f0 <= hi; }
};

inline ChebyshevBand band(const NoteSpec& spec, double k) {
  if (!(k > 0.0)) throw ValidationError("band: k must be positive");
  return {spec.mean_hz - k * spec.sd_hz, spec.mean_hz + k * spec.sd_hz, 1.0 - 1.0 / (k * k)};
}

// Harmonium calibration, middle octave, Sa at natural C.
inline std::vector<NoteSpec> table1_middle_octave() {
  return {
      {Swar::Sa, 0, 243.2661, 0.4485},       {Swar::KomalRe, 0, 257.6023, 0.1556},
      {Swar::SudhRe, 0, 272.3826, 0.0503},   {Swar::KomalGa, 0, 287.6051, 0.2155},
      {Swar::SudhGa, 0, 305.2415, 0.1805},   {Swar::SudhMa, 0, 323.1398, 0.3172},
      {Swar::TibraMa, 0, 342.2261, 0.2205},  {Swar::Pa, 0, 362.4957, 0.4241},
      {Swar::KomalDha, 0, 384.4443, 0.1316}, {Swar::SudhDha, 0, 407.6329, 0.2227},
      {Swar::KomalNi, 0, 432.5978, 0.1387},  {Swar::SudhNi, 0, 457.4805, 0.3030},
  };
}

// A validated set of note specs with pairwise-disjoint k-sigma bands.
// The only way to obtain one is through create(), so every instance is valid.
class NoteDatabase {
 public:
  static constexpr double kDefaultK = 6.0;

  static NoteDatabase create(std::vector<NoteSpec> specs, double k = kDefaultK) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("note database: k must be positive");
    for (const auto& s : specs) {
      const std::string label = std::string(swar_name(s.name)) + " (octave " + std::to_string(s.octave) + ")";
      if (s.octave < -1 || s.octave > 1) throw ValidationError(label + ": octave must be -1, 0 or 1");
      if (!(s.mean_hz > 0.0)) throw ValidationError(label + ": mean_hz must be positive");
      if (!(s.sd_hz >= 0.0)) throw ValidationError(label + ": sd_hz must be non-negative");
    }
    std::sort(specs.begin(), specs.end(),
              [](const NoteSpec& a, const NoteSpec& b) { return a.mean_hz < b.mean_hz; });
    for (std::size_t i = 0; i < specs.size(); ++i)
      for (std::size_t j = i + 1; j < specs.size(); ++j)
        if (specs[i].key() == specs[j].key())
          throw ValidationError("note database: duplicate entry for " + std::string(swar_name(specs[i].name)) +
                                " octave " + std::to_string(specs[i].octave));

    NoteDatabase db;
    db.k_ = k;
    db.specs_ = std::move(specs);
    for (const auto& s : db.specs_) db.bands_.push_back(band(s, k));
    for (std::size_t i = 1; i < db.bands_.size(); ++i) {
      if (!(db.bands_[i - 1].hi < db.bands_[i].lo)) {
        const auto& a = db.specs_[i - 1];
        const auto& b = db.specs_[i];
        throw ValidationError("note database: bands overlap for " + std::string(swar_name(a.name)) + " (octave " +
                              std::to_string(a.octave) + ") and " + std::string(swar_name(b.name)) + " (octave " +
                              std::to_string(b.octave) + ") at k = " + detail::format_g(k, 6));
      }
    }
    return db;
  }

  double k() const noexcept { return k_; }
  const std::vector<NoteSpec>& specs() const noexcept { return specs_; }
  const std::vector<ChebyshevBand>& bands() const noexcept { return bands_; }
  std::size_t size() const noexcept { return specs_.size(); }
  bool empty() const noexcept { return specs_.empty(); }

  // Index of the unique spec whose band contains f0, if any.
  std::optional<std::size_t> classify_index(double f0) const {
    // bands are sorted and disjoint: last band with lo <= f0 is the only candidate
    auto it = std::upper_bound(bands_.begin(), bands_.end(), f0,
                               [](double v, const ChebyshevBand& b) { return v < b.lo; });
    if (it == bands_.begin()) return std::nullopt;
    --it;
    if (!it->contains(f0)) return std::nullopt;
    return static_cast<std::size_t>(it - bands_.begin());
  }

  const NoteSpec* find(NoteKey key) const noexcept {
    for (const auto& s : specs_)
      if (s.key() == key) return &s;
    return nullptr;
  }

 private:
  NoteDatabase() = default;

  double k_ = kDefaultK;
  std::vector<NoteSpec> specs_;
  std::vector<ChebyshevBand> bands_;
};

// Derives the lower and upper octaves by halving and doubling the middle
// means; the middle-octave sd is kept for all three registers.
inline NoteDatabase expand_octaves(const std::vector<NoteSpec>& middle, double k = NoteDatabase::kDefaultK) {
  std::vector<NoteSpec> all;
  all.reserve(middle.size() * 3);
  for (const auto& s : middle) {
    if (s.octave != 0) throw ValidationError("expand_octaves: input must contain middle-octave specs only");
    for (const auto& other : all)
      if (other.octave == 0 && other.name == s.name)
        throw ValidationError("expand_octaves: duplicate note " + std::string(swar_name(s.name)));
    all.push_back(s);
  }
  const std::size_t n = all.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = all[i];
    all.push_back({s.name, -1, s.mean_hz / 2.0, s.sd_hz});
    all.push_back({s.name, +1, s.mean_hz * 2.0, s.sd_hz});
  }
  return NoteDatabase::create(std::move(all), k);
}

inline const NoteSpec* classify_sample(double f0, const NoteDatabase& db) {
  const auto idx = db.classify_index(f0);
  return idx ? &db.specs()[*idx] : nullptr;
}

inline constexpr std::string_view kNoteDbHeader = "note,octave,mean_hz,sd_hz";

inline std::vector<NoteSpec> parse_notedb_rows(std::istream& in) {
  detail::LineReader reader(in);
  std::string line;
  if (!reader.next(line) || detail::trim(line) != kNoteDbHeader)
    throw InputError(1, "expected header '" + std::string(kNoteDbHeader) + "'");
  std::vector<NoteSpec> rows;
  while (reader.next(line)) {
    const auto n = reader.number();
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != 4) throw InputError(n, "expected 4 columns, got " + std::to_string(cols.size()));
    const auto name = parse_swar(cols[0]);
    if (!name) throw InputError(n, "unknown note name '" + std::string(detail::trim(cols[0])) + "'");
    const auto octave = detail::parse_int(cols[1]);
    const auto mean = detail::parse_double(cols[2]);
    const auto sd = detail::parse_double(cols[3]);
    if (!octave || !mean || !sd) throw InputError(n, "non-numeric field");
    if (*octave < -1 || *octave > 1) throw InputError(n, "octave must be -1, 0 or 1");
    rows.push_back({*name, static_cast<int>(*octave), *mean, *sd});
  }
  return rows;
}

// Loads a database file. A file holding only middle-octave rows is expanded
// to three octaves; otherwise the rows are taken as given.
inline NoteDatabase load_notedb(std::istream& in, double k = NoteDatabase::kDefaultK) {
  auto rows = parse_notedb_rows(in);
  const bool middle_only =
      std::all_of(rows.begin(), rows.end(), [](const NoteSpec& s) { return s.octave == 0; });
  return middle_only ? expand_octaves(rows, k) : NoteDatabase::create(std::move(rows), k);
}

inline NoteDatabase default_notedb(double k = NoteDatabase::kDefaultK) {
  return expand_octaves(table1_middle_octave(), k);
}

// ---------------------------------------------------------------------------
// Detection

struct NoteEvent {
  NoteKey note;
  double onset = 0.0;   // time of the first sample in the run
  double offset = 0.0;  // time of the last sample in the run
  std::size_t n_samples = 0;

  double duration() const noexcept { return offset - onset; }
};

struct DetectionDiagnostics {
  std::size_t voiced = 0;
  std::size_t unvoiced = 0;
  std::size_t out_of_band = 0;   // voiced samples outside every band
  std::size_t glide_runs = 0;    // in-band runs shorter than min_dwell
  std::size_t glide_samples = 0;
};

struct Detection {
  std::vector<NoteEvent> events;
  DetectionDiagnostics diagnostics;
};

inline constexpr double kDefaultMinDwell = 0.10;
inline constexpr double kDefaultMinLong = 1.0;

// A maximal run of consecutive voiced samples classified to one note becomes
// an event if it spans at least min_dwell seconds; shorter runs are glides.
inline Detection detect(const PitchTrack& track, const NoteDatabase& db, double min_dwell = kDefaultMinDwell) {
  if (!(min_dwell > 0.0)) throw ValidationError("detect_events: min_dwell must be positive");
  constexpr double kSlack = 1e-9;
  Detection out;
  const auto& samples = track.samples();

  std::optional<std::size_t> run_note;
  std::size_t run_begin = 0, run_end = 0;  // [begin, end) sample indices
  auto close_run = [&] {
    if (!run_note) return;
    const double onset = samples[run_begin].t;
    const double offset = samples[run_end - 1].t;
    if (offset - onset >= min_dwell - kSlack) {
      out.events.push_back({db.specs()[*run_note].key(), onset, offset, run_end - run_begin});
    } else {
      ++out.diagnostics.glide_runs;
      out.diagnostics.glide_samples += run_end - run_begin;
    }
    run_note.reset();
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.voiced()) {
      ++out.diagnostics.unvoiced;
      close_run();
      continue;
    }
    ++out.diagnostics.voiced;
    const auto idx = db.classify_index(*s.f0);
    if (!idx) {
      ++out.diagnostics.out_of_band;
      close_run();
      continue;
    }
    if (run_note && *run_note == *idx) {
      run_end = i + 1;
      continue;
    }
    close_run();
    run_note = idx;
    run_begin = i;
    run_end = i + 1;
  }
  close_run();
  return out;
}

inline std::vector<NoteEvent> detect_events(const PitchTrack& track, const NoteDatabase& db,
                                            double min_dwell = kDefaultMinDwell) {
  return detect(track, db, min_dwell).events;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct LongStayReport {
  std::vector<NoteEvent> stays;
  std::optional<LinearFit> fit;  // onset against rank 1..m; absent when m < 2
};

inline LinearFit fit_onsets_by_rank(const std::vector<double>& onsets) {
  const double m = static_cast<double>(onsets.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    mx += static_cast<double>(i + 1);
    my += onsets[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    const double dx = static_cast<double>(i + 1) - mx;
    const double dy = onsets[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    const double r = onsets[i] - (fit.intercept + fit.slope * static_cast<double>(i + 1));
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

inline LongStayReport long_stays(const std::vector<NoteEvent>& events, double min_long = kDefaultMinLong) {
  if (!(min_long > 0.0)) throw ValidationError("long_stays: min_long must be positive");
  LongStayReport report;
  for (const auto& e : events)
    if (e.duration() >= min_long - 1e-9) report.stays.push_back(e);
  if (report.stays.size() >= 2) {
    std::vector<double> onsets;
    for (const auto& e : report.stays) onsets.push_back(e.onset);
    report.fit = fit_onsets_by_rank(onsets);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Events CSV: note,octave,onset_sec,offset_sec,n_samples

inline constexpr std::string_view kEventsHeader = "note,octave,onset_sec,offset_sec,n_samples";

inline void write_events_csv(std::ostream& out, const std::vector<NoteEvent>& events) {
  out << kEventsHeader << '\n';
  for (const auto& e : events)
    out << swar_name(e.note.name) << ',' << e.note.octave << ',' << detail::format_exact(e.onset) << ','
        << detail::format_exact(e.offset) << ',' << e.n_samples << '\n';
}

inline std::vector<NoteEvent> parse_events_csv(std::istream& in) {
  detail::LineReader reader(in);
  std::string line;
  if (!reader.next(line) || detail::trim(line) != kEventsHeader)
    throw InputError(1, "expected header '" + std::string(kEventsHeader) + "'");
  std::vector<NoteEvent> events;
  while (reader.next(line)) {
    const auto n = reader.number();
    if (detail::trim(line).empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != 5) throw InputError(n, "expected 5 columns, got " + std::to_string(cols.size()));
    const auto name = parse_swar(cols[0]);
    if (!name) throw InputError(n, "unknown note name '" + std::string(detail::trim(cols[0])) + "'");
    const auto octave = detail::parse_int(cols[1]);
    const auto onset = detail::parse_double(cols[2]);
    const auto offset = detail::parse_double(cols[3]);
    const auto count = detail::parse_int(cols[4]);
    if (!octave || !onset || !offset || !count) throw InputError(n, "non-numeric field");
    if (*octave < -1 || *octave > 1) throw InputError(n, "octave must be -1, 0 or 1");
    if (!(*offset > *onset) || *onset < 0.0) throw InputError(n, "event must satisfy 0 <= onset < offset");
    if (*count < 1) throw InputError(n, "n_samples must be at least 1");
    if (!events.empty() && *onset < events.back().offset) throw InputError(n, "events overlap or are out of order");
    events.push_back({{*name, static_cast<int>(*octave)}, *onset, *offset, static_cast<std::size_t>(*count)});
  }
  return events;
}

}  // namespace ragalab
