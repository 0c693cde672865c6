#pragma once

// Shared fixtures for the unit and acceptance tests: reference table data,
// track builders and paths to the bundled data files.

#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ragalab/ragalab.hpp"

#ifndef RAGALAB_SOURCE_DIR
#define RAGALAB_SOURCE_DIR "."
#endif

namespace testdata {

inline std::string source_path(const std::string& rel) { return std::string(RAGALAB_SOURCE_DIR) + "/" + rel; }

inline const std::vector<std::string> kPiluLabels = {"Sa", "Sudh Re", "Komal Ga", "Sudh Ma", "Pa", "Komal Dha", "Sudh Ni"};

// Pilu tables, observed counts.
inline const std::vector<long long> kTable21 = {30, 22, 21, 8, 11, 6, 17};
inline const std::vector<long long> kTable22 = {16, 15, 10, 1, 3, 1, 9};
inline const std::vector<long long> kTable23 = {17, 8, 13, 6, 10, 6, 12};
inline const std::vector<long long> kTable24 = {14, 7, 11, 7, 8, 5, 8};

// Kirwani, same seven notes.
inline const std::vector<long long> kTable41 = {9, 11, 9, 8, 21, 16, 8};
inline const std::vector<double> kTable41Rel = {0.109756, 0.134146, 0.109756, 0.097561, 0.256098, 0.195122, 0.097561};

// Long-stay onsets, seconds.
inline const std::vector<double> kLongStayOnsets = {2.5,   8.62,  11.55, 12.93, 17.22, 19.74, 22.72, 25.17,
                                                    29.10, 32.95, 36.24, 42.11, 43.89, 49.44, 53.93};

// Komal Ga and Sudh Ni per 10 s window.
inline const std::vector<long long> kGaWindows = {4, 4, 2, 0, 10, 1};
inline const std::vector<long long> kGaCumulative = {4, 8, 10, 10, 20, 21};
inline const std::vector<long long> kNiWindows = {2, 2, 5, 4, 3, 1};
inline const std::vector<long long> kNiCumulative = {2, 4, 9, 13, 16, 17};

// Yaman relative frequencies (Sa, Re, Ga, Ma, Pa, Dha, Ni) for the whole
// minute and the three 30 s parts, with their totals.
struct YamanPart {
  long long n;
  std::array<double, 7> rel;
};
inline const std::array<YamanPart, 4> kYaman = {{
    {181, {0.220994, 0.149171, 0.127072, 0.066298, 0.044198, 0.088397, 0.303867}},
    {55, {0.181818, 0.163636, 0.181818, 0.109090, 0.072727, 0.072727, 0.218181}},
    {116, {0.241379, 0.146551, 0.129310, 0.060344, 0.034482, 0.077586, 0.310344}},
    {125, {0.240000, 0.144000, 0.104000, 0.048000, 0.032000, 0.096000, 0.336000}},
}};
inline const std::vector<std::string> kYamanLabels = {"Sa", "Sudh Re", "Sudh Ga", "Tibra Ma", "Pa", "Sudh Dha", "Sudh Ni"};

inline ragalab::FrequencyTable pilu_table(const std::vector<long long>& counts) {
  return ragalab::FrequencyTable(kPiluLabels, counts);
}

inline std::vector<double> as_doubles(const std::vector<long long>& v) { return {v.begin(), v.end()}; }

// n samples every dt seconds continuing the track.
inline void append_curve(std::vector<ragalab::PitchSample>& out, double dt, std::size_t n,
                         const std::function<double(std::size_t)>& f0_at) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(out.size()) * dt;
    out.push_back({t, f0_at(i)});
  }
}

inline void append_unvoiced(std::vector<ragalab::PitchSample>& out, double dt, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(out.size()) * dt;
    out.push_back({t, std::nullopt});
  }
}

inline double hz_from_semitones(double midi) { return 440.0 * std::pow(2.0, (midi - 69.0) / 12.0); }

inline const ragalab::NoteSpec& spec_of(const ragalab::NoteDatabase& db, ragalab::Swar s, int octave = 0) {
  return *db.find({s, octave});
}

}  // namespace testdata
