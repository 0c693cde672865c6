#pragma once

// Vadi/samvadi ranking by how fast a note's relative frequency settles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ragalab/error.hpp"
#include "ragalab/stats/frequency.hpp"

namespace ragalab {

struct StabilityEntry {
  std::string label;
  double overall_rel = 0.0;
  double score = 0.0;  // max relative deviation across segments; infinite when absent overall
  bool eligible = false;
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;  // table order
  std::vector<std::string> ranking;     // eligible labels, ascending score
  double eligibility_floor = 0.0;
  std::optional<std::string> vadi;
  std::optional<std::string> samvadi;
};

inline double default_eligibility_floor(std::size_t n_labels) {
  return n_labels == 0 ? 0.0 : 1.0 / (2.0 * static_cast<double>(n_labels));
}

// score(note) = max_seg |rel_seg - rel_overall| / rel_overall. The tonic and
// notes below the floor are never candidates. Fewer than two eligible notes
// leave the candidates unset.
inline StabilityReport stability_report(const FrequencyTable& overall, const std::vector<FrequencyTable>& segments,
                                        std::optional<double> eligibility_floor = std::nullopt,
                                        const std::string& tonic = "Sa") {
  if (segments.size() < 2) throw ValidationError("stability_report: need at least two segment tables");
  for (const auto& s : segments) require_same_labels(overall, s, "stability_report");

  StabilityReport report;
  report.eligibility_floor = eligibility_floor.value_or(default_eligibility_floor(overall.size()));
  const auto rel = relative(overall);
  std::vector<std::vector<double>> seg_rel;
  for (const auto& s : segments) seg_rel.push_back(s.total > 0 ? relative(s) : std::vector<double>(s.size(), 0.0));

  for (std::size_t i = 0; i < overall.size(); ++i) {
    StabilityEntry e;
    e.label = overall.labels[i];
    e.overall_rel = rel[i];
    double worst = 0.0;
    for (const auto& sr : seg_rel) worst = std::max(worst, std::fabs(sr[i] - rel[i]));
    if (rel[i] > 0.0) {
      e.score = worst / rel[i];
    } else {
      e.score = worst > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    e.eligible = rel[i] > 0.0 && rel[i] >= report.eligibility_floor && e.label != tonic && std::isfinite(e.score);
    report.entries.push_back(e);
  }

  std::vector<const StabilityEntry*> ranked;
  for (const auto& e : report.entries)
    if (e.eligible) ranked.push_back(&e);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const StabilityEntry* a, const StabilityEntry* b) { return a->score < b->score; });
  for (const auto* e : ranked) report.ranking.push_back(e->label);
  if (report.ranking.size() >= 2) {
    report.vadi = report.ranking[0];
    report.samvadi = report.ranking[1];
  }
  return report;
}

}  // namespace ragalab
