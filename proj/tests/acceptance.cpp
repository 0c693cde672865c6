// One line per acceptance criterion. Exit status is the number of failures.
#include <chrono>
#include <functional>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "properties.hpp"
#include "ragalab/cli.hpp"

using namespace ragalab;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] AC%d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

template <class F>
void guarded(int id, const char* name, F&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, false, std::string(name) + ": exception: " + e.what());
  }
}

std::vector<NoteEvent> pilu_events() {
  std::ifstream in(testdata::source_path("data/pilu_events.csv"));
  return parse_events_csv(in);
}

std::vector<double> expected_for(const std::vector<long long>& segment) {
  long long n = 0;
  for (const auto v : segment) n += v;
  return expected_counts(relative(testdata::pilu_table(testdata::kTable21)), n);
}

void ac1() {
  struct Row {
    const std::vector<long long>* obs;
    const char* pool;
    double want;
    int df;
  };
  const Row rows[] = {{&testdata::kTable22, "1;2;3;4-7", 3.941011, 3},
                      {&testdata::kTable23, "1;2;3;4;5;6;7", 5.707324, 6},
                      {&testdata::kTable24, "1;2;3;4-5;6-7", 4.615536, 4}};
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const auto res = chi_square_gof(testdata::as_doubles(*r.obs), expected_for(*r.obs), parse_pooling(r.pool, 7));
    ok = ok && near(res.statistic, r.want, 1e-4) && res.df == r.df;
    detail += fmt(" %.6f(df %g)", res.statistic, res.df);
  }
  report(1, ok, "chi-square statistics:" + detail);
}

void ac2() {
  const double a = chi_square_pvalue(7.81, 3), b = chi_square_pvalue(12.59, 6), c = chi_square_pvalue(9.49, 4);
  report(2, near(a, 0.05, 0.002) && near(b, 0.05, 0.002) && near(c, 0.05, 0.002),
         fmt("p-values %.5f %.5f %.5f", a, b, c));
}

void ac3() {
  const auto r = run_statistics(115, 57);
  const auto letters = run_test_letters("LLMLLLMMMM");
  const bool ok = r.expected_runs == 58.5 && near(r.z, -0.280987, 1e-4) && letters.runs == 4;
  report(3, ok, fmt("runs test E(U)=%.4f Z=%.6f U(LLMLLLMMMM)=%g", r.expected_runs, r.z,
                    static_cast<double>(letters.runs)));
}

void ac4() {
  const auto m = multinomial_moments(MultinomialModel::from_table(testdata::pilu_table(testdata::kTable21)));
  const double corr = m.correlation[2][6].value_or(0.0);
  const bool ok = near(m.variance[2], 17.16524, 1e-3) && near(m.variance[6], 14.48695, 1e-3) &&
                  near(m.covariance[2][6], -3.104351, 1e-3) && near(corr, -0.19686, 1e-3);
  report(4, ok,
         fmt("Var(Ga)=%.5f Var(Ni)=%.5f Cov=%.6f", m.variance[2], m.variance[6], m.covariance[2][6]) +
             fmt(" corr=%.5f", corr));
}

void ac5() {
  const auto events = pilu_events();
  const SegmentSpec span(0, 60);
  const auto ga = windowed_counts(events, Swar::KomalGa, 10, span);
  const auto ni = windowed_counts(events, Swar::SudhNi, 10, span);
  const bool ok = ga.counts == testdata::kGaWindows && ga.cumulative == testdata::kGaCumulative &&
                  ni.counts == testdata::kNiWindows && ni.cumulative == testdata::kNiCumulative;
  report(5, ok, "windowed and cumulative Komal Ga / Sudh Ni counts");
}

void ac6() {
  const auto r = stability_report(testdata::pilu_table(testdata::kTable21),
                                  {testdata::pilu_table(testdata::kTable22), testdata::pilu_table(testdata::kTable23),
                                   testdata::pilu_table(testdata::kTable24)});
  const bool ok = r.vadi == std::optional<std::string>("Komal Ga") &&
                  r.samvadi == std::optional<std::string>("Sudh Ni") && r.entries[2].score <= 0.02;
  report(6, ok,
         "vadi=" + r.vadi.value_or("-") + " samvadi=" + r.samvadi.value_or("-") +
             fmt(" Komal Ga score=%.6f", r.entries[2].score));
}

void ac7() {
  double worst = 0.0;
  bool totals = true;
  for (const auto& part : testdata::kYaman) {
    std::vector<long long> counts;
    for (const auto v : part.rel) counts.push_back(std::llround(v * static_cast<double>(part.n)));
    const FrequencyTable t(testdata::kYamanLabels, counts);
    totals = totals && t.total == part.n;
    const auto rel = relative(t);
    for (std::size_t i = 0; i < rel.size(); ++i) worst = std::max(worst, std::fabs(rel[i] - part.rel[i]));
  }
  const auto kir = relative(testdata::pilu_table(testdata::kTable41));
  for (std::size_t i = 0; i < kir.size(); ++i) worst = std::max(worst, std::fabs(kir[i] - testdata::kTable41Rel[i]));
  report(7, totals && worst <= 1e-5, fmt("Yaman and Kirwani relative frequencies, max error %.2e", worst));
}

void ac8() {
  const auto fit = fit_onsets_by_rank(testdata::kLongStayOnsets);
  const auto ioi = ioi_report(testdata::kLongStayOnsets);
  report(8, fit.r2 >= 0.95 && near(ioi.mean, 3.674, 0.01), fmt("long-stay R2=%.5f mean IOI=%.4f s", fit.r2, ioi.mean));
}

void ac9() {
  const auto a = to_midi(440.0);
  const double shift = to_midi(2 * 243.2661).midi_real - to_midi(243.2661).midi_real;
  const double sa = to_midi(testdata::spec_of(default_notedb(), Swar::Sa).mean_hz).midi_real;
  const bool ok = a.midi_real == 69.0 && a.midi_int == 69 && near(shift, 12.0, 1e-12) && near(sa, 58.7393, 1e-3);
  report(9, ok, fmt("440 Hz -> %.6f, octave shift %.12f, Sa -> %.4f", a.midi_real, shift, sa));
}

void ac10() {
  using clock = std::chrono::steady_clock;
  const std::pair<const char*, std::function<oracle::Check()>> suites[] = {
      {"pmf normalization", [] { return oracle::pmf_normalization(); }},
      {"covariance rows", [] { return oracle::covariance_rows_sum_to_zero(); }},
      {"auto_pool vs brute force", [] { return oracle::auto_pool_matches_brute_force(); }},
      {"detection round trip", [] { return oracle::synth_round_trip(1, 100, 200); }},
      {"contour vs rules oracle", [] { return oracle::contour_matches_rules(); }},
      {"rendered contour vs truth", [] { return oracle::rendered_contour_matches_truth(); }},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, fn] : suites) {
    const auto c = fn();
    ok = ok && c.ok;
    detail += std::string(" ") + name + (c.ok ? " ok" : " FAILED(" + c.detail + ")") + ";";
  }
  const auto t0 = clock::now();
  const auto mc = oracle::pvalue_vs_monte_carlo(200000);
  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  ok = ok && mc.ok && secs <= 60.0;
  detail += std::string(" monte carlo p-values ") + (mc.ok ? "ok" : "FAILED") + fmt(" in %.1f s", secs);
  report(10, ok, "property suites:" + detail + (mc.ok ? "" : " (" + mc.detail + ")"));
}

void ac11() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ragalab_acceptance";
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };
  std::ostringstream sink, err;
  const auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, err); };
  bool ok = run({"synth", "--seed", "1", "--n", "115", "--out", p("track.csv")}) == 0;
  ok = ok && run({"analyze", "--track", p("track.csv"), "--out", p("a.json")}) == 0;
  ok = ok && run({"analyze", "--track", p("track.csv"), "--out", p("b.json")}) == 0;
  const auto a = ok ? cli::read_file(p("a.json")) : std::string();
  const auto b = ok ? cli::read_file(p("b.json")) : std::string();
  ok = ok && !a.empty() && a == b;
  fs::remove_all(dir);
  report(11, ok, fmt("analyze twice gives byte-identical JSON (%g bytes)", static_cast<double>(a.size())) +
                     (err.str().empty() ? "" : " stderr: " + err.str()));
}

}  // namespace

int main() {
  guarded(1, "chi-square", ac1);
  guarded(2, "p-values", ac2);
  guarded(3, "runs test", ac3);
  guarded(4, "moments", ac4);
  guarded(5, "windowed counts", ac5);
  guarded(6, "stability", ac6);
  guarded(7, "relative frequencies", ac7);
  guarded(8, "long stays", ac8);
  guarded(9, "pitch formula", ac9);
  guarded(10, "property suites", ac10);
  guarded(11, "determinism", ac11);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
