#pragma once

// Seeded multinomial / quasi-multinomial note sequences and their rendering
// into jittered pitch tracks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ragalab/error.hpp"
#include "ragalab/notedetect.hpp"
#include "ragalab/pitchdata.hpp"

namespace ragalab {

// Identifies the random algorithms below. Bitwise fixtures are only valid
// for this identifier.
inline constexpr std::string_view kGeneratorId = "mt19937_64/u53/box-muller";

// std::mt19937_64 output is fixed by the standard; uniforms take the top 53
// bits and normals come from Box-Muller, so streams are reproducible across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Index drawn by inverse CDF over probabilities summing to 1.
  std::size_t categorical(const std::vector<double>& p) {
    const double u = uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      cumulative += p[i];
      last_positive = i;
      if (u < cumulative) return i;
    }
    return last_positive;  // rounding left u above the final cumulative sum
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct GeneratorConfig {
  std::vector<NoteKey> labels;
  std::vector<double> probabilities;
  std::vector<double> drift;  // per-trial additive drift; empty or all zero = multinomial
  double stay_duration_mean = 0.4;
  double stay_duration_jitter = 0.1;
  double glide_duration = 0.05;
  double f0_jitter_scale = 1.0;
  double sample_period = 0.01;
  std::uint64_t seed = 1;

  bool drifting() const {
    for (const auto d : drift)
      if (d != 0.0) return true;
    return false;
  }

  void validate() const {
    if (labels.empty() || labels.size() != probabilities.size())
      throw ValidationError("generator: labels and probabilities must be non-empty and of equal length");
    if (!drift.empty() && drift.size() != labels.size())
      throw ValidationError("generator: drift must match the number of labels");
    double sum = 0.0;
    for (const auto p : probabilities) {
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("generator: probabilities must lie in [0, 1]");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw ValidationError("generator: probabilities must sum to 1");
    for (const auto d : drift)
      if (!std::isfinite(d)) throw ValidationError("generator: drift must be finite");
    if (!(sample_period >= 1e-6)) throw ValidationError("generator: sample_period must be at least 1e-6 s");
    if (!(stay_duration_jitter >= 0.0) || !(stay_duration_mean > stay_duration_jitter))
      throw ValidationError("generator: need stay_duration_mean > stay_duration_jitter >= 0");
    if (!(glide_duration >= 0.0)) throw ValidationError("generator: glide_duration must be non-negative");
    if (!(f0_jitter_scale >= 0.0)) throw ValidationError("generator: f0_jitter_scale must be non-negative");
  }

  // Middle-octave Pilu notes weighted by the whole-minute counts.
  static GeneratorConfig pilu(std::uint64_t seed = 1) {
    GeneratorConfig cfg;
    cfg.labels = {{Swar::Sa, 0},     {Swar::SudhRe, 0},   {Swar::KomalGa, 0}, {Swar::SudhMa, 0},
                  {Swar::Pa, 0},     {Swar::KomalDha, 0}, {Swar::SudhNi, 0}};
    const double counts[] = {30, 22, 21, 8, 11, 6, 17};
    for (const double c : counts) cfg.probabilities.push_back(c / 115.0);
    cfg.seed = seed;
    return cfg;
  }
};

// One probability step of the quasi-multinomial walk: add drift, clip at
// zero, renormalize.
inline void apply_drift(std::vector<double>& p, const std::vector<double>& drift) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::max(0.0, p[i] + drift[i]);
    sum += p[i];
  }
  if (!(sum > 0.0)) throw NumericError("generator: drift drove every probability to zero");
  for (auto& v : p) v /= sum;
}

inline std::vector<NoteKey> generate_sequence(const GeneratorConfig& cfg, std::size_t n) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<double> p = cfg.probabilities;
  const bool drifting = cfg.drifting();
  std::vector<NoteKey> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(cfg.labels[rng.categorical(p)]);
    if (drifting) apply_drift(p, cfg.drift);
  }
  return out;
}

struct TrueStay {
  NoteKey note;
  double onset = 0.0;
  double offset = 0.0;
};

struct RenderedPerformance {
  PitchTrack track;
  std::vector<TrueStay> stays;
};

// Render stream seed, kept apart from the sequence stream of the same seed.
inline std::uint64_t render_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

// Each symbol becomes a stay of jittered duration with Gaussian f0 noise;
// consecutive stays are joined by a glide linear in Hz, or by unvoiced
// samples when the same note repeats.
inline RenderedPerformance render(const std::vector<NoteKey>& sequence, const NoteDatabase& db,
                                  const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(render_seed(cfg.seed));
  const double dt = cfg.sample_period;
  const auto glide_samples = cfg.glide_duration > 0.0 ? std::max<long long>(1, std::llround(cfg.glide_duration / dt)) : 0;

  RenderedPerformance out;
  std::vector<PitchSample> samples;
  std::size_t index = 0;
  // times snapped to whole nanoseconds so they print as short decimals
  auto time_at = [dt](std::size_t i) { return std::round(static_cast<double>(i) * dt * 1e9) / 1e9; };
  auto emit = [&](std::optional<double> f0) { samples.push_back({time_at(index++), f0}); };

  const NoteSpec* previous = nullptr;
  for (const auto& key : sequence) {
    const NoteSpec* spec = db.find(key);
    if (!spec)
      throw ValidationError("render: note " + std::string(swar_name(key.name)) + " octave " +
                            std::to_string(key.octave) + " is not in the database");
    if (previous) {
      for (long long i = 0; i < glide_samples; ++i) {
        if (previous->key() == spec->key()) {
          emit(std::nullopt);
        } else {
          const double frac = static_cast<double>(i + 1) / static_cast<double>(glide_samples + 1);
          emit(previous->mean_hz + (spec->mean_hz - previous->mean_hz) * frac);
        }
      }
    }
    const double duration = cfg.stay_duration_mean + (2.0 * rng.uniform() - 1.0) * cfg.stay_duration_jitter;
    const auto n_stay = std::max<long long>(2, std::llround(duration / dt) + 1);
    TrueStay truth{key, time_at(index), 0.0};
    for (long long i = 0; i < n_stay; ++i) {
      double f0 = spec->mean_hz + rng.normal() * spec->sd_hz * cfg.f0_jitter_scale;
      if (!(f0 > 0.0)) f0 = spec->mean_hz;
      emit(f0);
    }
    truth.offset = samples.back().t;
    out.stays.push_back(truth);
    previous = spec;
  }
  out.track = PitchTrack(std::move(samples));
  return out;
}

inline PitchTrack render_track(const std::vector<NoteKey>& sequence, const NoteDatabase& db,
                               const GeneratorConfig& cfg) {
  return render(sequence, db, cfg).track;
}

}  // namespace ragalab
