#include <gtest/gtest.h>

#include "properties.hpp"

using namespace ragalab;

namespace {

std::vector<SpanPoint> curve(std::size_t n, double duration, const std::function<double(double)>& f) {
  std::vector<SpanPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back({u * duration, f(u)});
  }
  return pts;
}

std::vector<SpanPoint> piecewise(const std::vector<double>& knots, std::size_t per_leg) {
  std::vector<SpanPoint> pts;
  std::size_t idx = 0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    for (std::size_t i = k ? 1 : 0; i <= per_leg; ++i)
      pts.push_back({0.01 * static_cast<double>(idx++),
                     knots[k] + (knots[k + 1] - knots[k]) * static_cast<double>(i) / static_cast<double>(per_leg)});
  return pts;
}

// Triangle hat/valley whose extremum sits at fraction r of the span.
std::vector<SpanPoint> triangle(double r, double extent, std::size_t n = 101) {
  return curve(n, 1.0, [=](double u) { return u <= r ? extent * u / r : extent * (1.0 - u) / (1.0 - r); });
}

}  // namespace

TEST(Direction, Examples) {
  EXPECT_EQ(classify_direction(curve(20, 1, [](double u) { return 60 + 2 * u; })), ContourKind::Rising);
  EXPECT_EQ(classify_direction(curve(20, 1, [](double u) { return 62 - 2 * u; })), ContourKind::Falling);
  EXPECT_EQ(classify_direction(piecewise({60, 57, 60}, 10)), ContourKind::Valley);
  EXPECT_EQ(classify_direction(piecewise({60, 63, 60}, 10)), ContourKind::Hat);
  EXPECT_EQ(classify_direction(piecewise({60, 62, 60, 62}, 10)), ContourKind::Mixed);
  EXPECT_EQ(classify_direction(piecewise({60, 60.2}, 10)), ContourKind::Mixed);  // too small to count as a move
  EXPECT_THROW((void)classify_direction(piecewise({60}, 1)), ValidationError);
}

TEST(Direction, OppositeExcursionMakesMixed) {
  // net +2 but with a 1-semitone dip along the way
  EXPECT_EQ(classify_direction(piecewise({60, 59, 62}, 10)), ContourKind::Mixed);
  // a 0.3 dip is below the reversal threshold
  EXPECT_EQ(classify_direction(piecewise({60, 59.7, 62}, 10)), ContourKind::Rising);
}

TEST(Direction, InvariantUnderShiftAndTransposition) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pts = oracle::random_span(rng);
    const auto base = classify_direction(pts);
    auto moved = pts;
    for (auto& p : moved) {
      p.t += 12.5;
      p.pitch += 7.0;
    }
    const auto truth = oracle::classify_by_rules(pts);
    if (truth.margin < 1e-6) continue;
    EXPECT_EQ(classify_direction(moved), base) << trial;
  }
}

TEST(Shape, Examples) {
  EXPECT_EQ(classify_shape(curve(50, 1, [](double u) { return 60 + 2 * u; })), Shape::Linear);
  EXPECT_NEAR(normalized_chord_area(curve(50, 1, [](double u) { return 60 + 2 * u; })), 0.0, 1e-12);

  const auto quad = curve(401, 1, [](double u) { return 60 + 2 * u * u; });
  EXPECT_EQ(classify_shape(quad), Shape::Convex);
  // area under the chord is -2/6 before dividing by duration * |net| = 2
  EXPECT_NEAR(normalized_chord_area(quad), -1.0 / 6.0, 1e-4);

  EXPECT_EQ(classify_shape(curve(401, 1, [](double u) { return 60 + 2 * std::sqrt(u); })), Shape::Concave);
  EXPECT_THROW((void)classify_shape(piecewise({60, 61, 60}, 4)), ValidationError);
}

TEST(Shape, ReflectionAboutChordSwapsConvexAndConcave) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> bend(-3.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double b = bend(rng);
    const auto pts = curve(41, 0.4, [b](double u) { return 60 + 2 * u + b * u * (1 - u); });
    auto mirrored = pts;
    for (auto& p : mirrored) {
      const double chord = 60 + 2 * (p.t / 0.4);
      p.pitch = 2 * chord - p.pitch;
    }
    const auto s = classify_shape(pts);
    const auto m = classify_shape(mirrored);
    if (s == Shape::Linear) {
      EXPECT_EQ(m, Shape::Linear);
    } else {
      EXPECT_EQ(m, s == Shape::Convex ? Shape::Concave : Shape::Convex) << b;
    }
  }
}

TEST(HatValley, Examples) {
  const auto sym = classify_hat_valley(triangle(0.5, 0.5), ContourKind::Hat);
  EXPECT_EQ(sym.skew, Skew::Symmetric);
  EXPECT_EQ(sym.magnitude, Magnitude::Low);

  const auto early = classify_hat_valley(triangle(0.2, 4.0), ContourKind::Hat);
  EXPECT_EQ(early.skew, Skew::Positive);
  EXPECT_EQ(early.magnitude, Magnitude::High);
  EXPECT_NEAR(early.extent_semitones, 4.0, 1e-12);

  const auto late = classify_hat_valley(triangle(0.6, 2.0), ContourKind::Hat);  // r = 0.5 + tol exactly
  EXPECT_EQ(late.skew, Skew::Negative);
  EXPECT_EQ(late.magnitude, Magnitude::Moderate);

  const auto at_lo = classify_hat_valley(triangle(0.4, 2.0), ContourKind::Hat);
  EXPECT_EQ(at_lo.skew, Skew::Positive);

  const auto valley = classify_hat_valley(triangle(0.5, -3.5), ContourKind::Valley);
  EXPECT_EQ(valley.magnitude, Magnitude::High);
  EXPECT_EQ(magnitude_name(valley.magnitude, ContourKind::Valley), "Deep");
  EXPECT_EQ(magnitude_name(Magnitude::Low, ContourKind::Valley), "Shallow");
  EXPECT_THROW((void)classify_hat_valley(triangle(0.5, 1.0), ContourKind::Rising), ValidationError);
}

TEST(HatValley, PlateauUsesItsMidpoint) {
  // flat top from 0.1 to 0.5 has midpoint 0.3
  const auto pts = curve(101, 1.0, [](double u) { return u < 0.1 ? 20 * u : u <= 0.5 ? 2.0 : 2.0 * (1 - u) / 0.5; });
  const auto hv = classify_hat_valley(pts, ContourKind::Hat);
  EXPECT_NEAR(hv.extremum_position, 0.3, 1e-9);
  EXPECT_EQ(hv.skew, Skew::Positive);
}

TEST(ClassifySpan, AgreesWithRules) {
  const auto c = oracle::contour_matches_rules(5000);
  EXPECT_TRUE(c.ok) << c.detail;
}

TEST(ClassifySpan, ExclusiveSubcategories) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto seg = classify_span(oracle::random_span(rng));
    const bool directed = seg.kind == ContourKind::Rising || seg.kind == ContourKind::Falling;
    const bool turning = seg.kind == ContourKind::Hat || seg.kind == ContourKind::Valley;
    EXPECT_EQ(seg.shape != Shape::NotApplicable, directed);
    EXPECT_EQ(seg.skew != Skew::NotApplicable, turning);
    EXPECT_EQ(seg.magnitude != Magnitude::NotApplicable, turning);
    EXPECT_GT(seg.t1, seg.t0);
  }
}

TEST(SegmentContour, MonotoneRampAndHat) {
  const auto db = default_notedb();
  const double sa = testdata::spec_of(db, Swar::Sa).mean_hz;
  const double ga = testdata::spec_of(db, Swar::KomalGa).mean_hz;
  std::vector<PitchSample> s;
  testdata::append_curve(s, 0.01, 20, [=](std::size_t) { return sa; });
  testdata::append_curve(s, 0.01, 9, [=](std::size_t i) { return sa + (ga - sa) * (i + 1) / 10.0; });
  testdata::append_curve(s, 0.01, 20, [=](std::size_t) { return ga; });
  auto segs = segment_contour(PitchTrack(s), db);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[1].kind, ContourKind::Rising);

  s.clear();
  testdata::append_curve(s, 0.01, 20, [=](std::size_t) { return sa; });
  testdata::append_curve(s, 0.01, 19, [=](std::size_t i) {
    const double u = (i + 1) / 20.0;
    return sa + (ga - sa) * (1 - std::fabs(2 * u - 1));
  });
  testdata::append_curve(s, 0.01, 20, [=](std::size_t) { return sa; });
  segs = segment_contour(PitchTrack(s), db);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[1].kind, ContourKind::Hat);
  EXPECT_EQ(segs[0].kind, ContourKind::Stay);
  EXPECT_EQ(segs[2].kind, ContourKind::Stay);
}

TEST(SegmentContour, AnalyticFixture) {
  const auto f = oracle::contour_fixture();
  const auto segs = segment_contour(f.track, default_notedb());
  ASSERT_EQ(segs.size(), f.kinds.size());
  for (std::size_t i = 0; i < segs.size(); ++i) EXPECT_EQ(segs[i].kind, f.kinds[i]) << i;
  EXPECT_EQ(summarize(segs), f.summary);
  for (std::size_t i = 1; i < segs.size(); ++i) EXPECT_GE(segs[i].t0, segs[i - 1].t1);
}

TEST(SegmentContour, StaysEqualDetectedEvents) {
  const auto db = default_notedb();
  auto cfg = GeneratorConfig::pilu(21);
  const auto track = render_track(generate_sequence(cfg, 80), db, cfg);
  const auto events = detect_events(track, db);
  std::vector<ContourSegment> stays;
  for (const auto& s : segment_contour(track, db))
    if (s.kind == ContourKind::Stay) stays.push_back(s);
  ASSERT_EQ(stays.size(), events.size());
  for (std::size_t i = 0; i < stays.size(); ++i) {
    EXPECT_EQ(stays[i].t0, events[i].onset);
    EXPECT_EQ(stays[i].t1, events[i].offset);
    EXPECT_EQ(*stays[i].note, events[i].note);
  }
}

TEST(SegmentContour, AllStayAndEmpty) {
  const auto db = default_notedb();
  std::vector<PitchSample> s;
  testdata::append_curve(s, 0.01, 30, [](std::size_t) { return 243.2661; });
  testdata::append_unvoiced(s, 0.01, 3);
  testdata::append_curve(s, 0.01, 30, [](std::size_t) { return 362.4957; });
  const auto segs = segment_contour(PitchTrack(s), db);
  ASSERT_EQ(segs.size(), 2u);
  for (const auto& seg : segs) EXPECT_EQ(seg.kind, ContourKind::Stay);
  EXPECT_TRUE(segment_contour(parse_track("time_sec,f0_hz\n"), db).empty());
}

TEST(SegmentContour, RenderedPerformanceMatchesPerSpanRules) {
  const auto c = oracle::rendered_contour_matches_truth(11, 115);
  EXPECT_TRUE(c.ok) << c.detail;
}

TEST(Summarize, Examples) {
  EXPECT_EQ(summarize({}), ContourSummary{});
  std::vector<ContourSegment> segs(3);
  for (auto& s : segs) {
    s.kind = ContourKind::Rising;
    s.shape = Shape::Linear;
  }
  segs[0].shape = Shape::Convex;
  const auto sum = summarize(segs);
  EXPECT_EQ(sum.count(ContourKind::Rising), 3u);
  EXPECT_EQ(sum.shape[0][0], 1u);
  EXPECT_EQ(sum.shape[0][2], 2u);
}

TEST(Summarize, SubcategoriesSumToKind) {
  const auto db = default_notedb();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto cfg = GeneratorConfig::pilu(seed);
    cfg.glide_duration = 0.12;
    const auto s = summarize(segment_contour(render_track(generate_sequence(cfg, 100), db, cfg), db));
    for (std::size_t r = 0; r < 2; ++r) {
      const std::size_t shape_total = s.shape[r][0] + s.shape[r][1] + s.shape[r][2];
      const std::size_t skew_total = s.skew[r][0] + s.skew[r][1] + s.skew[r][2];
      const std::size_t mag_total = s.magnitude[r][0] + s.magnitude[r][1] + s.magnitude[r][2];
      EXPECT_EQ(shape_total, s.kind[r == 0 ? 1 : 2]);
      EXPECT_EQ(skew_total, s.kind[r == 0 ? 4 : 5]);
      EXPECT_EQ(mag_total, s.kind[r == 0 ? 4 : 5]);
    }
  }
}

TEST(Ioi, Examples) {
  const auto even = ioi_report(std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(even.intervals, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(even.cv, 0.0);
  EXPECT_TRUE(even.rhythmic);

  const auto uneven = ioi_report(std::vector<double>{0, 1, 5});
  EXPECT_EQ(uneven.intervals, (std::vector<double>{1, 4}));
  EXPECT_GT(uneven.cv, 0.5);
  EXPECT_FALSE(uneven.rhythmic);

  EXPECT_NEAR(ioi_report(testdata::kLongStayOnsets).mean, 3.674, 0.01);
  EXPECT_THROW((void)ioi_report(std::vector<double>{1}), ValidationError);
}

TEST(ContourParams, Validation) {
  ContourParams p;
  EXPECT_NO_THROW(p.validate());
  p.skew_tolerance = 0.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.mag_hi = 0.5;
  EXPECT_THROW(p.validate(), ValidationError);
}
