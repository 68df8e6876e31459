#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slt/detect.hpp"
#include "slt/pipeline.hpp"
#include "slt/synth.hpp"
#include "test_support.hpp"

namespace slt {
namespace {

using testing::calibration_for;
using testing::noiseless;
using testing::reference_detect;
using testing::reference_intensity;
using testing::reference_rig;
using testing::scene_at;

Frame uniform_frame(int w, int h, std::uint8_t value) {
  Frame f(w, h);
  for (auto& p : f.pixels()) p = value;
  return f;
}

// Paints a horizontal run [u0, u0+len) on row v.
void paint(Frame& f, int v, int u0, int len, std::uint8_t value) {
  for (int u = u0; u < u0 + len; ++u) f.at(u, v) = value;
}

TEST(Calibrate, NoiselessEmptyFrame) {
  const Frame f = render(reference_rig(), SceneState{}, noiseless(),
                         reference_intensity());
  const Calibration cal = calibrate(f);
  EXPECT_EQ(cal.v_b, 160);
  EXPECT_EQ(cal.width, 320);
  EXPECT_EQ(cal.height, 240);
}

TEST(Calibrate, BlackAndUniformFramesFail) {
  EXPECT_THROW(calibrate(uniform_frame(320, 240, 0)), CalibrationError);
  EXPECT_THROW(calibrate(uniform_frame(320, 240, 97)), CalibrationError);
}

TEST(Calibrate, PureNoiseFails) {
  const RigConfig rig = reference_rig();
  // A line too faint to render is still a "line"; use a frame without one.
  Frame f(320, 240);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(60.0, 10.0);
  for (auto& p : f.pixels()) p = static_cast<std::uint8_t>(std::clamp(std::lround(g(rng)), 0L, 255L));
  EXPECT_THROW(calibrate(f), CalibrationError);
  (void)rig;
}

TEST(Calibrate, RowAtFrameEdgeFails) {
  Frame f(32, 24);
  paint(f, 0, 0, 32, 200);
  EXPECT_THROW(calibrate(f), CalibrationError);
  Frame g(32, 24);
  paint(g, 23, 0, 32, 200);
  EXPECT_THROW(calibrate(g), CalibrationError);
}

TEST(Calibrate, TiesGoToTheUpperRow) {
  Frame f(32, 24);
  paint(f, 8, 0, 32, 100);
  paint(f, 12, 0, 32, 100);
  EXPECT_EQ(calibrate(f).v_b, 8);
}

TEST(Calibrate, NoisyEmptyFramesRecoverTheWallRow) {
  const RigConfig rig = reference_rig();
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Frame f = render(rig, SceneState{}, {40.0, 10.0, seed},
                           reference_intensity());
    if (calibrate(f).v_b == 160) ++hits;
  }
  EXPECT_GE(hits, 99);
}

TEST(Ath, Examples) {
  DetectParams p = reference_detect();
  EXPECT_DOUBLE_EQ(ath(0.0, p), 10.0);
  EXPECT_DOUBLE_EQ(ath(40.0, p), 30.0);
  p.ath_max = 20.0;
  EXPECT_DOUBLE_EQ(ath(40.0, p), 20.0);
  p = reference_detect();
  p.ath_slope = 0.0;
  for (double dv : {0.0, 1.0, 50.0, 200.0}) EXPECT_DOUBLE_EQ(ath(dv, p), 10.0);
}

TEST(DetectParams, Validation) {
  DetectParams p = reference_detect();
  EXPECT_NO_THROW(p.validate());
  p.ath_min = 20.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = reference_detect();
  p.ath_slope = -0.1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = reference_detect();
  p.min_run = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

// Frame with P(u,v)=centre and both vertical neighbours = 100; ATH is
// pinned to 50 by a flat threshold.
class EdgeTestExamples : public ::testing::Test {
 protected:
  Frame frame = uniform_frame(8, 8, 100);
  Calibration cal = calibration_for(frame, 2);
  DetectParams p = [] {
    DetectParams q;
    q.ath_base = 50.0;
    q.ath_slope = 0.0;
    q.ath_min = 0.0;
    q.ath_max = 255.0;
    return q;
  }();
};

TEST_F(EdgeTestExamples, AboveThresholdIsEdge) {
  frame.at(3, 4) = 200;  // 200 - 100 - 50 = 50 > 0
  EXPECT_TRUE(edge_test(frame, 3, 4, cal, p));
}

TEST_F(EdgeTestExamples, ExactlyZeroIsNotEdge) {
  frame.at(3, 4) = 150;  // 150 - 100 - 50 = 0
  EXPECT_FALSE(edge_test(frame, 3, 4, cal, p));
}

TEST_F(EdgeTestExamples, UniformFrameHasNoEdges) {
  for (int v = cal.v_b + 1; v < frame.height() - 1; ++v) {
    for (int u = 0; u < frame.width(); ++u) {
      EXPECT_FALSE(edge_test(frame, u, v, cal, p));
    }
  }
}

TEST_F(EdgeTestExamples, OutsideScanDomainThrows) {
  EXPECT_THROW(edge_test(frame, 0, 2, cal, p), std::out_of_range);  // v == v_b
  EXPECT_THROW(edge_test(frame, 0, 7, cal, p), std::out_of_range);  // v == h-1
  EXPECT_THROW(edge_test(frame, 8, 4, cal, p), std::out_of_range);
  EXPECT_THROW(edge_test(frame, -1, 4, cal, p), std::out_of_range);
}

TEST(DetectFeet, UniformRunCentroidIsMidpoint) {
  Frame f(320, 240);
  paint(f, 200, 150, 20, 180);
  const auto d = detect_feet(f, calibration_for(f, 160), reference_detect());
  ASSERT_TRUE(d);
  EXPECT_DOUBLE_EQ(d->u_f, 159.5);
  EXPECT_EQ(d->v_f, 200);
  EXPECT_EQ(d->run_len, 20);
  EXPECT_DOUBLE_EQ(d->mass, 20 * 180.0);
}

TEST(DetectFeet, EmptySceneIsAbsent) {
  const Frame f = render(reference_rig(), SceneState{}, noiseless(),
                         reference_intensity());
  EXPECT_FALSE(detect_feet(f, calibrate(f), reference_detect()));
}

TEST(DetectFeet, UniformFramesAreAbsent) {
  for (int value : {0, 1, 77, 255}) {
    const Frame f = uniform_frame(64, 48, static_cast<std::uint8_t>(value));
    EXPECT_FALSE(detect_feet(f, calibration_for(f, 10), reference_detect()));
  }
}

TEST(DetectFeet, LongestRunWins) {
  Frame f(320, 240);
  paint(f, 200, 40, 12, 180);
  paint(f, 200, 150, 20, 180);
  const auto d = detect_feet(f, calibration_for(f, 160), reference_detect());
  ASSERT_TRUE(d);
  EXPECT_EQ(d->run_len, 20);
  EXPECT_EQ(d->u_start, 150);
}

TEST(DetectFeet, TiesPreferLowerRowThenLeftmostRun) {
  Frame f(320, 240);
  paint(f, 190, 10, 15, 180);
  paint(f, 210, 200, 15, 180);
  paint(f, 210, 100, 15, 180);
  const auto d = detect_feet(f, calibration_for(f, 160), reference_detect());
  ASSERT_TRUE(d);
  EXPECT_EQ(d->v_f, 210);
  EXPECT_EQ(d->u_start, 100);
}

TEST(DetectFeet, ShortRunsAreDiscarded) {
  Frame f(320, 240);
  paint(f, 200, 150, 2, 180);
  EXPECT_FALSE(detect_feet(f, calibration_for(f, 160), reference_detect()));
  paint(f, 200, 150, 3, 180);
  EXPECT_TRUE(detect_feet(f, calibration_for(f, 160), reference_detect()));
}

TEST(DetectFeet, RunTouchingFrameBorder) {
  Frame f(320, 240);
  paint(f, 238, 300, 20, 200);  // last scannable row, right edge
  const auto d = detect_feet(f, calibration_for(f, 160), reference_detect());
  ASSERT_TRUE(d);
  EXPECT_EQ(d->v_f, 238);
  EXPECT_DOUBLE_EQ(d->u_f, 309.5);
  // The bottom row has no lower neighbour and is never scanned.
  Frame g(320, 240);
  paint(g, 239, 100, 30, 200);
  EXPECT_FALSE(detect_feet(g, calibration_for(g, 160), reference_detect()));
}

TEST(DetectFeet, CentroidIsIntensityWeighted) {
  Frame f(320, 240);
  f.at(100, 200) = 100;
  f.at(101, 200) = 100;
  f.at(102, 200) = 200;
  const auto d = detect_feet(f, calibration_for(f, 160), reference_detect());
  ASSERT_TRUE(d);
  EXPECT_DOUBLE_EQ(d->u_f, (100.0 * 100 + 101.0 * 100 + 102.0 * 200) / 400.0);
}

TEST(DetectFeet, DimensionMismatchThrows) {
  Frame f(320, 240);
  Calibration cal{160, 0, 640, 480};
  EXPECT_THROW(detect_feet(f, cal, reference_detect()), ConfigError);
}

TEST(DetectFeet, TranslationCovariance) {
  const auto rig = reference_rig();
  const auto cal = Calibration{160, 0, 320, 240};
  const Frame base = render(rig, scene_at(-10.0, 250.0), {30.0, 0.0, 0},
                            reference_intensity());
  const auto d0 = detect_feet(base, cal, reference_detect());
  ASSERT_TRUE(d0);
  for (int k : {1, 3, 17}) {
    Frame right(320, 240), down(320, 240);
    for (auto& p : right.pixels()) p = 30;
    for (auto& p : down.pixels()) p = 30;
    for (int u = d0->u_start; u < d0->u_start + d0->run_len; ++u) {
      right.at(u + k, d0->v_f) = base.at(u, d0->v_f);
      down.at(u, d0->v_f + k) = base.at(u, d0->v_f);
    }
    const auto dr = detect_feet(right, cal, reference_detect());
    const auto dd = detect_feet(down, cal, reference_detect());
    ASSERT_TRUE(dr && dd);
    EXPECT_NEAR(dr->u_f, d0->u_f + k, 1e-12);
    EXPECT_EQ(dr->v_f, d0->v_f);
    EXPECT_EQ(dd->v_f, d0->v_f + k);
    EXPECT_DOUBLE_EQ(dd->u_f, d0->u_f);
  }
}

TEST(DetectFeet, RaisingThresholdNeverCreatesEdges) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Frame f = testing::random_frame(rng, 48, 40);
    const Calibration cal = calibration_for(f, 5);
    DetectParams lo = reference_detect();
    DetectParams hi = lo;
    hi.ath_base = lo.ath_base + 7.5;
    for (int v = 6; v < 39; ++v) {
      for (int u = 0; u < 48; ++u) {
        if (edge_test(f, u, v, cal, hi)) {
          ASSERT_TRUE(edge_test(f, u, v, cal, lo)) << u << "," << v;
        }
      }
    }
  }
}

TEST(DetectFeet, ParallelScanMatchesReference) {
  std::mt19937_64 rng(99);
  const auto rig = reference_rig();
  std::uniform_real_distribution<double> zd(60.0, 400.0), xd(-60.0, 60.0);
  for (int trial = 0; trial < 300; ++trial) {
    Frame f = trial % 3 == 0
                  ? testing::random_frame(rng, 320, 240)
                  : render(rig, scene_at(xd(rng), zd(rng)),
                           {40.0, trial % 2 ? 10.0 : 25.0, rng()},
                           reference_intensity(), trial);
    const Calibration cal = calibration_for(f, 160);
    DetectParams p = reference_detect();
    p.min_run = 1 + trial % 4;
    const auto a = detect_feet(f, cal, p);
    const auto b = reference::detect_feet(f, cal, p);
    ASSERT_EQ(a.has_value(), b.has_value()) << "trial " << trial;
    if (a) {
      EXPECT_EQ(a->u_f, b->u_f);
      EXPECT_EQ(a->v_f, b->v_f);
      EXPECT_EQ(a->run_len, b->run_len);
      EXPECT_EQ(a->mass, b->mass);
      EXPECT_EQ(a->u_start, b->u_start);
    }
    EXPECT_EQ(row_sums(f), reference::row_sums(f));
  }
}

TEST(DetectFeet, NoiselessRoundTripWithinQuantisation) {
  const auto rig = reference_rig();
  const Calibration cal = calibrate(render(rig, SceneState{}, noiseless(),
                                           reference_intensity()));
  std::mt19937_64 rng(4);
  // Depths whose foot row is on the sensor and whose run is not clipped.
  std::uniform_real_distribution<double> zd(140.0, 395.0), fd(-0.5, 0.5);
  for (int i = 0; i < 500; ++i) {
    const double z = zd(rng);
    const double x = fd(rng) * z * 160.0 / 400.0;
    const Frame f = render(rig, scene_at(x, z), noiseless(), reference_intensity());
    const auto est = track_frame(f, rig, cal, reference_detect());
    ASSERT_TRUE(est.pos) << "x=" << x << " z=" << z;
    EXPECT_LE(std::abs(est.pos->z - z), 1.5 * depth_resolution(rig, z));
    EXPECT_LE(std::abs(est.pos->x - x), 1.5 * z / rig.f());
  }
}

}  // namespace
}  // namespace slt
