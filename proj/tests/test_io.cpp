#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "slt/io.hpp"
#include "test_support.hpp"

#ifndef SLT_REFERENCE_CONFIG
#error "SLT_REFERENCE_CONFIG must point at configs/reference.json"
#endif

namespace slt {
namespace {

const char* kMinimalConfig = R"({
  "rig": {"d": 40, "f": 400, "z_b": 400, "width": 320, "height": 240, "u0": 160, "v0": 120},
  "detect": {"ath_base": 10, "ath_slope": 0.5, "ath_min": 5, "ath_max": 255, "min_run": 3},
  "noise": {"background_mean": 40, "background_sigma": 10, "seed": 1},
  "intensity": {"i_ref": 60, "z_ref": 400}
})";

std::string with_replaced(std::string text, const std::string& from,
                          const std::string& to) {
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return text.replace(at, from.size(), to);
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

TEST(Pgm, GoldenTwoByTwo) {
  const Frame f(2, 2, {0, 255, 128, 7});
  const std::string bytes = encode_pgm(f);
  const std::string expected = std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\x80' + '\x07';
  EXPECT_EQ(bytes.size(), 15u);
  EXPECT_EQ(bytes, expected);
  EXPECT_TRUE(decode_pgm(bytes).same_pixels(f));
}

TEST(Pgm, RejectsAsciiVariant) {
  try {
    decode_pgm("P2\n2 2\n255\n0 1 2 3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 1u);
    EXPECT_NE(std::string(e.what()).find("P2"), std::string::npos);
  }
}

TEST(Pgm, RejectsMalformedHeaders) {
  EXPECT_THROW(decode_pgm(""), ParseError);
  EXPECT_THROW(decode_pgm("Q5\n2 2\n255\n"), ParseError);
  EXPECT_THROW(decode_pgm("P52 2\n255\nabcd"), ParseError);
  EXPECT_THROW(decode_pgm("P5\nx 2\n255\nabcd"), ParseError);
  EXPECT_THROW(decode_pgm("P5\n0 2\n255\n"), ParseError);
  EXPECT_THROW(decode_pgm("P5\n2 2\n255"), ParseError);
}

TEST(Pgm, RejectsMaxvalOtherThan255) {
  try {
    decode_pgm("P5\n2 2\n65535\nabcdefgh");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 7u);
  }
  EXPECT_THROW(decode_pgm("P5\n2 2\n15\nabcd"), ParseError);
}

TEST(Pgm, TruncatedPayloadReportsOffset) {
  try {
    decode_pgm("P5\n2 2\n255\nabc");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 14u);
  }
}

TEST(Pgm, AcceptsCommentsInHeader) {
  const Frame f = decode_pgm("P5\n# made by hand\n2 1 # width height\n255\nAB");
  EXPECT_EQ(f.width(), 2);
  EXPECT_EQ(f.at(0, 0), 'A');
  EXPECT_EQ(f.at(1, 0), 'B');
}

TEST(Pgm, RoundTripIsLossless) {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> dim(1, 64);
  for (int i = 0; i < 1000; ++i) {
    const Frame f = testing::random_frame(rng, dim(rng), dim(rng));
    std::stringstream s;
    write_pgm(f, s);
    ASSERT_TRUE(read_pgm(s).same_pixels(f)) << "case " << i;
  }
}

TEST(Config, ReferenceFileLoads) {
  const RunConfig cfg = load_config(SLT_REFERENCE_CONFIG);
  EXPECT_EQ(cfg.rig.d(), 40.0);
  EXPECT_EQ(cfg.rig.f(), 400.0);
  EXPECT_EQ(cfg.rig.z_b(), 400.0);
  EXPECT_EQ(cfg.rig.width(), 320);
  EXPECT_EQ(cfg.rig.height(), 240);
  EXPECT_EQ(cfg.rig.u0(), 160.0);
  EXPECT_EQ(cfg.rig.v0(), 120.0);
  EXPECT_EQ(cfg.foot_width, 25.0);
  EXPECT_EQ(cfg.intensity.i_ref, 60.0);
  EXPECT_EQ(cfg.intensity.z_ref, 400.0);
  EXPECT_EQ(cfg.detect.ath_base, 10.0);
  EXPECT_EQ(cfg.detect.ath_slope, 0.5);
  EXPECT_EQ(cfg.detect.min_run, 3);
  EXPECT_EQ(cfg.noise.background_sigma, 10.0);
  ASSERT_TRUE(cfg.trajectory);
  EXPECT_EQ(cfg.trajectory->kind, TrajectoryKind::stroll);
  EXPECT_EQ(cfg.trajectory->rate_hz * cfg.trajectory->duration_s, 600.0);
}

TEST(Config, MinimalConfigUsesDefaults) {
  const RunConfig cfg = parse_config(kMinimalConfig);
  EXPECT_FALSE(cfg.trajectory);
  EXPECT_FALSE(cfg.smoother.enabled);
  EXPECT_EQ(cfg.render.line_sigma, 0.0);
}

TEST(Config, ZeroBaselineNamesD) {
  EXPECT_EQ(config_error_key(with_replaced(kMinimalConfig, "\"d\": 40", "\"d\": 0")),
            "rig.d");
}

TEST(Config, BackWallOutsideFrameRejected) {
  // Wall row = 120 + 40*400/400 = 160 >= height 150.
  const auto text = with_replaced(kMinimalConfig, "\"height\": 240", "\"height\": 150");
  const auto text2 = with_replaced(text, "\"v0\": 120", "\"v0\": 120");
  EXPECT_THROW(parse_config(text2), ConfigError);
}

TEST(Config, StrictKeys) {
  EXPECT_EQ(config_error_key(with_replaced(kMinimalConfig, "\"d\": 40,", "\"d\": 40, \"tilt\": 3,")),
            "rig.tilt");
  EXPECT_EQ(config_error_key(with_replaced(kMinimalConfig, "\"f\": 400, ", "")), "rig.f");
  EXPECT_EQ(config_error_key(with_replaced(kMinimalConfig, "\"min_run\": 3", "\"min_run\": 2.5")),
            "detect.min_run");
  EXPECT_EQ(config_error_key(with_replaced(kMinimalConfig, "\"i_ref\": 60", "\"i_ref\": \"60\"")),
            "intensity.i_ref");
  EXPECT_EQ(config_error_key(with_replaced(kMinimalConfig, "\"seed\": 1", "\"seed\": -1")),
            "noise.seed");
  EXPECT_EQ(config_error_key(with_replaced(kMinimalConfig, "\"ath_slope\": 0.5", "\"ath_slope\": -1")),
            "detect.ath_slope");
  EXPECT_EQ(config_error_key(std::string(kMinimalConfig).insert(1, "\"extra\": {},")), "extra");
}

TEST(Config, TrajectoryKinds) {
  const std::string base = std::string(kMinimalConfig);
  auto with_traj = [&](const std::string& t) {
    std::string s = base;
    s.insert(s.rfind('}'), ", \"trajectory\": " + t);
    return s;
  };
  const auto circle = parse_config(with_traj(
      R"({"kind": "circle", "rate_hz": 20, "duration_s": 2, "center": {"x": 0, "z": 250}, "radius": 30})"));
  ASSERT_TRUE(circle.trajectory);
  EXPECT_EQ(circle.trajectory->kind, TrajectoryKind::circle);
  EXPECT_EQ(circle.trajectory->radius, 30.0);
  const auto still = parse_config(with_traj(
      R"({"kind": "stationary", "rate_hz": 20, "duration_s": 1, "position": {"x": 0, "z": 200}})"));
  EXPECT_EQ(still.trajectory->position.z, 200.0);
  EXPECT_EQ(config_error_key(with_traj(
                R"({"kind": "spiral", "rate_hz": 20, "duration_s": 1})")),
            "trajectory.kind");
  EXPECT_EQ(config_error_key(with_traj(
                R"({"kind": "stationary", "rate_hz": 20, "duration_s": 1, "position": {"x": 0, "z": 200}, "radius": 3})")),
            "trajectory.radius");
  EXPECT_THROW(parse_config(with_traj(
                   R"({"kind": "stationary", "rate_hz": 20, "duration_s": 1, "position": {"x": 0, "z": 500}})")),
               ConfigError);
}

TEST(Config, MalformedJsonIsParseError) {
  EXPECT_THROW(parse_config("{\"rig\": "), ParseError);
}

TEST(CalibrationFile, RoundTripAndValidation) {
  const auto rig = testing::reference_rig();
  const Calibration cal{160, 0, 320, 240};
  EXPECT_EQ(encode_calibration(cal), "v_b=160\n");
  EXPECT_EQ(decode_calibration("v_b=160\n", rig).v_b, 160);
  EXPECT_EQ(decode_calibration("v_b=160", rig).width, 320);
  EXPECT_THROW(decode_calibration("vb=160\n", rig), ParseError);
  EXPECT_THROW(decode_calibration("v_b=abc\n", rig), ParseError);
  EXPECT_THROW(decode_calibration("v_b=160 x\n", rig), ParseError);
  EXPECT_THROW(decode_calibration("v_b=239\n", rig), ConfigError);
}

TEST(EstimatesCsv, Formatting) {
  PositionEstimate gone;
  gone.frame_index = 42;
  gone.timestamp_ms = 2100;
  PositionEstimate here;
  here.frame_index = 43;
  here.timestamp_ms = 2150;
  here.pos = WorldPosition{50.0, 200.0};
  here.detection = Detection{260.25, 200, 50, 12000.0, 235};
  std::ostringstream out;
  write_estimates_csv({gone, here}, out);
  EXPECT_EQ(out.str(),
            "frame,timestamp_ms,detected,u_f,v_f,x_cm,z_cm\n"
            "42,2100,0,,,,\n"
            "43,2150,1,260.250,200,50.000,200.000\n");
}

TEST(EstimatesCsv, EmptyStreamIsHeaderOnly) {
  std::ostringstream out;
  write_estimates_csv({}, out);
  EXPECT_EQ(out.str(), "frame,timestamp_ms,detected,u_f,v_f,x_cm,z_cm\n");
  std::istringstream in(out.str());
  EXPECT_TRUE(read_estimates_csv(in).empty());
}

TEST(EstimatesCsv, RoundTripAtThreeDecimals) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> x(-300.0, 300.0), z(0.5, 400.0), u(0.0, 320.0);
  std::vector<PositionEstimate> est;
  for (int i = 0; i < 1000; ++i) {
    PositionEstimate e;
    e.frame_index = i;
    e.timestamp_ms = 50 * i + (i % 3);
    if (i % 5 != 0) {
      e.pos = WorldPosition{x(rng), z(rng)};
      e.detection = Detection{u(rng), 161 + i % 70, 10, 1000.0, 0};
    }
    est.push_back(e);
  }
  std::stringstream s;
  write_estimates_csv(est, s);
  const auto back = read_estimates_csv(s);
  ASSERT_EQ(back.size(), est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    EXPECT_EQ(back[i].frame_index, est[i].frame_index);
    EXPECT_EQ(back[i].timestamp_ms, est[i].timestamp_ms);
    ASSERT_EQ(back[i].pos.has_value(), est[i].pos.has_value());
    if (!est[i].pos) continue;
    EXPECT_NEAR(back[i].pos->x, est[i].pos->x, 0.0005 + 1e-9);
    EXPECT_NEAR(back[i].pos->z, est[i].pos->z, 0.0005 + 1e-9);
    EXPECT_NEAR(back[i].detection->u_f, est[i].detection->u_f, 0.0005 + 1e-9);
    EXPECT_EQ(back[i].detection->v_f, est[i].detection->v_f);
    // Re-serializing the parsed rows is a fixed point.
  }
  std::stringstream again;
  write_estimates_csv(back, again);
  EXPECT_EQ(again.str(), s.str());
}

TEST(EstimatesCsv, RejectsMalformedRows) {
  auto parse = [](const std::string& body) {
    std::istringstream in("frame,timestamp_ms,detected,u_f,v_f,x_cm,z_cm\n" + body);
    return read_estimates_csv(in);
  };
  EXPECT_THROW(parse("1,2,0,,,\n"), ParseError);
  EXPECT_THROW(parse("1,2,2,,,,\n"), ParseError);
  EXPECT_THROW(parse("1,2,0,1.0,,,\n"), ParseError);
  EXPECT_THROW(parse("1,2,1,abc,3,4,5\n"), ParseError);
  std::istringstream bad_header("frame,ts\n");
  EXPECT_THROW(read_estimates_csv(bad_header), ParseError);
}

TEST(TruthCsv, RoundTrip) {
  std::vector<SceneState> truth;
  for (int i = 0; i < 20; ++i) {
    SceneState s;
    s.timestamp_ms = 50 * i;
    if (i % 4) s.user = WorldPosition{i * 1.2345, 150.0 + i * 3.21};
    truth.push_back(s);
  }
  std::stringstream s;
  write_truth_csv(truth, s);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "frame,timestamp_ms,present,x_cm,z_cm");
  const auto back = read_truth_csv(s);
  ASSERT_EQ(back.size(), truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    EXPECT_EQ(back[i].timestamp_ms, truth[i].timestamp_ms);
    ASSERT_EQ(back[i].user.has_value(), truth[i].user.has_value());
    if (truth[i].user) EXPECT_NEAR(back[i].user->z, truth[i].user->z, 0.0005 + 1e-9);
  }
}

TEST(FormatFixed, LocaleIndependentThreeDecimals) {
  EXPECT_EQ(format_fixed(50.0), "50.000");
  EXPECT_EQ(format_fixed(-0.0006), "-0.001");
  EXPECT_EQ(format_fixed(1234567.0), "1234567.000");
  EXPECT_EQ(format_fixed(0.1, 1), "0.1");
}

}  // namespace
}  // namespace slt
