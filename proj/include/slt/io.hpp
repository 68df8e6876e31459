#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slt/detect.hpp"
#include "slt/frame.hpp"
#include "slt/geometry.hpp"
#include "slt/pipeline.hpp"
#include "slt/synth.hpp"

namespace slt {

// ---- PGM (binary P5, maxval 255) -------------------------------------------

/// Writes "P5\n<w> <h>\n255\n" followed by the raw pixels.
void write_pgm(const Frame& frame, std::ostream& out);
std::string encode_pgm(const Frame& frame);

/// Parses a binary P5 image with maxval 255. Comments between header tokens
/// are accepted. Throws ParseError carrying the byte offset on failure.
Frame decode_pgm(std::string_view bytes);
Frame read_pgm(std::istream& in);

void save_pgm(const Frame& frame, const std::filesystem::path& path);
Frame load_pgm(const std::filesystem::path& path);

// ---- Run configuration (JSON) ----------------------------------------------

struct RunConfig {
  RigConfig rig;
  DetectParams detect;
  NoiseParams noise;
  IntensityModel intensity;
  RenderOptions render;
  SmootherConfig smoother;
  double foot_width = 25.0;
  std::optional<double> feet_gap;
  std::optional<TrajectorySpec> trajectory;
};

/// Strict JSON loader: unknown keys, missing keys, wrong types and invariant
/// violations all raise ConfigError naming the key path (e.g. "rig.d").
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

// ---- Calibration file ("v_b=<int>\n") --------------------------------------

std::string encode_calibration(const Calibration& cal);
/// The file carries only v_b; frame dimensions come from the rig.
Calibration decode_calibration(std::string_view text, const RigConfig& rig);

// ---- CSV -------------------------------------------------------------------

inline constexpr std::string_view kEstimatesHeader =
    "frame,timestamp_ms,detected,u_f,v_f,x_cm,z_cm";
inline constexpr std::string_view kTruthHeader =
    "frame,timestamp_ms,present,x_cm,z_cm";

void write_estimates_csv(const std::vector<PositionEstimate>& estimates,
                         std::ostream& out);
/// Detection fields other than u_f and v_f are not serialized and read back
/// as zero (run_len, mass) or u_f rounded down (u_start).
std::vector<PositionEstimate> read_estimates_csv(std::istream& in);

/// Frame index of truth row i is i.
void write_truth_csv(const std::vector<SceneState>& truth, std::ostream& out);
std::vector<SceneState> read_truth_csv(std::istream& in);

/// Fixed-point decimal with `decimals` places, locale independent.
std::string format_fixed(double value, int decimals = 3);

}  // namespace slt
