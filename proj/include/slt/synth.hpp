#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slt/frame.hpp"
#include "slt/geometry.hpp"

namespace slt {

/// Ground truth for one rendered frame.
struct SceneState {
  std::optional<WorldPosition> user;  // empty room when absent
  double foot_width = 25.0;           // cm
  std::int64_t timestamp_ms = 0;
  /// Two-feet mode: when set, two runs of foot_width each are rendered
  /// either side of user.x, separated by this many cm.
  std::optional<double> feet_gap;
};

struct NoiseParams {
  double background_mean = 0.0;   // gray levels
  double background_sigma = 0.0;  // gray levels
  std::uint64_t seed = 0;

  void validate() const;
};

/// Inverse-square falloff of reflected laser light with depth.
struct IntensityModel {
  double i_ref = 60.0;   // gray levels at z_ref
  double z_ref = 400.0;  // cm

  void validate() const;
};

struct RenderOptions {
  /// 0 renders one-pixel lines; > 0 spreads each line vertically with a
  /// Gaussian profile of this std-dev (pixels).
  double line_sigma = 0.0;

  void validate() const;
};

double intensity_at(const IntensityModel& im, double z);

/// Columns [first, last] covered by a reflector of `width_cm` centred at
/// lateral position `x` and depth `z`, clipped to the frame. Empty (first >
/// last) when entirely outside.
struct ColumnSpan {
  int first = 0;
  int last = -1;
  bool empty() const noexcept { return first > last; }
  int size() const noexcept { return empty() ? 0 : last - first + 1; }
};
ColumnSpan foot_columns(const RigConfig& rig, double x, double z,
                        double width_cm);

/// Renders the laser line as seen by the rig camera. Background noise is
/// drawn per row from a generator keyed on (seed, index, row), so the output
/// is deterministic and independent of thread count.
Frame render(const RigConfig& rig, const SceneState& scene,
             const NoiseParams& noise, const IntensityModel& im,
             std::int64_t index = 0, const RenderOptions& opts = {});

enum class TrajectoryKind { stationary, stroll, circle };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::stationary;
  double rate_hz = 20.0;
  double duration_s = 1.0;
  WorldPosition position{0.0, 200.0};  // stationary
  WorldPosition start{0.0, 150.0};     // stroll
  WorldPosition end{0.0, 350.0};
  WorldPosition center{0.0, 250.0};  // circle
  double radius = 0.0;
  /// Stroll: one out-and-back cycle; circle: one revolution. Non-positive
  /// means "use duration_s".
  double period_s = 0.0;
  double foot_width = 25.0;
  std::optional<double> feet_gap;
};

/// rate*duration scene states, timestamps spaced 1000/rate ms apart starting
/// at 0. Throws ConfigError if any position leaves 0 < z <= z_b.
std::vector<SceneState> make_trajectory(const TrajectorySpec& spec,
                                        const RigConfig& rig);

}  // namespace slt
