#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slt/detect.hpp"
#include "slt/frame.hpp"
#include "slt/geometry.hpp"
#include "slt/synth.hpp"

namespace slt {

struct PositionEstimate {
  std::int64_t frame_index = 0;
  std::int64_t timestamp_ms = 0;
  std::optional<WorldPosition> pos;     // present iff detection is present
  std::optional<Detection> detection;   // raw image-plane result
  /// A run was found but triangulated behind the camera; pos and detection
  /// are both dropped.
  bool triangulation_failed = false;
};

struct SmootherConfig {
  bool enabled = false;
  double alpha = 0.5;

  void validate() const;
};

/// First-order exponential smoother over floor positions.
class ExponentialSmoother {
 public:
  explicit ExponentialSmoother(double alpha);

  WorldPosition update(const WorldPosition& p);
  void reset() noexcept { primed_ = false; }
  bool primed() const noexcept { return primed_; }

 private:
  double alpha_;
  WorldPosition state_;
  bool primed_ = false;
};

/// detect_feet followed by locate().
PositionEstimate track_frame(const Frame& frame, const RigConfig& rig,
                             const Calibration& cal, const DetectParams& p);

/// Triangulates a detection against the calibrated back-wall row. A
/// detection that would triangulate behind the camera yields an estimate with
/// no position and triangulation_failed set.
PositionEstimate locate(const std::optional<Detection>& det,
                        const RigConfig& rig, const Calibration& cal,
                        std::int64_t frame_index = 0,
                        std::int64_t timestamp_ms = 0);

/// One estimate per frame, in order. Throws InputError when timestamps go
/// backwards. With smoothing enabled, present positions are smoothed and the
/// smoother restarts after every frame without a position.
std::vector<PositionEstimate> track_stream(std::span<const Frame> frames,
                                           const RigConfig& rig,
                                           const Calibration& cal,
                                           const DetectParams& p,
                                           const SmootherConfig& s = {});

/// Applies the smoothing stage of track_stream to raw estimates.
void smooth_estimates(std::vector<PositionEstimate>& estimates,
                      const SmootherConfig& s);

struct TimedRun {
  std::vector<PositionEstimate> estimates;
  double elapsed_s = 0.0;
};

/// track_stream plus the wall-clock time it took.
TimedRun track_stream_timed(std::span<const Frame> frames, const RigConfig& rig,
                            const Calibration& cal, const DetectParams& p,
                            const SmootherConfig& s = {});

struct Metrics {
  std::optional<double> rms_error;  // cm; absent with no compared frames
  std::optional<double> max_error;
  std::optional<double> p95_error;
  std::optional<double> within_10cm_fraction;
  double detection_rate = 0.0;  // detected / eligible, 0 with none eligible
  std::optional<double> frames_per_second;
  std::size_t eligible = 0;  // truth has the user present
  std::size_t detected = 0;  // eligible and estimated
  std::size_t false_positives = 0;  // estimated with nobody present
};

/// Floor-plane Euclidean errors over frames where both truth and estimate
/// carry a position. p95 is the nearest-rank 95th percentile. Throws
/// InputError when the sequences differ in length.
Metrics evaluate(std::span<const PositionEstimate> estimates,
                 std::span<const SceneState> truth,
                 std::optional<double> elapsed_s = std::nullopt);

}  // namespace slt
