#include "slt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "slt/errors.hpp"

namespace slt {

void SmootherConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha", "smoother: alpha must lie in (0, 1]");
  }
}

ExponentialSmoother::ExponentialSmoother(double alpha) : alpha_(alpha) {
  SmootherConfig{true, alpha}.validate();
}

WorldPosition ExponentialSmoother::update(const WorldPosition& p) {
  if (!primed_) {
    state_ = p;
    primed_ = true;
  } else {
    state_.x += alpha_ * (p.x - state_.x);
    state_.z += alpha_ * (p.z - state_.z);
  }
  return state_;
}

PositionEstimate track_frame(const Frame& frame, const RigConfig& rig,
                             const Calibration& cal, const DetectParams& p) {
  if (frame.width() != rig.width() || frame.height() != rig.height()) {
    throw ConfigError("rig", "frame size does not match the rig sensor");
  }
  return locate(detect_feet(frame, cal, p), rig, cal, frame.index(),
                frame.timestamp_ms());
}

PositionEstimate locate(const std::optional<Detection>& det,
                        const RigConfig& rig, const Calibration& cal,
                        std::int64_t frame_index, std::int64_t timestamp_ms) {
  PositionEstimate est;
  est.frame_index = frame_index;
  est.timestamp_ms = timestamp_ms;
  if (!det) return est;
  try {
    const double z = triangulate_depth(rig, det->v_f, cal.v_b);
    const double x = triangulate_lateral(rig, det->u_f - rig.u0(), z);
    est.pos = WorldPosition{x, z};
    est.detection = det;
  } catch (const DomainError&) {
    est.triangulation_failed = true;
  }
  return est;
}

void smooth_estimates(std::vector<PositionEstimate>& estimates,
                      const SmootherConfig& s) {
  if (!s.enabled) return;
  ExponentialSmoother smoother(s.alpha);
  for (auto& e : estimates) {
    if (e.pos) {
      e.pos = smoother.update(*e.pos);
    } else {
      smoother.reset();
    }
  }
}

std::vector<PositionEstimate> track_stream(std::span<const Frame> frames,
                                           const RigConfig& rig,
                                           const Calibration& cal,
                                           const DetectParams& p,
                                           const SmootherConfig& s) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].timestamp_ms() < frames[i - 1].timestamp_ms()) {
      throw InputError("track_stream: timestamp goes backwards at frame " +
                       std::to_string(frames[i].index()));
    }
  }
  std::vector<PositionEstimate> out;
  out.reserve(frames.size());
  for (const Frame& f : frames) out.push_back(track_frame(f, rig, cal, p));
  smooth_estimates(out, s);
  return out;
}

TimedRun track_stream_timed(std::span<const Frame> frames, const RigConfig& rig,
                            const Calibration& cal, const DetectParams& p,
                            const SmootherConfig& s) {
  const auto t0 = std::chrono::steady_clock::now();
  TimedRun run{track_stream(frames, rig, cal, p, s), 0.0};
  run.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return run;
}

Metrics evaluate(std::span<const PositionEstimate> estimates,
                 std::span<const SceneState> truth,
                 std::optional<double> elapsed_s) {
  if (estimates.size() != truth.size()) {
    throw InputError("evaluate: " + std::to_string(estimates.size()) +
                     " estimates vs " + std::to_string(truth.size()) +
                     " truth rows");
  }
  Metrics m;
  std::vector<double> errors;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& t = truth[i].user;
    const auto& e = estimates[i].pos;
    if (!t) {
      if (e) ++m.false_positives;
      continue;
    }
    ++m.eligible;
    if (!e) continue;
    ++m.detected;
    errors.push_back(std::hypot(e->x - t->x, e->z - t->z));
  }
  if (m.eligible > 0) {
    m.detection_rate =
        static_cast<double>(m.detected) / static_cast<double>(m.eligible);
  }
  if (!errors.empty()) {
    double sq = 0.0;
    std::size_t within = 0;
    for (double err : errors) {
      sq += err * err;
      if (err <= 10.0) ++within;
    }
    const auto n = static_cast<double>(errors.size());
    m.rms_error = std::sqrt(sq / n);
    std::sort(errors.begin(), errors.end());
    m.max_error = errors.back();
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * n));
    m.p95_error = errors[std::max<std::size_t>(rank, 1) - 1];
    m.within_10cm_fraction = static_cast<double>(within) / n;
  }
  if (elapsed_s && *elapsed_s > 0.0) {
    m.frames_per_second = static_cast<double>(estimates.size()) / *elapsed_s;
  }
  return m;
}

}  // namespace slt
