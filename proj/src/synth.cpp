#include "slt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace slt {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t row_seed(std::uint64_t seed, std::int64_t index, int row) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(index));
  return splitmix64(h ^ static_cast<std::uint64_t>(row));
}

// Adds a horizontal line of `intensity` centred on sub-pixel row `v` over
// `cols`, optionally spread vertically.
void add_line(std::vector<double>& signal, int width, int height, double v,
              const std::vector<int>& cols, double intensity,
              double line_sigma) {
  const int centre = static_cast<int>(std::lround(v));
  const int reach =
      line_sigma > 0.0 ? static_cast<int>(std::ceil(2.0 * line_sigma)) : 0;
  for (int dv = -reach; dv <= reach; ++dv) {
    const int row = centre + dv;
    if (row < 0 || row >= height) continue;
    const double w =
        reach == 0 ? 1.0
                   : std::exp(-0.5 * dv * dv / (line_sigma * line_sigma));
    double* out = signal.data() + static_cast<std::size_t>(row) * width;
    for (int c : cols) out[c] += w * intensity;
  }
}

bool in_frame_row(double v, int height) {
  const long r = std::lround(v);
  return r >= 0 && r < height;
}

}  // namespace

void NoiseParams::validate() const {
  if (!(background_sigma >= 0.0)) {
    throw ConfigError("background_sigma", "noise: background_sigma must be >= 0");
  }
  if (!(background_mean >= 0.0 && background_mean <= 255.0)) {
    throw ConfigError("background_mean",
                      "noise: background_mean must lie in [0, 255]");
  }
}

void IntensityModel::validate() const {
  if (!(i_ref > 0.0 && i_ref <= 255.0)) {
    throw ConfigError("i_ref", "intensity: i_ref must lie in (0, 255]");
  }
  if (!(z_ref > 0.0)) throw ConfigError("z_ref", "intensity: z_ref must be > 0");
}

void RenderOptions::validate() const {
  if (!(line_sigma >= 0.0) || !std::isfinite(line_sigma)) {
    throw ConfigError("line_sigma", "render: line_sigma must be >= 0");
  }
}

double intensity_at(const IntensityModel& im, double z) {
  const double r = im.z_ref / z;
  return std::clamp(im.i_ref * r * r, 0.0, 255.0);
}

ColumnSpan foot_columns(const RigConfig& rig, double x, double z,
                        double width_cm) {
  const double u = rig.u0() + rig.f() * x / z;
  const double half = 0.5 * width_cm * rig.f() / z;
  // Pixel c is covered when its centre lies inside [u - half, u + half].
  double lo = std::ceil(u - half);
  double hi = std::floor(u + half);
  lo = std::max(lo, 0.0);
  hi = std::min(hi, static_cast<double>(rig.width() - 1));
  if (lo > hi) return {};
  return {static_cast<int>(lo), static_cast<int>(hi)};
}

Frame render(const RigConfig& rig, const SceneState& scene,
             const NoiseParams& noise, const IntensityModel& im,
             std::int64_t index, const RenderOptions& opts) {
  const int width = rig.width();
  const int height = rig.height();
  std::vector<double> signal(static_cast<std::size_t>(width) * height, 0.0);
  std::vector<bool> occluded(width, false);

  if (scene.user) {
    const WorldPosition& pos = *scene.user;
    if (!(pos.z > 0.0)) throw DomainError("render: user z must be > 0");
    std::vector<double> centres;
    if (scene.feet_gap) {
      const double offset = 0.5 * (scene.foot_width + *scene.feet_gap);
      centres = {pos.x - offset, pos.x + offset};
    } else {
      centres = {pos.x};
    }
    const double v = project(rig, pos).v;
    const double level = intensity_at(im, pos.z);
    for (double cx : centres) {
      const ColumnSpan span = foot_columns(rig, cx, pos.z, scene.foot_width);
      std::vector<int> cols;
      for (int c = span.first; c <= span.last; ++c) {
        cols.push_back(c);
        occluded[c] = true;
      }
      if (in_frame_row(v, height)) {
        add_line(signal, width, height, v, cols, level, opts.line_sigma);
      }
    }
  }

  std::vector<int> wall_cols;
  for (int c = 0; c < width; ++c) {
    if (!occluded[c]) wall_cols.push_back(c);
  }
  add_line(signal, width, height, rig.back_wall_row(), wall_cols,
           intensity_at(im, rig.z_b()), opts.line_sigma);

  Frame frame(width, height, scene.timestamp_ms, index);
  const bool noisy = noise.background_sigma > 0.0;

#pragma omp parallel for schedule(static)
  for (int v = 0; v < height; ++v) {
    std::mt19937_64 rng(row_seed(noise.seed, index, v));
    std::normal_distribution<double> gauss(
        noise.background_mean, noisy ? noise.background_sigma : 1.0);
    const double* sig = signal.data() + static_cast<std::size_t>(v) * width;
    auto out = frame.row(v);
    for (int u = 0; u < width; ++u) {
      const double bg = noisy ? std::clamp(gauss(rng), 0.0, 255.0)
                              : noise.background_mean;
      const double value = std::clamp(bg + sig[u], 0.0, 255.0);
      out[u] = static_cast<std::uint8_t>(std::lround(value));
    }
  }
  return frame;
}

std::vector<SceneState> make_trajectory(const TrajectorySpec& spec,
                                        const RigConfig& rig) {
  if (!(spec.rate_hz > 0.0)) {
    throw ConfigError("rate_hz", "trajectory: rate_hz must be > 0");
  }
  if (!(spec.duration_s > 0.0)) {
    throw ConfigError("duration_s", "trajectory: duration_s must be > 0");
  }
  if (!(spec.foot_width > 0.0)) {
    throw ConfigError("foot_width", "trajectory: foot_width must be > 0");
  }
  if (spec.kind == TrajectoryKind::circle && !(spec.radius >= 0.0)) {
    throw ConfigError("radius", "trajectory: radius must be >= 0");
  }
  const auto count =
      static_cast<std::int64_t>(std::llround(spec.rate_hz * spec.duration_s));
  if (count <= 0) {
    throw ConfigError("duration_s", "trajectory: produces no frames");
  }
  const double period = spec.period_s > 0.0 ? spec.period_s : spec.duration_s;

  std::vector<SceneState> states;
  states.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / spec.rate_hz;
    WorldPosition p;
    switch (spec.kind) {
      case TrajectoryKind::stationary:
        p = spec.position;
        break;
      case TrajectoryKind::stroll: {
        const double s = std::fmod(t, period) / period;
        const double k = s < 0.5 ? 2.0 * s : 2.0 - 2.0 * s;
        p = {spec.start.x + k * (spec.end.x - spec.start.x),
             spec.start.z + k * (spec.end.z - spec.start.z)};
        break;
      }
      case TrajectoryKind::circle: {
        const double a = 2.0 * std::numbers::pi * t / period;
        p = {spec.center.x + spec.radius * std::cos(a),
             spec.center.z + spec.radius * std::sin(a)};
        if (spec.radius == 0.0) p = spec.center;
        break;
      }
    }
    if (!(p.z > 0.0 && p.z <= rig.z_b())) {
      throw ConfigError("trajectory", "trajectory: position z=" +
                                          std::to_string(p.z) +
                                          " leaves the workspace (0, z_b]");
    }
    SceneState s;
    s.user = p;
    s.foot_width = spec.foot_width;
    s.feet_gap = spec.feet_gap;
    s.timestamp_ms = std::llround(static_cast<double>(i) * 1000.0 / spec.rate_hz);
    states.push_back(s);
  }
  return states;
}

}  // namespace slt
