#include "slt/geometry.hpp"

#include <cmath>

namespace slt {

RigConfig::RigConfig(const Params& p) : p_(p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.d)) throw ConfigError("d", "rig: d must be > 0");
  if (!positive(p.f)) throw ConfigError("f", "rig: f must be > 0");
  if (!positive(p.z_b)) throw ConfigError("z_b", "rig: z_b must be > 0");
  if (p.width <= 0) throw ConfigError("width", "rig: width must be > 0");
  if (p.height <= 0) throw ConfigError("height", "rig: height must be > 0");
  if (!std::isfinite(p.u0) || p.u0 < 0.0 || p.u0 >= p.width) {
    throw ConfigError("u0", "rig: u0 must lie in [0, width)");
  }
  if (!std::isfinite(p.v0) || p.v0 < 0.0 || p.v0 >= p.height) {
    throw ConfigError("v0", "rig: v0 must lie in [0, height)");
  }
  const double wall = back_wall_row();
  if (wall < 0.0 || wall >= p.height) {
    throw ConfigError("height", "rig: back-wall row " + std::to_string(wall) +
                                    " falls outside the frame");
  }
}

double triangulate_depth(const RigConfig& rig, double v_f, double v_b) {
  const double df = rig.d() * rig.f();
  const double denom = df + rig.z_b() * (v_f - v_b);
  if (!(denom > 0.0)) {
    throw DomainError("triangulate_depth: reflection behind camera");
  }
  // Same quantity as d*f*z_b / denom, arranged so zero disparity yields z_b
  // bit-exactly.
  return rig.z_b() / (1.0 + rig.z_b() * (v_f - v_b) / df);
}

double triangulate_lateral(const RigConfig& rig, double u_f, double z_f) {
  return u_f * z_f / rig.f();
}

ImagePoint project(const RigConfig& rig, const WorldPosition& pos) {
  if (!(pos.z > 0.0)) throw DomainError("project: z must be > 0");
  return {rig.u0() + rig.f() * pos.x / pos.z,
          rig.v0() + rig.d() * rig.f() / pos.z};
}

double depth_resolution(const RigConfig& rig, double z) {
  return z * z / (rig.d() * rig.f());
}

}  // namespace slt
