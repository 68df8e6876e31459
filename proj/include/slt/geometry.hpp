#pragma once

#include "slt/errors.hpp"

namespace slt {

/// Camera + line-laser rig. The laser sits `d` cm below the camera and both
/// optical axes are parallel to the floor. Image coordinates: u grows to the
/// right, v grows downward, so reflections closer than the back wall image
/// below the back-wall line.
class RigConfig {
 public:
  struct Params {
    double d = 40.0;     // cm
    double f = 400.0;    // focal length, pixels
    double z_b = 400.0;  // camera to back wall, cm
    int width = 320;
    int height = 240;
    double u0 = 160.0;
    double v0 = 120.0;
  };

  RigConfig() : RigConfig(Params{}) {}
  explicit RigConfig(const Params& p);

  double d() const noexcept { return p_.d; }
  double f() const noexcept { return p_.f; }
  double z_b() const noexcept { return p_.z_b; }
  int width() const noexcept { return p_.width; }
  int height() const noexcept { return p_.height; }
  double u0() const noexcept { return p_.u0; }
  double v0() const noexcept { return p_.v0; }
  const Params& params() const noexcept { return p_; }

  /// Sub-pixel row of the unobstructed back-wall line.
  double back_wall_row() const noexcept { return p_.v0 + p_.d * p_.f / p_.z_b; }

 private:
  Params p_;
};

/// Floor-plane position: x lateral (positive right of the optical axis),
/// z depth from the camera. Both in cm.
struct WorldPosition {
  double x = 0.0;
  double z = 0.0;
};

/// Real-valued image coordinates in pixels.
struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
};

/// Depth of a reflection imaged at row `v_f` given the back-wall row `v_b`.
/// Throws DomainError when d*f + z_b*(v_f - v_b) <= 0.
double triangulate_depth(const RigConfig& rig, double v_f, double v_b);

/// Lateral offset of a reflection at column offset `u_f` (raw column minus
/// u0) and depth `z_f`.
double triangulate_lateral(const RigConfig& rig, double u_f, double z_f);

/// Inverse of the two triangulation routes. Throws DomainError for z <= 0.
ImagePoint project(const RigConfig& rig, const WorldPosition& pos);

/// Depth change per one-pixel change of v_f at depth z: z^2 / (d*f).
double depth_resolution(const RigConfig& rig, double z);

}  // namespace slt
