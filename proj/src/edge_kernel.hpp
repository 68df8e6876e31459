#pragma once

#include <cstdint>

#include "slt/detect.hpp"

namespace slt::detail {

// Shared by the parallel and reference scans so both agree bit-for-bit.
inline bool edge_passes(std::uint8_t centre, std::uint8_t below,
                        std::uint8_t above, double threshold) {
  const double response =
      static_cast<double>(centre) -
      (static_cast<double>(below) + static_cast<double>(above)) / 2.0 -
      threshold;
  return response > 0.0;
}

// True when `a` should win over the current best `b`.
inline bool better_run(const Detection& a, const Detection& b) {
  if (a.run_len != b.run_len) return a.run_len > b.run_len;
  if (a.v_f != b.v_f) return a.v_f > b.v_f;
  return a.u_start < b.u_start;
}

// Centroid of pixels [start, start+len) on row v.
inline Detection summarise_run(const std::uint8_t* row, int v, int start,
                               int len) {
  double mass = 0.0;
  double moment = 0.0;
  for (int u = start; u < start + len; ++u) {
    mass += row[u];
    moment += static_cast<double>(u) * row[u];
  }
  Detection d;
  d.u_f = mass > 0.0 ? moment / mass : start + 0.5 * (len - 1);
  d.v_f = v;
  d.run_len = len;
  d.mass = mass;
  d.u_start = start;
  return d;
}

void check_dimensions(const Frame& frame, const Calibration& cal);

}  // namespace slt::detail
