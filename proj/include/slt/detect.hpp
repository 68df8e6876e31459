#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "slt/frame.hpp"

namespace slt {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Back-wall reference row, frozen while the rig stays put.
struct Calibration {
  int v_b = 0;
  std::int64_t captured_at = 0;
  int width = 0;
  int height = 0;
};

/// Affine, clamped adaptive threshold: clamp(base + slope*(v - v_b), min, max).
struct DetectParams {
  double ath_base = 10.0;
  double ath_slope = 0.5;
  double ath_min = 5.0;
  double ath_max = 255.0;
  int min_run = 3;

  void validate() const;
};

struct Detection {
  double u_f = 0.0;  // intensity-weighted centroid column, absolute
  int v_f = 0;       // row of the selected run
  int run_len = 0;
  double mass = 0.0;  // summed gray levels over the run
  int u_start = 0;
};

/// v_b is the row with the largest intensity sum (first on ties). Throws
/// CalibrationError when no row stands out from the noise floor by more than
/// 3*sigma*width, sigma being a MAD estimate of per-pixel noise, or when the
/// row leaves no room for the edge test's neighbours.
Calibration calibrate(const Frame& frame);

double ath(double delta_v, const DetectParams& p);

/// Horizontal edge test at (u, v):
///   P(u,v) - (P(u,v+1) + P(u,v-1)) / 2 - ath(v - v_b) > 0.
/// Throws std::out_of_range unless v_b < v < height-1 and 0 <= u < width.
bool edge_test(const Frame& frame, int u, int v, const Calibration& cal,
               const DetectParams& p);

/// Scans rows below v_b, collects maximal per-row runs passing edge_test and
/// returns the centroid of the longest one (ties: larger v, then smaller
/// start column). Rows are scanned in parallel; the result matches
/// reference::detect_feet exactly.
std::optional<Detection> detect_feet(const Frame& frame, const Calibration& cal,
                                     const DetectParams& p);

/// Per-row intensity sums, parallel over rows.
std::vector<std::uint64_t> row_sums(const Frame& frame);

namespace reference {

// Serial, unoptimised forms of the kernels above. Kept for equivalence
// tests and the kernel benchmark.
std::optional<Detection> detect_feet(const Frame& frame, const Calibration& cal,
                                     const DetectParams& p);
std::vector<std::uint64_t> row_sums(const Frame& frame);

}  // namespace reference

}  // namespace slt
