#include "slt/detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "edge_kernel.hpp"
#include "slt/errors.hpp"

namespace slt {

namespace detail {

void check_dimensions(const Frame& frame, const Calibration& cal) {
  if (frame.width() != cal.width || frame.height() != cal.height) {
    throw ConfigError("calibration",
                      "frame is " + std::to_string(frame.width()) + "x" +
                          std::to_string(frame.height()) +
                          " but calibration was captured at " +
                          std::to_string(cal.width) + "x" +
                          std::to_string(cal.height));
  }
}

}  // namespace detail

namespace {

// Robust per-pixel noise estimate: 1.4826 * median absolute deviation.
double mad_sigma(const Frame& frame) {
  std::array<std::uint64_t, 256> hist{};
  for (std::uint8_t p : frame.pixels()) ++hist[p];
  const std::uint64_t n = frame.pixels().size();
  auto median_of = [&](const std::array<std::uint64_t, 256>& h) {
    std::uint64_t seen = 0;
    for (int i = 0; i < 256; ++i) {
      seen += h[i];
      if (2 * seen >= n) return i;
    }
    return 255;
  };
  const int med = median_of(hist);
  std::array<std::uint64_t, 256> dev{};
  for (int i = 0; i < 256; ++i) dev[std::abs(i - med)] += hist[i];
  return 1.4826 * median_of(dev);
}

}  // namespace

void DetectParams::validate() const {
  if (!(ath_min <= ath_max)) {
    throw ConfigError("ath_min", "detect: ath_min must be <= ath_max");
  }
  if (!(ath_min <= ath_base && ath_base <= ath_max)) {
    throw ConfigError("ath_base", "detect: ath_base must lie in [ath_min, ath_max]");
  }
  if (!(ath_slope >= 0.0)) {
    throw ConfigError("ath_slope", "detect: ath_slope must be >= 0");
  }
  if (min_run < 1) throw ConfigError("min_run", "detect: min_run must be >= 1");
}

std::vector<std::uint64_t> row_sums(const Frame& frame) {
  const int h = frame.height();
  std::vector<std::uint64_t> sums(h);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    const auto row = frame.row(v);
    sums[v] = std::accumulate(row.begin(), row.end(), std::uint64_t{0});
  }
  return sums;
}

Calibration calibrate(const Frame& frame) {
  const auto sums = row_sums(frame);
  const auto best = std::max_element(sums.begin(), sums.end());
  const double mean =
      static_cast<double>(std::accumulate(sums.begin(), sums.end(),
                                          std::uint64_t{0})) /
      static_cast<double>(sums.size());
  const double floor = 3.0 * mad_sigma(frame) * frame.width();
  if (!(static_cast<double>(*best) - mean > floor)) {
    throw CalibrationError("calibrate: no back-wall line stands out of the noise");
  }
  const int v_b = static_cast<int>(best - sums.begin());
  if (v_b <= 0 || v_b >= frame.height() - 1) {
    throw CalibrationError("calibrate: back-wall row " + std::to_string(v_b) +
                           " leaves no room for the edge test");
  }
  return {v_b, frame.timestamp_ms(), frame.width(), frame.height()};
}

double ath(double delta_v, const DetectParams& p) {
  return std::clamp(p.ath_base + p.ath_slope * delta_v, p.ath_min, p.ath_max);
}

bool edge_test(const Frame& frame, int u, int v, const Calibration& cal,
               const DetectParams& p) {
  if (u < 0 || u >= frame.width() || v <= cal.v_b || v >= frame.height() - 1) {
    throw std::out_of_range("edge_test: (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") outside the scan domain");
  }
  return detail::edge_passes(frame.at(u, v), frame.at(u, v + 1),
                             frame.at(u, v - 1), ath(v - cal.v_b, p));
}

std::optional<Detection> detect_feet(const Frame& frame, const Calibration& cal,
                                     const DetectParams& p) {
  detail::check_dimensions(frame, cal);
  const int first = std::max(cal.v_b + 1, 1);
  const int last = frame.height() - 2;
  if (first > last) return std::nullopt;
  const int width = frame.width();

  // Best run of each row, reduced serially so the outcome does not depend on
  // the schedule.
  std::vector<Detection> best(last - first + 1);
#pragma omp parallel for schedule(static)
  for (int v = first; v <= last; ++v) {
    const std::uint8_t* above = frame.row(v - 1).data();
    const std::uint8_t* row = frame.row(v).data();
    const std::uint8_t* below = frame.row(v + 1).data();
    const double threshold = ath(v - cal.v_b, p);
    Detection row_best;
    int u = 0;
    while (u < width) {
      if (!detail::edge_passes(row[u], below[u], above[u], threshold)) {
        ++u;
        continue;
      }
      const int start = u;
      while (u < width &&
             detail::edge_passes(row[u], below[u], above[u], threshold)) {
        ++u;
      }
      const int len = u - start;
      if (len >= p.min_run && len > row_best.run_len) {
        row_best = detail::summarise_run(row, v, start, len);
      }
    }
    best[v - first] = row_best;
  }

  std::optional<Detection> winner;
  for (const Detection& d : best) {
    if (d.run_len == 0) continue;
    if (!winner || detail::better_run(d, *winner)) winner = d;
  }
  return winner;
}

}  // namespace slt
