#include <numeric>

#include "edge_kernel.hpp"
#include "slt/detect.hpp"

namespace slt::reference {

std::vector<std::uint64_t> row_sums(const Frame& frame) {
  std::vector<std::uint64_t> sums;
  for (int v = 0; v < frame.height(); ++v) {
    const auto row = frame.row(v);
    sums.push_back(std::accumulate(row.begin(), row.end(), std::uint64_t{0}));
  }
  return sums;
}

std::optional<Detection> detect_feet(const Frame& frame, const Calibration& cal,
                                     const DetectParams& p) {
  detail::check_dimensions(frame, cal);
  std::vector<Detection> runs;
  for (int v = cal.v_b + 1; v < frame.height() - 1; ++v) {
    if (v < 1) continue;
    int start = -1;
    for (int u = 0; u <= frame.width(); ++u) {
      const bool hit = u < frame.width() && edge_test(frame, u, v, cal, p);
      if (hit && start < 0) start = u;
      if (!hit && start >= 0) {
        if (u - start >= p.min_run) {
          runs.push_back(
              detail::summarise_run(frame.row(v).data(), v, start, u - start));
        }
        start = -1;
      }
    }
  }
  if (runs.empty()) return std::nullopt;
  Detection best = runs.front();
  for (const Detection& d : runs) {
    if (detail::better_run(d, best)) best = d;
  }
  return best;
}

}  // namespace slt::reference
