#include "curvestream/feature.hpp"

#include <cmath>
#include <string>

#include "curvestream/error.hpp"

namespace curvestream {

double l2_norm(std::span<const double> v) noexcept {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void normalize(std::vector<double>& v, std::uint64_t frame_id) {
  const double norm = l2_norm(v);
  if (!std::isfinite(norm)) {
    throw RejectedFrameError(
        frame_id, "frame " + std::to_string(frame_id) + ": non-finite vector");
  }
  if (norm < kZeroNormEpsilon) {
    throw RejectedFrameError(frame_id, "frame " + std::to_string(frame_id) +
                                           ": vector norm below zero threshold");
  }
  if (std::abs(norm - 1.0) <= kUnitNormTolerance) return;
  for (double& x : v) x /= norm;
}

}  // namespace curvestream
