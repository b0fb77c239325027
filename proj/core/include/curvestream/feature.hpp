#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace curvestream {

// Raw vectors with a Euclidean norm below this are rejected at ingestion.
inline constexpr double kZeroNormEpsilon = 1e-8;

// Vectors whose norm is already within this distance of 1 are left untouched
// by normalize(), which makes ingestion idempotent across format round trips.
inline constexpr double kUnitNormTolerance = 1e-7;

// Curvature needs at least one direction orthogonal to the motion.
inline constexpr std::size_t kMinDimension = 2;

// One frame of a feature stream. Coordinates are kept in double precision in
// memory; the binary on-disk format stores them as float32.
struct FrameFeature {
  std::uint64_t frame_id = 0;
  double timestamp = 0.0;
  std::vector<double> vector;

  std::size_t dimension() const noexcept { return vector.size(); }

  friend bool operator==(const FrameFeature&, const FrameFeature&) = default;
};

double l2_norm(std::span<const double> v) noexcept;

// L2-normalizes `v` in place. Throws RejectedFrameError (carrying `frame_id`)
// when the norm is below kZeroNormEpsilon or not finite.
void normalize(std::vector<double>& v, std::uint64_t frame_id);

}  // namespace curvestream
