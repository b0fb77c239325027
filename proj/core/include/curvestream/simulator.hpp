#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "curvestream/feature.hpp"

namespace curvestream {

// Synthetic feature trajectory on the unit hypersphere.
//
// Between transitions the trajectory moves along a great circle at a constant
// angular step of `drift_step` radians per frame. At a transition index k the
// displacement F[k] - F[k-1] is turned by exactly `turn_angle` relative to
// F[k-1] - F[k-2] into a freshly drawn direction, and motion continues on the
// new great circle. Consecutive chords of a great circle differ in direction
// by drift_step, so smooth frames have curvature 1 - cos(drift_step) and a
// transition frame has curvature 1 - cos(turn_angle).
//
// Noise: every coordinate gets N(0, (noise_sigma / sqrt(D))^2) and the vector
// is renormalized, so noise_sigma is the RMS norm of the perturbation
// independent of D.
struct SyntheticSpec {
  std::size_t dimension = 128;
  std::size_t total_frames = 500;
  std::vector<std::size_t> transitions;
  double drift_step = 0.02;
  double turn_angle = std::numbers::pi / 3.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

struct LabeledStream {
  std::vector<FrameFeature> frames;
  std::vector<std::size_t> ground_truth;
};

// Deterministic for a fixed spec. Frame ids are 0..n-1 and timestamps equal
// the frame id in seconds.
LabeledStream generate(const SyntheticSpec& spec);

// Draws `count` transition indices in [3, total_frames) with pairwise gaps of
// at least 4, uniformly over all such placements. Throws ConfigError when
// they do not fit.
std::vector<std::size_t> place_transitions(std::size_t count, std::size_t total_frames,
                                           std::uint64_t seed);

// Ground-truth sidecar: a JSON array of frame indices.
void write_ground_truth(const std::string& path, const std::vector<std::size_t>& truth);
std::vector<std::size_t> read_ground_truth(const std::string& path);

// Generator parameters as a JSON object (recorded next to generated streams
// and in evaluation manifests).
std::string spec_to_json(const SyntheticSpec& spec);
SyntheticSpec spec_from_json(const std::string& text);

}  // namespace curvestream
