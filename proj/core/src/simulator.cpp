#include "curvestream/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <span>
#include <sstream>

#include "curvestream/error.hpp"
#include "curvestream/rng.hpp"
#include "json.hpp"

namespace curvestream {
namespace {

constexpr std::size_t kMinTransitionIndex = 3;
constexpr std::size_t kMinTransitionGap = 4;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

// v -= <v, basis> basis for a unit `basis`.
void remove_component(std::vector<double>& v, std::span<const double> basis) {
  const double c = dot(v, basis);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * basis[i];
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t dimension) {
  std::vector<double> v(dimension);
  for (double& x : v) x = rng.normal();
  return v;
}

// Random unit vector orthogonal to every vector in `basis` (assumed
// orthonormal). Gram-Schmidt is applied twice for accuracy.
std::vector<double> orthogonal_unit(Rng& rng, std::size_t dimension,
                                    std::initializer_list<std::span<const double>> basis) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<double> v = gaussian_vector(rng, dimension);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::span<const double> b : basis) remove_component(v, b);
    }
    const double norm = l2_norm(v);
    if (norm > 1e-6) {
      scale(v, 1.0 / norm);
      return v;
    }
  }
  throw ConfigError("could not draw an orthogonal direction");
}

// Point and unit tangent after `steps` steps of `angle` along the great circle
// through `origin` with tangent `tangent`.
void advance(std::span<const double> origin, std::span<const double> tangent, double angle,
             std::vector<double>& point, std::vector<double>& new_tangent) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  point.resize(origin.size());
  new_tangent.resize(origin.size());
  for (std::size_t i = 0; i < origin.size(); ++i) {
    point[i] = c * origin[i] + s * tangent[i];
    new_tangent[i] = -s * origin[i] + c * tangent[i];
  }
}

}  // namespace

void SyntheticSpec::validate() const {
  if (dimension < kMinDimension) throw ConfigError("dimension must be >= 2");
  if (total_frames < 1) throw ConfigError("total_frames must be >= 1");
  if (!std::isfinite(drift_step) || drift_step < 0.0 || drift_step >= std::numbers::pi / 2) {
    throw ConfigError("drift_step must lie in [0, pi/2)");
  }
  if (!std::isfinite(turn_angle) || turn_angle < 0.0 || turn_angle > std::numbers::pi) {
    throw ConfigError("turn_angle must lie in [0, pi]");
  }
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw ConfigError("noise_sigma must be finite and >= 0");
  }
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::size_t t = transitions[i];
    if (t < kMinTransitionIndex || t >= total_frames) {
      throw ConfigError("transition " + std::to_string(t) + " outside [3, total_frames)");
    }
    if (i > 0 && t < transitions[i - 1] + kMinTransitionGap) {
      throw ConfigError("transitions must be sorted with gaps of at least 4");
    }
  }
  if (!transitions.empty() && drift_step > 0.0) {
    // On the sphere the chord direction already turns by drift_step per frame;
    // a smaller turn is not realizable.
    if (turn_angle < drift_step) {
      throw ConfigError("turn_angle must be >= drift_step");
    }
    if (dimension < 3 && turn_angle != std::numbers::pi) {
      throw ConfigError("transitions need dimension >= 3");
    }
  }
}

LabeledStream generate(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t dim = spec.dimension;
  const double theta = spec.drift_step;
  Rng rng(spec.seed);

  std::vector<double> origin = gaussian_vector(rng, dim);
  scale(origin, 1.0 / l2_norm(origin));
  std::vector<double> tangent = orthogonal_unit(rng, dim, {origin});

  // Chord length c = 2 sin(theta/2). The incoming chord direction at the turn
  // point p is (c/2) p + sqrt(1 - c^2/4) T_in. The outgoing one is
  // -(c/2) p + sqrt(1 - c^2/4) u with u = a T_in + b n, n orthogonal to p and
  // T_in. Choosing a = (cos(turn) + c^2/4) / (1 - c^2/4) makes the two chord
  // directions meet at exactly `turn_angle`.
  const double half_chord_sq = std::pow(std::sin(theta / 2.0), 2);
  const double along =
      std::clamp((std::cos(spec.turn_angle) + half_chord_sq) / (1.0 - half_chord_sq), -1.0, 1.0);
  const double across = std::sqrt(std::max(0.0, 1.0 - along * along));

  LabeledStream out;
  out.ground_truth = spec.transitions;
  out.frames.reserve(spec.total_frames);
  const std::set<std::size_t> turns(spec.transitions.begin(), spec.transitions.end());

  std::size_t segment_start = 0;
  std::vector<double> point;
  std::vector<double> current_tangent;
  for (std::size_t k = 0; k < spec.total_frames; ++k) {
    if (turns.contains(k) && theta > 0.0) {
      advance(origin, tangent, static_cast<double>(k - 1 - segment_start) * theta, point,
              current_tangent);
      std::vector<double> fresh = across > 0.0
                                      ? orthogonal_unit(rng, dim, {point, current_tangent})
                                      : std::vector<double>(dim, 0.0);
      std::vector<double> turned(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        turned[i] = along * current_tangent[i] + across * fresh[i];
      }
      scale(turned, 1.0 / l2_norm(turned));
      origin = point;
      tangent = std::move(turned);
      segment_start = k - 1;
    }
    advance(origin, tangent, static_cast<double>(k - segment_start) * theta, point,
            current_tangent);
    FrameFeature frame;
    frame.frame_id = k;
    frame.timestamp = static_cast<double>(k);
    frame.vector = point;
    out.frames.push_back(std::move(frame));
  }

  if (spec.noise_sigma > 0.0) {
    const double per_coordinate = spec.noise_sigma / std::sqrt(static_cast<double>(dim));
    for (FrameFeature& frame : out.frames) {
      for (double& x : frame.vector) x += per_coordinate * rng.normal();
    }
  }
  for (FrameFeature& frame : out.frames) normalize(frame.vector, frame.frame_id);
  return out;
}

std::vector<std::size_t> place_transitions(std::size_t count, std::size_t total_frames,
                                           std::uint64_t seed) {
  if (count == 0) return {};
  const std::size_t reserved = kMinTransitionIndex + (kMinTransitionGap - 1) * (count - 1);
  if (total_frames < reserved || total_frames - reserved < count) {
    throw ConfigError(std::to_string(count) + " transitions do not fit in " +
                      std::to_string(total_frames) + " frames");
  }
  const std::size_t range = total_frames - reserved;

  // Floyd's algorithm: a uniformly random `count`-subset of [0, range).
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::set<std::size_t> chosen;
  for (std::size_t j = range - count; j < range; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::size_t> positions;
  std::size_t i = 0;
  for (std::size_t s : chosen) {
    positions.push_back(kMinTransitionIndex + s + (kMinTransitionGap - 1) * i++);
  }
  return positions;
}

void write_ground_truth(const std::string& path, const std::vector<std::size_t>& truth) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << nlohmann::json(truth).dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::size_t> read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    throw FormatError(path + ": ground truth must be a JSON array of indices");
  }
  std::vector<std::size_t> truth;
  for (const auto& x : j) {
    if (!x.is_number_unsigned()) throw FormatError(path + ": indices must be non-negative");
    truth.push_back(x.get<std::size_t>());
  }
  std::sort(truth.begin(), truth.end());
  return truth;
}

std::string spec_to_json(const SyntheticSpec& spec) {
  nlohmann::ordered_json j;
  j["dimension"] = spec.dimension;
  j["total_frames"] = spec.total_frames;
  j["transitions"] = spec.transitions;
  j["drift_step"] = spec.drift_step;
  j["turn_angle"] = spec.turn_angle;
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  return j.dump();
}

SyntheticSpec spec_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw FormatError("generator parameters must be a JSON object");
  try {
    SyntheticSpec spec;
    spec.dimension = j.at("dimension").get<std::size_t>();
    spec.total_frames = j.at("total_frames").get<std::size_t>();
    spec.transitions = j.at("transitions").get<std::vector<std::size_t>>();
    spec.drift_step = j.at("drift_step").get<double>();
    spec.turn_angle = j.at("turn_angle").get<double>();
    spec.noise_sigma = j.at("noise_sigma").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("generator parameters: ") + e.what());
  }
}

}  // namespace curvestream
