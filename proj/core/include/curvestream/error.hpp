#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace curvestream {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to an operation (dimension mismatch, mixed dimensions, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (k1 >= k2, gamma outside (0,1), unknown strategy, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed stream header or JSONL record.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Stream payload inconsistent with its header or with earlier frames.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Raw vector norm below the zero threshold; the frame cannot be normalized.
class RejectedFrameError : public Error {
 public:
  RejectedFrameError(std::uint64_t frame_id, const std::string& what)
      : Error(what), frame_id_(frame_id) {}

  std::uint64_t frame_id() const noexcept { return frame_id_; }

 private:
  std::uint64_t frame_id_;
};

// Frames pushed out of order into the engine.
class SequencingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvestream
