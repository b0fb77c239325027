#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "curvestream/feature.hpp"

namespace curvestream {

enum class StreamFormat { kBinary, kJsonl };

// Parses "binary"/"jsonl"; throws ConfigError otherwise.
StreamFormat parse_stream_format(std::string_view name);
std::string_view to_string(StreamFormat format) noexcept;

// Picks the format from a file extension: ".jsonl" is JSONL, anything else is
// binary.
StreamFormat format_for_path(std::string_view path) noexcept;

enum class DType : std::uint8_t { kFloat32 = 1 };

// Binary stream layout, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "CVST"
//   4       4     u32 version (1)
//   8       4     u32 dimension D (>= 2)
//   12      4     u32 frame count (0 = unknown, read to end of stream)
//   16      1     u8 dtype (1 = float32)
//   17      7     zero padding
//   24      ...   frames: u64 frame_id, f64 timestamp, D x f32 coordinates
struct StreamHeader {
  static constexpr std::array<char, 4> kMagic = {'C', 'V', 'S', 'T'};
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kSize = 24;

  std::uint32_t version = kVersion;
  std::uint32_t dimension = 0;
  std::uint32_t frame_count = 0;
  DType dtype = DType::kFloat32;

  std::size_t frame_stride() const noexcept {
    return 16 + 4 * static_cast<std::size_t>(dimension);
  }
};

// Sequential reader over a binary or JSONL feature stream. Every frame that
// comes out is L2-normalized and has a frame_id greater than its predecessor.
class StreamReader {
 public:
  // Binary streams have their header parsed here (FormatError if malformed).
  StreamReader(std::istream& source, StreamFormat format);

  // Returns the next frame, or nullopt at end of stream.
  std::optional<FrameFeature> next();

  // Zero until the first JSONL frame has been read.
  std::size_t dimension() const noexcept { return dimension_; }
  const std::optional<StreamHeader>& header() const noexcept { return header_; }

 private:
  std::optional<FrameFeature> next_binary();
  std::optional<FrameFeature> next_jsonl();
  void accept(FrameFeature& frame);

  std::istream& source_;
  StreamFormat format_;
  std::optional<StreamHeader> header_;
  std::size_t dimension_ = 0;
  std::size_t frames_read_ = 0;
  std::size_t line_number_ = 0;
  std::optional<std::uint64_t> last_id_;
};

std::vector<FrameFeature> read_stream(std::istream& source, StreamFormat format);

// Reads a whole file, choosing the format from the extension unless given.
// Throws IoError if the file cannot be opened.
std::vector<FrameFeature> read_stream_file(
    const std::string& path, std::optional<StreamFormat> format = std::nullopt);

// Writes `frames` and returns the number written. `dimension` is only needed
// for an empty binary stream (the header must still carry D); otherwise it is
// taken from the frames. Throws ArgumentError on mixed dimensions and IoError
// when the sink fails.
std::size_t write_stream(std::span<const FrameFeature> frames, std::ostream& sink,
                         StreamFormat format, std::size_t dimension = 0);

std::size_t write_stream_file(std::span<const FrameFeature> frames,
                              const std::string& path, StreamFormat format,
                              std::size_t dimension = 0);

}  // namespace curvestream
