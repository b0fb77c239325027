#include "curvestream/feature_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "curvestream/error.hpp"
#include "json.hpp"

namespace curvestream {
namespace {

using Json = nlohmann::ordered_json;

void put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_u64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

// Reads up to n bytes; returns how many were actually read.
std::size_t read_bytes(std::istream& in, std::uint8_t* out, std::size_t n) {
  in.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

StreamHeader parse_header(std::istream& in) {
  std::array<std::uint8_t, StreamHeader::kSize> raw{};
  if (read_bytes(in, raw.data(), raw.size()) != raw.size()) {
    throw FormatError("stream header truncated");
  }
  if (std::memcmp(raw.data(), StreamHeader::kMagic.data(), 4) != 0) {
    throw FormatError("bad magic: expected \"CVST\"");
  }
  StreamHeader header;
  header.version = get_u32(raw.data() + 4);
  header.dimension = get_u32(raw.data() + 8);
  header.frame_count = get_u32(raw.data() + 12);
  if (header.version != StreamHeader::kVersion) {
    throw FormatError("unsupported stream version " + std::to_string(header.version));
  }
  if (header.dimension < kMinDimension) {
    throw FormatError("stream dimension " + std::to_string(header.dimension) +
                      " is below the minimum of 2");
  }
  if (raw[16] != static_cast<std::uint8_t>(DType::kFloat32)) {
    throw FormatError("unsupported dtype " + std::to_string(raw[16]));
  }
  return header;
}

}  // namespace

StreamFormat parse_stream_format(std::string_view name) {
  if (name == "binary") return StreamFormat::kBinary;
  if (name == "jsonl") return StreamFormat::kJsonl;
  throw ConfigError("unknown stream format '" + std::string(name) +
                    "' (expected binary or jsonl)");
}

std::string_view to_string(StreamFormat format) noexcept {
  return format == StreamFormat::kBinary ? "binary" : "jsonl";
}

StreamFormat format_for_path(std::string_view path) noexcept {
  return path.ends_with(".jsonl") ? StreamFormat::kJsonl : StreamFormat::kBinary;
}

StreamReader::StreamReader(std::istream& source, StreamFormat format)
    : source_(source), format_(format) {
  if (format_ == StreamFormat::kBinary) {
    header_ = parse_header(source_);
    dimension_ = header_->dimension;
  }
}

std::optional<FrameFeature> StreamReader::next() {
  return format_ == StreamFormat::kBinary ? next_binary() : next_jsonl();
}

void StreamReader::accept(FrameFeature& frame) {
  if (last_id_ && frame.frame_id <= *last_id_) {
    throw CorruptionError("frame_id " + std::to_string(frame.frame_id) +
                          " does not increase over " + std::to_string(*last_id_));
  }
  if (!std::isfinite(frame.timestamp) || frame.timestamp < 0.0) {
    throw CorruptionError("frame " + std::to_string(frame.frame_id) +
                          ": timestamp must be finite and non-negative");
  }
  normalize(frame.vector, frame.frame_id);
  last_id_ = frame.frame_id;
  ++frames_read_;
}

std::optional<FrameFeature> StreamReader::next_binary() {
  if (header_->frame_count != 0 && frames_read_ == header_->frame_count) {
    return std::nullopt;
  }
  const std::size_t stride = header_->frame_stride();
  std::vector<std::uint8_t> raw(stride);
  const std::size_t got = read_bytes(source_, raw.data(), stride);
  if (got == 0) {
    if (header_->frame_count != 0) {
      throw CorruptionError("stream ended after " + std::to_string(frames_read_) +
                            " of " + std::to_string(header_->frame_count) + " frames");
    }
    return std::nullopt;
  }
  if (got != stride) {
    throw CorruptionError("truncated frame record after frame " +
                          std::to_string(frames_read_) +
                          " (payload does not match dimension " +
                          std::to_string(dimension_) + ")");
  }

  FrameFeature frame;
  frame.frame_id = get_u64(raw.data());
  frame.timestamp = std::bit_cast<double>(get_u64(raw.data() + 8));
  frame.vector.resize(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) {
    frame.vector[i] = std::bit_cast<float>(get_u32(raw.data() + 16 + 4 * i));
  }
  accept(frame);
  return frame;
}

std::optional<FrameFeature> StreamReader::next_jsonl() {
  std::string line;
  while (std::getline(source_, line)) {
    ++line_number_;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    const std::string where = "line " + std::to_string(line_number_);
    Json record = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      throw FormatError(where + ": not a JSON object");
    }
    if (!record.contains("id") || !record["id"].is_number_unsigned()) {
      throw FormatError(where + ": \"id\" must be a non-negative integer");
    }
    if (!record.contains("t") || !record["t"].is_number()) {
      throw FormatError(where + ": \"t\" must be a number");
    }
    if (!record.contains("vec") || !record["vec"].is_array()) {
      throw FormatError(where + ": \"vec\" must be an array");
    }

    FrameFeature frame;
    frame.frame_id = record["id"].get<std::uint64_t>();
    frame.timestamp = record["t"].get<double>();
    const Json& vec = record["vec"];
    frame.vector.reserve(vec.size());
    for (const Json& x : vec) {
      if (!x.is_number()) throw FormatError(where + ": \"vec\" entries must be numbers");
      frame.vector.push_back(x.get<double>());
    }

    if (dimension_ == 0) {
      if (frame.dimension() < kMinDimension) {
        throw FormatError(where + ": dimension " + std::to_string(frame.dimension()) +
                          " is below the minimum of 2");
      }
      dimension_ = frame.dimension();
    } else if (frame.dimension() != dimension_) {
      throw CorruptionError(where + ": dimension " + std::to_string(frame.dimension()) +
                            " differs from stream dimension " + std::to_string(dimension_));
    }
    accept(frame);
    return frame;
  }
  if (source_.bad()) throw IoError("read failure");
  return std::nullopt;
}

std::vector<FrameFeature> read_stream(std::istream& source, StreamFormat format) {
  StreamReader reader(source, format);
  std::vector<FrameFeature> frames;
  while (auto frame = reader.next()) frames.push_back(std::move(*frame));
  return frames;
}

std::vector<FrameFeature> read_stream_file(const std::string& path,
                                           std::optional<StreamFormat> format) {
  const StreamFormat fmt = format.value_or(format_for_path(path));
  std::ifstream in(path, fmt == StreamFormat::kBinary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path);
  return read_stream(in, fmt);
}

std::size_t write_stream(std::span<const FrameFeature> frames, std::ostream& sink,
                         StreamFormat format, std::size_t dimension) {
  if (!frames.empty()) {
    if (dimension == 0) dimension = frames.front().dimension();
    for (const FrameFeature& f : frames) {
      if (f.dimension() != dimension) {
        throw ArgumentError("frame " + std::to_string(f.frame_id) + " has dimension " +
                            std::to_string(f.dimension()) + ", expected " +
                            std::to_string(dimension));
      }
    }
  }

  if (format == StreamFormat::kBinary) {
    if (dimension < kMinDimension) {
      throw ArgumentError("binary stream needs a dimension of at least 2");
    }
    std::array<std::uint8_t, StreamHeader::kSize> header{};
    std::memcpy(header.data(), StreamHeader::kMagic.data(), 4);
    put_u32(header.data() + 4, StreamHeader::kVersion);
    put_u32(header.data() + 8, static_cast<std::uint32_t>(dimension));
    put_u32(header.data() + 12, static_cast<std::uint32_t>(frames.size()));
    header[16] = static_cast<std::uint8_t>(DType::kFloat32);
    sink.write(reinterpret_cast<const char*>(header.data()), header.size());

    std::vector<std::uint8_t> raw(16 + 4 * dimension);
    for (const FrameFeature& f : frames) {
      put_u64(raw.data(), f.frame_id);
      put_u64(raw.data() + 8, std::bit_cast<std::uint64_t>(f.timestamp));
      for (std::size_t i = 0; i < dimension; ++i) {
        put_u32(raw.data() + 16 + 4 * i,
                std::bit_cast<std::uint32_t>(static_cast<float>(f.vector[i])));
      }
      sink.write(reinterpret_cast<const char*>(raw.data()),
                 static_cast<std::streamsize>(raw.size()));
    }
  } else {
    for (const FrameFeature& f : frames) {
      Json record;
      record["id"] = f.frame_id;
      record["t"] = f.timestamp;
      record["vec"] = f.vector;
      sink << record.dump() << '\n';
    }
  }
  sink.flush();
  if (!sink) throw IoError("stream write failed");
  return frames.size();
}

std::size_t write_stream_file(std::span<const FrameFeature> frames, const std::string& path,
                              StreamFormat format, std::size_t dimension) {
  std::ofstream out(path, format == StreamFormat::kBinary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return write_stream(frames, out, format, dimension);
}

}  // namespace curvestream
