#include "curvestream/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "curvestream/error.hpp"

namespace curvestream {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key) + ": not a non-negative integer: '" +
                      std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  text = trim(text);
  if (text.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "capacity", "lambda",   "gamma",     "k1",       "k2",
      "transition_size", "high_side", "cost_high", "cost_low", "query_frames"};
  return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  EngineConfig& e = config.engine;
  if (key == "capacity") {
    e.capacity = parse_unsigned(key, value);
  } else if (key == "lambda") {
    e.lambda = parse_double(key, value);
  } else if (key == "gamma") {
    e.gamma = parse_double(key, value);
  } else if (key == "k1") {
    e.k1 = parse_double(key, value);
  } else if (key == "k2") {
    e.k2 = parse_double(key, value);
  } else if (key == "transition_size") {
    e.transition_size = static_cast<std::uint32_t>(parse_unsigned(key, value));
  } else if (key == "high_side") {
    e.high_side = static_cast<std::uint32_t>(parse_unsigned(key, value));
  } else if (key == "cost_high") {
    e.cost_high = parse_double(key, value);
  } else if (key == "cost_low") {
    if (trim(value).empty() || trim(value) == "auto") {
      e.cost_low.reset();
    } else {
      e.cost_low = parse_double(key, value);
    }
  } else if (key == "query_frames") {
    config.query_frames = parse_id_list(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig config_from_map(const std::map<std::string, std::string>& settings, RunConfig base) {
  for (const auto& [key, value] : settings) apply_setting(base, key, value);
  base.engine.validate();
  return base;
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    apply_setting(base, trim(content.substr(0, eq)), trim(content.substr(eq + 1)));
  }
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

std::string format_config(const RunConfig& config) {
  const EngineConfig& e = config.engine;
  std::ostringstream out;
  out << "capacity = " << e.capacity << '\n'
      << "lambda = " << format_number(e.lambda) << '\n'
      << "gamma = " << format_number(e.gamma) << '\n'
      << "k1 = " << format_number(e.k1) << '\n'
      << "k2 = " << format_number(e.k2) << '\n'
      << "transition_size = " << e.transition_size << '\n'
      << "high_side = " << e.high_side << '\n'
      << "cost_high = " << format_number(e.cost_high) << '\n'
      << "cost_low = " << format_number(e.effective_cost_low()) << '\n'
      << "query_frames = ";
  for (std::size_t i = 0; i < config.query_frames.size(); ++i) {
    if (i) out << ',';
    out << config.query_frames[i];
  }
  out << '\n';
  return out.str();
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> values;
  for (std::string_view part : split_commas(text)) values.push_back(parse_double("list", part));
  return values;
}

std::vector<std::uint64_t> parse_id_list(std::string_view text) {
  std::vector<std::uint64_t> ids;
  for (std::string_view part : split_commas(text)) {
    ids.push_back(parse_unsigned("query_frames", part));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace curvestream
