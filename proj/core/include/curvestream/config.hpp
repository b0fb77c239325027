#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "curvestream/engine.hpp"

namespace curvestream {

// Full run configuration: engine hyperparameters plus the frames that carry a
// user query.
struct RunConfig {
  EngineConfig engine;
  std::vector<std::uint64_t> query_frames;
};

// Recognized keys, in the order format_config prints them.
const std::vector<std::string_view>& config_keys();

// Sets one field from its textual value. Throws ConfigError naming the key for
// an unknown key or an unparsable value. Cross-field constraints are not
// checked here; call validate().
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Applies every entry of `settings` on top of `base` and validates the result.
RunConfig config_from_map(const std::map<std::string, std::string>& settings,
                          RunConfig base = {});

// Parses "key = value" lines; blank lines and lines starting with '#' are
// ignored. Entries override `base`. Not validated.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

// Effective configuration in the same "key = value" format parse_config reads.
std::string format_config(const RunConfig& config);

// Shortest decimal form that round-trips to the same double.
std::string format_number(double value);

// Comma-separated lists ("0.2,0.4", "3,17").
std::vector<double> parse_number_list(std::string_view text);
std::vector<std::uint64_t> parse_id_list(std::string_view text);

}  // namespace curvestream
