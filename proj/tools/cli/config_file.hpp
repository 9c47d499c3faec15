#pragma once

#include <chorin/study.hpp>

#include <string>
#include <vector>

namespace chorin::cli {

/// Reads an INI-style file ("[section]" headers, "key = value" lines, ';' or
/// '#' comments) into "section.key" pairs. Files ending in ".json" are read as
/// study summaries and their "config" object is used instead.
KeyValueConfig read_config_file(const std::string& path);

/// Parses "section.key=value" overrides.
KeyValueConfig parse_overrides(const std::vector<std::string>& items);

/// Serializes a config back into the INI grammar.
std::string to_ini(const KeyValueConfig& config);

}  // namespace chorin::cli
