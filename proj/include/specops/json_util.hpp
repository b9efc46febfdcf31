#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace specops {

// Serialized artifacts (spec snapshots, run records, reports) use ordered
// JSON so key order is canonical and golden files are byte-stable.
using Json = nlohmann::ordered_json;

Json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const Json& value);
std::string read_text_file(const std::filesystem::path& path);

/// Parses `text` as JSON; returns a discarded value on failure instead of throwing.
Json try_parse_json(const std::string& text);

} // namespace specops
