#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace bot {

/// Malformed input file. `what()` carries "<path>:<line>:<column>: <reason>" when a position is known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads and parses a UTF-8 JSON file, mapping syntax errors to ParseError with line context.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Writes `j` followed by a newline. Throws std::runtime_error if the path is unwritable.
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path, int indent = 2);

/// Line/column (1-based) of a byte offset within `text`.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte_offset);

}  // namespace bot
