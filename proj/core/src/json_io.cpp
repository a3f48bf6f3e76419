#include "bot/json_io.hpp"

#include <fstream>
#include <sstream>

namespace bot {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte_offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte_offset, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte is one past the offending character
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << path.string() << ":" << line << ":" << column << ": invalid JSON";
    throw ParseError(msg.str());
  }
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path, int indent) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  out << j.dump(indent) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace bot
