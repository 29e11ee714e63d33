#include "text_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dmarket::detail {

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::vector<std::string>> parseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool fieldStarted = false;

  auto endField = [&] {
    row.push_back(field);
    field.clear();
    fieldStarted = false;
  };
  auto endRow = [&] {
    endField();
    bool allEmpty = true;
    for (const auto& f : row) {
      if (!f.empty()) allEmpty = false;
    }
    if (!(row.size() == 1 && allEmpty)) rows.push_back(row);
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!fieldStarted && field.empty()) {
          quoted = true;
          fieldStarted = true;
        } else {
          field += c;
        }
        break;
      case ',':
        endField();
        break;
      case '\r':
        break;
      case '\n':
        endRow();
        break;
      default:
        field += c;
        fieldStarted = true;
        break;
    }
  }
  if (fieldStarted || !field.empty() || !row.empty()) endRow();
  if (quoted) throw std::runtime_error("unterminated quote in CSV input");
  return rows;
}

}  // namespace dmarket::detail
