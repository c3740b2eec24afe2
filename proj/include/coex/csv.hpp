#pragma once

// Small strict-CSV helper: comma-separated, first row is the header,
// no quoting or escaping (identifiers are token-safe by construction).

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coex {

// Shortest representation that round-trips exactly; keeps emitted files
// byte-stable across runs.
inline std::string csv_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
  int require_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw std::runtime_error("missing column '" + name + "'");
    return c;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    auto cells = split_csv_line(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size())
        throw std::runtime_error(path + ": row has " + std::to_string(cells.size()) +
                                 " cells, header has " + std::to_string(t.header.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw std::runtime_error(path + ": empty file");
  return t;
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace coex
