#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "gliomics/error.hpp"

namespace gliomics::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t CsvTable::require(const std::string& name) const {
  const int c = column(name);
  if (c < 0) fail(ErrorCode::ParseError, "missing column '" + name + "'");
  return static_cast<std::size_t>(c);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += sep;
    out += fields[i];
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      t.comments.push_back(s);
      continue;
    }
    if (s.find('"') != std::string::npos) {
      fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": quoted fields are not supported");
    }
    auto fields = split(s);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                      std::to_string(t.header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) fail(ErrorCode::ParseError, path.string() + ": no header row");
  return t;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_number(const std::string& text, const std::string& context) {
  if (text == "nan") return std::nan("");
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    fail(ErrorCode::ParseError, context + ": '" + text + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& text, const std::string& context) {
  int v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    fail(ErrorCode::ParseError, context + ": '" + text + "' is not an integer");
  }
  return v;
}

}  // namespace gliomics::cli
