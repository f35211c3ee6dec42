#include "polyrom/csv.hpp"

#include <cstdio>
#include <fstream>

#include "polyrom/errors.hpp"

namespace polyrom {

std::string to_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : n_cols_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != n_cols_)
    throw IoError("csv: row width " + std::to_string(fields.size()) +
                  " != header width " + std::to_string(n_cols_));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_field(fields[i]);
  }
  text_ += '\n';
}

void CsvWriter::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f.write(text_.data(), static_cast<std::streamsize>(text_.size()));
  if (!f) throw IoError("write failed: " + path);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> cur;
  std::string field;
  bool quoted = false, had_any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
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
    if (c == '"' && field.empty()) {
      quoted = true;
      had_any = true;
    } else if (c == ',') {
      cur.push_back(std::move(field));
      field.clear();
      had_any = true;
    } else if (c == '\n') {
      if (had_any || !field.empty() || !cur.empty()) {
        cur.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(cur));
        cur.clear();
      }
      had_any = false;
    } else if (c != '\r') {
      field += c;
      had_any = true;
    }
  }
  if (had_any || !field.empty() || !cur.empty()) {
    cur.push_back(std::move(field));
    rows.push_back(std::move(cur));
  }
  if (quoted) throw IoError("csv: unterminated quote");
  return rows;
}

}  // namespace polyrom
