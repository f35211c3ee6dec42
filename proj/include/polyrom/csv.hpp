#pragma once

#include <string>
#include <vector>

namespace polyrom {

// Shortest text that round-trips an f64 (17 significant digits).
std::string to_g17(double v);

// RFC-4180 style: fields quoted only when they contain comma/quote/newline.
std::string csv_field(const std::string& raw);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::string& text() const { return text_; }
  void save(const std::string& path) const;

 private:
  std::string text_;
  std::size_t n_cols_;
};

// Parses a CSV produced by CsvWriter (quotes honored). Returns rows including
// the header.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace polyrom
