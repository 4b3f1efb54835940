#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace eduspace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // -1 when the column is absent
  int column_index(const std::string& name) const;
};

// RFC 4180: comma-delimited, optional quoting, doubled quotes inside quoted
// fields, newlines allowed inside quoted fields, CRLF or LF line ends.
std::vector<std::vector<std::string>> parse_csv(const std::string& content);

CsvTable read_csv_file(const std::string& path);  // first row is the header

std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
};

// shortest-of formatting used in CSV artifacts: %.{sig}g
std::string format_double(double v, int significant_digits = 9);
std::string format_int(int64_t v);

}  // namespace eduspace
