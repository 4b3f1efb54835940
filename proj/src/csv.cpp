#include "eduspace/csv.hpp"

#include <cstdio>
#include <sstream>

#include "eduspace/error.hpp"

namespace eduspace {

int CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t i = 0;
  const size_t n = content.size();

  auto end_field = [&]() {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&]() {
    end_field();
    // skip rows that are entirely empty (trailing newline)
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row = {};
  };

  while (i < n) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else {
      if (c == '"' && field.empty() && !field_started) {
        in_quotes = true;
        field_started = true;
      } else if (c == ',') {
        end_field();
      } else if (c == '\r') {
        // swallow; LF handles the row break
      } else if (c == '\n') {
        end_row();
      } else {
        field.push_back(c);
        field_started = true;
      }
    }
    ++i;
  }
  if (in_quotes) throw Error(ErrorCode::ParseError, "unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto rows = parse_csv(ss.str());
  CsvTable table;
  if (!rows.empty()) {
    table.header = rows.front();
    table.rows.assign(rows.begin() + 1, rows.end());
  }
  return table;
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path);
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw Error(ErrorCode::IoError, "failed writing " + path_);
}

std::string format_double(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
  return buf;
}

std::string format_int(int64_t v) { return std::to_string(v); }

}  // namespace eduspace
