#include "hte/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hte/common.hpp"

namespace hte {
namespace {

// One record per call; handles quoted fields spanning commas and newlines.
// Returns false at end of input. `line` tracks the record's starting line
// for error messages.
bool read_record(std::istream& in, std::vector<std::string>& fields,
                 std::size_t& line, std::size_t& next_line) {
  fields.clear();
  int c = in.peek();
  if (c == EOF) return false;
  line = next_line;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  while ((c = in.get()) != EOF) {
    any = true;
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++next_line;
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      ++next_line;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
      return true;
    } else {
      field += ch;
    }
  }
  if (!any) return false;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(field);
  return true;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  if (begin == end) return false;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quoted(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

FrameTable load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file: " + path);

  std::vector<std::string> header;
  std::size_t line = 1, next_line = 1;
  if (!read_record(in, header, line, next_line)) {
    throw ValidationError(path + ": empty file (header row is mandatory)");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (std::size_t j = i + 1; j < header.size(); ++j) {
      if (header[i] == header[j]) {
        throw ValidationError(path + ": duplicate header '" + header[i] + "'");
      }
    }
  }

  const std::size_t d = header.size();
  std::vector<std::vector<double>> columns(d);
  // Missing cells recorded as (col -> row positions) and patched after the
  // column means are known.
  std::vector<std::vector<std::size_t>> missing(d);
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (read_record(in, fields, line, next_line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() != d) {
      throw ValidationError(path + ": line " + std::to_string(line) + " has " +
                            std::to_string(fields.size()) + " cells, expected " +
                            std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0.0;
      if (fields[c] == options.missing_marker) {
        if (options.impute != CsvOptions::Impute::mean) {
          throw ValidationError(path + ": line " + std::to_string(line) +
                                ", column '" + header[c] +
                                "': missing value (enable mean imputation or fix the data)");
        }
        missing[c].push_back(row);
        v = std::nan("");
      } else if (!parse_double(fields[c], v)) {
        throw ValidationError(path + ": line " + std::to_string(line) +
                              ", column '" + header[c] + "': cannot parse '" +
                              fields[c] + "' as a number");
      }
      columns[c].push_back(v);
    }
    ++row;
  }
  if (row == 0) throw ValidationError(path + ": no data rows");

  for (std::size_t c = 0; c < d; ++c) {
    if (missing[c].empty()) continue;
    if (missing[c].size() == columns[c].size()) {
      throw ValidationError(path + ": column '" + header[c] +
                            "' is entirely missing; no mean to impute");
    }
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t mi = 0;
    for (std::size_t r = 0; r < columns[c].size(); ++r) {
      if (mi < missing[c].size() && missing[c][mi] == r) {
        ++mi;
        continue;
      }
      sum += columns[c][r];
      ++count;
    }
    double mean = sum / static_cast<double>(count);
    for (std::size_t r : missing[c]) columns[c][r] = mean;
  }

  return FrameTable(std::move(header), std::move(columns));
}

void write_table_csv(const std::string& path, const FrameTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV file: " + path);
  const auto& names = table.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << ',';
    out << quoted(names[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c) out << ',';
      out << format_double(table.column(c)[r]);
    }
    out << '\n';
  }
}

}  // namespace hte
