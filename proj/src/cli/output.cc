#include "attn/cli/output.h"

#include <charconv>
#include <cmath>

#include "attn/errors.h"

namespace attn::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("cannot write " + path);
  write(header);
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) {
    throw Error("row with " + std::to_string(cells.size()) + " cells for " +
                std::to_string(columns_) + " columns in " + path_);
  }
  std::vector<std::string> fields;
  fields.reserve(cells.size());
  for (const auto& c : cells) fields.push_back(c.text());
  write(fields);
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error("failed writing " + path_);
}

void CsvWriter::write(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    const std::string& f = fields[k];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out_ << f;
    } else {
      out_ << '"';
      for (char ch : f) {
        if (ch == '"') out_ << '"';
        out_ << ch;
      }
      out_ << '"';
    }
  }
  out_ << '\n';
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace attn::cli
