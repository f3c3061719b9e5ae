#ifndef ATTN_CLI_OUTPUT_H_
#define ATTN_CLI_OUTPUT_H_

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace attn::cli {

// Shortest decimal string that reads back to the same double; "inf", "-inf", "nan".
std::string format_number(double x);

// One CSV cell; quoted only when it contains a comma, quote or line break.
class Cell {
 public:
  Cell(double x) : text_(format_number(x)) {}
  Cell(int x) : text_(std::to_string(x)) {}
  Cell(long x) : text_(std::to_string(x)) {}
  Cell(unsigned long x) : text_(std::to_string(x)) {}
  Cell(unsigned long long x) : text_(std::to_string(x)) {}
  Cell(bool x) : text_(x ? "true" : "false") {}
  Cell(const char* s) : text_(s) {}
  Cell(std::string s) : text_(std::move(s)) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);
  const std::string& path() const { return path_; }
  void close();

 private:
  void write(const std::vector<std::string>& fields);

  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

std::vector<std::string> parse_csv_line(const std::string& line);

}  // namespace attn::cli

#endif  // ATTN_CLI_OUTPUT_H_
