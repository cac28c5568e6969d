#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace trawl {

// Number with 17 significant digits.
std::string format_number(double v);

struct PathData {
  std::vector<double> t;
  std::vector<double> x;
  double tau = 1.0;
};

// `t,x` table with t = (i + 1) tau.
void write_path(std::ostream& out, const std::vector<double>& x, double tau);
// Reads a `t,x` table; tau is the common spacing of t. Throws CsvError.
PathData read_path(std::istream& in, const std::string& source = "path");
PathData load_path(const std::string& file);

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}
};

// Writes a header and rows of preformatted cells.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  void end_row();

 private:
  std::ostream& out_;
  std::size_t cols_;
  std::size_t in_row_ = 0;
};

}  // namespace trawl
