#include "trawl/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace trawl {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_path(std::ostream& out, const std::vector<double>& x, double tau) {
  out << "t,x\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << format_number(double(i + 1) * tau) << ',' << format_number(x[i]) << '\n';
}

namespace {

double parse_cell(const std::string& s, const std::string& source, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw CsvError(source, line, "not a number: '" + s + "'");
  }
  while (used < s.size() && (s[used] == ' ' || s[used] == '\r')) ++used;
  if (used != s.size()) throw CsvError(source, line, "not a number: '" + s + "'");
  if (!std::isfinite(v)) throw CsvError(source, line, "non-finite value");
  return v;
}

}  // namespace

PathData read_path(std::istream& in, const std::string& source) {
  std::string line;
  int ln = 0;
  if (!std::getline(in, line)) throw CsvError(source, 1, "empty file");
  ++ln;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x") throw CsvError(source, ln, "expected header 't,x'");
  PathData d;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = line.find(',');
    if (c == std::string::npos || line.find(',', c + 1) != std::string::npos)
      throw CsvError(source, ln, "expected two columns");
    d.t.push_back(parse_cell(line.substr(0, c), source, ln));
    d.x.push_back(parse_cell(line.substr(c + 1), source, ln));
  }
  if (d.x.size() < 2) throw CsvError(source, ln, "need at least two observations");
  d.tau = (d.t.back() - d.t.front()) / double(d.t.size() - 1);
  if (!(d.tau > 0.0)) throw CsvError(source, 2, "time column must increase");
  for (std::size_t i = 1; i < d.t.size(); ++i)
    if (std::abs(d.t[i] - d.t[i - 1] - d.tau) > 1e-6 * d.tau)
      throw CsvError(source, int(i) + 2, "time column is not equally spaced");
  return d;
}

PathData load_path(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CsvError(file, 0, "cannot open file");
  return read_path(in, file);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), cols_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  out_ << (in_row_++ ? "," : "") << s;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (in_row_ != cols_) throw std::logic_error("csv row has the wrong number of cells");
  out_ << '\n';
  in_row_ = 0;
}

}  // namespace trawl
