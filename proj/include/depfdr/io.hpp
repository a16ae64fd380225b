#pragma once

// Text formats: field CSV, sample CSV, result CSV, and the shared number
// formatting (shortest round-trip representation, '.' separator).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "depfdr/empirical_proc.hpp"
#include "depfdr/field_gen.hpp"
#include "depfdr/testing_procedures.hpp"

namespace depfdr::io {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) return "0";  // drops the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw FormatError("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t parse_unsigned(std::string_view s) {
  std::uint64_t v = 0;
  int base = 10;
  if (s.starts_with("0x") || s.starts_with("0X")) {
    s.remove_prefix(2);
    base = 16;
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
    throw FormatError("not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// "50x50" -> {50, 50}.
inline std::vector<std::size_t> parse_dims(std::string_view s) {
  std::vector<std::size_t> dims;
  for (const auto& part : split(s, 'x')) {
    const auto v = parse_unsigned(part);
    if (v == 0) throw FormatError("dimensions must be positive");
    dims.push_back(static_cast<std::size_t>(v));
  }
  return dims;
}

/// One row of comma-separated cells.
class CsvRow {
 public:
  CsvRow& operator<<(double v) { return add(format_double(v)); }
  CsvRow& operator<<(std::size_t v) { return add(std::to_string(v)); }
  CsvRow& operator<<(int v) { return add(std::to_string(v)); }
  CsvRow& operator<<(bool v) { return add(v ? "1" : "0"); }
  CsvRow& operator<<(const std::string& v) { return add(v); }
  CsvRow& operator<<(const char* v) { return add(v); }
  CsvRow& operator<<(const std::optional<double>& v) { return v ? (*this << *v) : add("NA"); }
  CsvRow& operator<<(const std::optional<std::size_t>& v) { return v ? (*this << *v) : add("NA"); }

  std::string str() const { return line_ + "\n"; }

 private:
  CsvRow& add(const std::string& cell) {
    if (!first_) line_ += ',';
    line_ += cell;
    first_ = false;
    return *this;
  }
  std::string line_;
  bool first_ = true;
};

// ---------------------------------------------------------------------------
// Fields: header "dims=<n1>x<n2>...", then one 0/1 value per line.

inline void write_field_csv(std::ostream& out, const HypothesisField& field) {
  out << "dims=" << dims_to_string(field.dims()) << '\n';
  for (std::uint8_t v : field.values()) out << (v ? '1' : '0') << '\n';
}

inline HypothesisField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("field file is empty");
  line = trim(line);
  if (!line.starts_with("dims=")) throw FormatError("field file must start with 'dims=<n1>x<n2>...'");
  auto dims = parse_dims(std::string_view(line).substr(5));
  std::vector<std::uint8_t> values;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line == "0") values.push_back(0);
    else if (line == "1") values.push_back(1);
    else throw FormatError("field values must be 0 or 1, got '" + line + "'");
  }
  if (values.size() != dims_volume(dims)) throw FormatError("field value count does not match its dims header");
  return {std::move(dims), std::move(values), {"file", "", 0}};
}

// ---------------------------------------------------------------------------
// Samples: header "h,x" (or "x" alone), one row per site.

inline void write_sample_csv(std::ostream& out, const PValueSample& s) {
  if (s.has_truth()) {
    out << "h,x\n";
    for (std::size_t i = 0; i < s.size(); ++i)
      out << static_cast<int>(s.truth()[i]) << ',' << format_double(s.pvalues()[i]) << '\n';
  } else {
    out << "x\n";
    for (double x : s.pvalues()) out << format_double(x) << '\n';
  }
}

inline PValueSample read_sample_csv(std::istream& in, std::vector<std::size_t> dims = {}) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("sample file is empty");
  const auto header = split(trim(line), ',');
  std::optional<std::size_t> h_col, x_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "h") h_col = c;
    else if (header[c] == "x") x_col = c;
    else throw FormatError("unknown sample column '" + header[c] + "'");
  }
  if (!x_col) throw FormatError("sample file needs an 'x' column");
  std::vector<std::uint8_t> h;
  std::vector<double> x;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw FormatError("ragged sample row: '" + line + "'");
    x.push_back(parse_double(cells[*x_col]));
    if (h_col) {
      if (cells[*h_col] == "0") h.push_back(0);
      else if (cells[*h_col] == "1") h.push_back(1);
      else throw FormatError("truth labels must be 0 or 1");
    }
  }
  if (h_col) return {std::move(h), std::move(x), std::move(dims)};
  return PValueSample(std::move(x), std::move(dims));
}

// ---------------------------------------------------------------------------
// Results: one row per procedure run.

inline const char* kResultHeader = "run_id,procedure,n,alpha,R,V,FDP,FNP,nu,pi0_hat_raw,pi0_hat,threshold\n";

inline std::string result_row(const std::string& run_id, const TestResult& r) {
  CsvRow row;
  row << run_id << to_string(r.procedure) << r.n << r.alpha << r.R << r.V << r.FDP << r.FNP << r.nu
      << r.pi0_hat_raw << r.pi0_hat << r.threshold;
  return row.str();
}

// ---------------------------------------------------------------------------
// Whole-file helpers.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace depfdr::io
