#ifndef PFLACG_TRACE_HPP_
#define PFLACG_TRACE_HPP_

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pflacg/types.hpp"

namespace pflacg {

/// One row of a run trace. Doubles are rendered in shortest round-trip
/// decimal form (at most 17 significant digits), so write-then-parse
/// reproduces the record exactly.
struct RunRecord {
  std::string algorithm;
  long run_id = 0;
  long iteration = 0;
  double elapsed_s = 0.0;
  double f_value = 0.0;
  double wolfe_gap = 0.0;
  long active_set_size = 0;
  int restart = 0;
  long epoch = 0;
  std::int64_t lmo_calls = 0;
  std::int64_t foo_calls = 0;

  bool operator==(const RunRecord&) const = default;
};

inline constexpr const char* kCsvHeader =
    "algorithm,run_id,iteration,elapsed_s,f_value,wolfe_gap,active_set_size,"
    "restart,epoch,lmo_calls,foo_calls";

namespace detail {

inline std::string csv_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// from_chars rather than stod: subnormals must parse back, not throw.
inline double parse_csv_double(const std::string& s) {
  double v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ptr != s.data() + s.size() || ec == std::errc::invalid_argument) {
    throw InputError("csv: bad floating-point field '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline void write_csv_header(std::ostream& os) { os << kCsvHeader << "\n"; }

inline void write_csv_row(std::ostream& os, const RunRecord& r) {
  os << r.algorithm << ',' << r.run_id << ',' << r.iteration << ','
     << detail::csv_double(r.elapsed_s) << ',' << detail::csv_double(r.f_value)
     << ',' << detail::csv_double(r.wolfe_gap) << ',' << r.active_set_size
     << ',' << r.restart << ',' << r.epoch << ',' << r.lmo_calls << ','
     << r.foo_calls << "\n";
}

inline void write_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
}

/// Strict parser for the fixed 11-column schema; any malformed line throws.
inline std::vector<RunRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("csv: empty file");
  if (line != kCsvHeader) throw InputError("csv: unexpected header");
  std::vector<RunRecord> rows;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t from = 0;
    while (true) {
      const auto comma = line.find(',', from);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(from));
        break;
      }
      fields.push_back(line.substr(from, comma - from));
      from = comma + 1;
    }
    if (fields.size() != 11) {
      throw InputError("csv: line " + std::to_string(line_no) +
                       " has wrong field count");
    }
    try {
      RunRecord r;
      r.algorithm = fields[0];
      r.run_id = std::stol(fields[1]);
      r.iteration = std::stol(fields[2]);
      r.elapsed_s = detail::parse_csv_double(fields[3]);
      r.f_value = detail::parse_csv_double(fields[4]);
      r.wolfe_gap = detail::parse_csv_double(fields[5]);
      r.active_set_size = std::stol(fields[6]);
      r.restart = std::stoi(fields[7]);
      r.epoch = std::stol(fields[8]);
      r.lmo_calls = std::stoll(fields[9]);
      r.foo_calls = std::stoll(fields[10]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw InputError("csv: line " + std::to_string(line_no) +
                       " failed to parse");
    }
  }
  return rows;
}

}  // namespace pflacg

#endif  // PFLACG_TRACE_HPP_
