#include "qrg/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace qrg {

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::string optional_field(const std::optional<double>& v) { return v ? format_g9(*v) : "NA"; }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> data_lines(const std::string& text, const char* header) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw CsvError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw CsvError("csv: unexpected header '" + line + "'");
  std::vector<std::string> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw CsvError("csv: bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw CsvError("csv: bad integer '" + s + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s == "NA") return std::nullopt;
  return parse_double(s);
}

}  // namespace

std::string format_curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = std::string(kCurveHeader) + "\n";
  for (const CurveRow& r : rows) {
    out += format_g9(r.alpha) + "," + format_g9(r.winning_paper) + "," +
           format_g9(r.winning_conditional) + "," + optional_field(r.cheating) + "," +
           optional_field(r.threshold) + "\n";
  }
  return out;
}

std::vector<CurveRow> parse_curve_csv(const std::string& text) {
  std::vector<CurveRow> rows;
  for (const std::string& line : data_lines(text, kCurveHeader)) {
    const auto f = split_fields(line);
    if (f.size() != 5) throw CsvError("csv: expected 5 fields in '" + line + "'");
    CurveRow r;
    r.alpha = parse_double(f[0]);
    r.winning_paper = parse_double(f[1]);
    r.winning_conditional = parse_double(f[2]);
    r.cheating = parse_optional(f[3]);
    r.threshold = parse_optional(f[4]);
    rows.push_back(r);
  }
  return rows;
}

std::string format_estimate_csv(const EstimateReport& r) {
  return std::string(kEstimateHeader) + "\n" + std::to_string(r.trials) + "," +
         std::to_string(r.wins) + "," + format_g9(r.estimate) + "," + format_g9(r.std_error) +
         "," + std::to_string(r.seed) + "," + format_g9(r.eta) + "," + format_g9(r.nu) + "," +
         format_g9(r.alpha) + "," + std::to_string(r.n) + "," + std::to_string(r.k) + "\n";
}

EstimateReport parse_estimate_csv(const std::string& text) {
  const auto lines = data_lines(text, kEstimateHeader);
  if (lines.size() != 1) throw CsvError("csv: expected exactly one estimate row");
  const auto f = split_fields(lines.front());
  if (f.size() != 10) throw CsvError("csv: expected 10 fields in '" + lines.front() + "'");
  EstimateReport r;
  r.trials = parse_u64(f[0]);
  r.wins = parse_u64(f[1]);
  r.estimate = parse_double(f[2]);
  r.std_error = parse_double(f[3]);
  r.seed = parse_u64(f[4]);
  r.eta = parse_double(f[5]);
  r.nu = parse_double(f[6]);
  r.alpha = parse_double(f[7]);
  r.n = static_cast<int>(parse_u64(f[8]));
  r.k = static_cast<int>(parse_u64(f[9]));
  return r;
}

}  // namespace qrg
