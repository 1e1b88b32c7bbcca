#include "polarpark/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include "polarpark/error.hpp"

namespace polarpark {

namespace {

constexpr std::size_t kColumns = 12;

void put_number(std::ostream& out, double value) {
  if (std::isnan(value)) return;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out << buf;
}

double parse_field(std::string_view field, std::size_t line) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::MalformedInput,
                "line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kCsvHeader << '\n';
  for (const auto& s : traj.samples) {
    const std::array<double, kColumns> row{s.t,         s.cartesian.x, s.cartesian.y,
                                           s.cartesian.theta, s.polar.rho, s.polar.delta,
                                           s.polar.gamma, s.input.v,   s.input.omega,
                                           s.cert.V,    s.cert.zeta,   s.cert.B};
    for (std::size_t i = 0; i < kColumns; ++i) {
      if (i) out << ',';
      put_number(out, row[i]);
    }
    out << '\n';
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  return out.str();
}

Trajectory read_trajectory_csv(std::istream& in, const Scenario& metadata) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedInput, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error(ErrorCode::MalformedInput, "unexpected CSV header '" + line + "'");

  Trajectory traj;
  traj.metadata = metadata;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, kColumns> v{};
    std::size_t col = 0, start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field =
          std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (col >= kColumns) throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": too many fields");
      v[col++] = parse_field(field, line_no);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (col != kColumns) {
      throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": expected 12 fields");
    }
    TrajectorySample s;
    s.t = v[0];
    s.cartesian = {v[1], v[2], v[3]};
    s.polar = {v[4], v[5], v[6]};
    s.input = {v[7], v[8]};
    s.cert = {v[0], v[9], kNaN, kNaN, v[4], v[11], v[10]};
    if (!std::isfinite(s.t) || !std::isfinite(s.polar.rho) || s.polar.rho < 0.0) {
      throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": bad t or rho");
    }
    if (!traj.samples.empty() && !(s.t > traj.samples.back().t)) {
      throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": time not increasing");
    }
    traj.samples.push_back(s);
  }
  if (traj.samples.empty()) throw Error(ErrorCode::MalformedInput, "CSV has no samples");

  const auto& last = traj.samples.back();
  const bool cut = metadata.cutoff_rho > 0.0 && last.polar.rho <= metadata.cutoff_rho &&
                   last.input.v == 0.0 && last.input.omega == 0.0;
  traj.termination = cut ? Termination::Cutoff : Termination::Horizon;
  return traj;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace polarpark
