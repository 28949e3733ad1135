#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsii/error_signal.hpp"
#include "wsii/trajectory.hpp"
#include "wsii/training.hpp"

namespace wsii {

/// Points-file violation with the offending 1-based row number (0 = header /
/// whole file) and a distinct category.
struct CsvError : std::runtime_error {
  enum class Kind { Io, Schema, Range, DuplicateTimestamp, PartialLabels };

  CsvError(Kind kind_arg, std::size_t row_arg, const std::string& message)
      : std::runtime_error(row_arg == 0 ? message : message + " (row " +
                                                        std::to_string(row_arg) + ")"),
        kind(kind_arg),
        row(row_arg) {}

  Kind kind;
  std::size_t row;
};

inline constexpr std::string_view kPointsHeader = "traj_id,t,lat,lon,label";

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_double_field(const std::string& field, std::size_t row,
                                 const char* name) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw CsvError(CsvError::Kind::Schema, row,
                   std::string("cannot parse ") + name + " value '" + field + "'");
  }
  return value;
}

inline long long parse_int_field(const std::string& field, std::size_t row,
                                 const char* name) {
  long long value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw CsvError(CsvError::Kind::Schema, row,
                   std::string("cannot parse ") + name + " value '" + field +
                       "' as integer seconds");
  }
  return value;
}

struct PointRow {
  long long t;
  double lat;
  double lon;
  std::string label;
  std::size_t row;
};

}  // namespace detail

/// Parses the points CSV: rows grouped by traj_id, sorted by t, coordinates
/// range-checked, labels all-or-nothing per trajectory. Trajectories come back
/// ordered by id.
inline std::vector<Trajectory> load_trajectories(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError(CsvError::Kind::Schema, 0, "points file is empty (header row required)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPointsHeader) {
    throw CsvError(CsvError::Kind::Schema, 0,
                   "bad header: expected '" + std::string(kPointsHeader) + "', got '" +
                       line + "'");
  }

  std::map<std::string, std::vector<detail::PointRow>> groups;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_row(line);
    if (fields.size() != 5) {
      throw CsvError(CsvError::Kind::Schema, row,
                     "expected 5 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw CsvError(CsvError::Kind::Schema, row, "empty traj_id");
    }
    detail::PointRow pr;
    pr.t = detail::parse_int_field(fields[1], row, "t");
    pr.lat = detail::parse_double_field(fields[2], row, "lat");
    pr.lon = detail::parse_double_field(fields[3], row, "lon");
    if (!(pr.lat >= -90.0 && pr.lat <= 90.0)) {
      throw CsvError(CsvError::Kind::Range, row,
                     "latitude " + fields[2] + " outside [-90, 90]");
    }
    if (!(pr.lon >= -180.0 && pr.lon <= 180.0)) {
      throw CsvError(CsvError::Kind::Range, row,
                     "longitude " + fields[3] + " outside [-180, 180]");
    }
    pr.label = fields[4];
    pr.row = row;
    groups[fields[0]].push_back(std::move(pr));
  }

  std::vector<Trajectory> out;
  out.reserve(groups.size());
  for (auto& [id, rows] : groups) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const detail::PointRow& a, const detail::PointRow& b) {
                       return a.t < b.t;
                     });
    Trajectory traj;
    traj.id = id;
    std::size_t labeled_rows = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].t == rows[i - 1].t) {
        throw CsvError(CsvError::Kind::DuplicateTimestamp, rows[i].row,
                       "duplicate timestamp " + std::to_string(rows[i].t) +
                           " in trajectory " + id);
      }
      TimedPoint point;
      point.position = GeoPoint{rows[i].lat, rows[i].lon};
      point.t = static_cast<double>(rows[i].t);
      traj.points.push_back(point);
      if (!rows[i].label.empty()) ++labeled_rows;
    }
    if (labeled_rows == rows.size()) {
      traj.labels.reserve(rows.size());
      for (const auto& r : rows) traj.labels.push_back(r.label);
    } else if (labeled_rows != 0) {
      std::size_t offending = 0;
      for (const auto& r : rows) {
        if (r.label.empty()) {
          offending = r.row;
          break;
        }
      }
      throw CsvError(CsvError::Kind::PartialLabels, offending,
                     "trajectory " + id + " is only partially labeled (labels are "
                     "all-or-nothing per trajectory)");
    }
    out.push_back(std::move(traj));
  }
  return out;
}

inline std::vector<Trajectory> load_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(CsvError::Kind::Io, 0, "cannot open points file: " + path);
  return load_trajectories(in);
}

inline void write_trajectories(const std::vector<Trajectory>& trajectories,
                               std::ostream& out) {
  out << kPointsHeader << "\n";
  for (const Trajectory& traj : trajectories) {
    if (traj.id.find(',') != std::string::npos) {
      throw std::invalid_argument("write: traj_id must not contain commas");
    }
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      const TimedPoint& p = traj.points[i];
      const std::string label = traj.labeled() ? traj.labels[i] : std::string{};
      if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos) {
        throw std::invalid_argument("write: labels must not contain commas or newlines");
      }
      out << traj.id << ',' << static_cast<long long>(p.t) << ','
          << format_double(p.position.lat) << ',' << format_double(p.position.lon) << ','
          << label << "\n";
    }
  }
}

inline void write_trajectories(const std::vector<Trajectory>& trajectories,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(CsvError::Kind::Io, 0, "cannot open output file: " + path);
  write_trajectories(trajectories, out);
}

inline void write_error_signal_csv(const std::vector<ErrorSignal>& signals,
                                   std::ostream& out) {
  out << "trajectory_id,point_index,error_m\n";
  for (const ErrorSignal& signal : signals) {
    for (const ErrorEntry& entry : signal.entries) {
      out << signal.trajectory_id << ',' << entry.point_index << ','
          << format_double(entry.error_m) << "\n";
    }
  }
}

inline void write_training_csv(const std::vector<TrainingSample>& samples, int q,
                               std::ostream& out) {
  out << "trajectory_id,start_index";
  for (int i = 1; i <= q; ++i) out << ",e" << i;
  out << ",label\n";
  for (const TrainingSample& sample : samples) {
    out << sample.trajectory_id << ',' << sample.start_index;
    for (double f : sample.features) out << ',' << format_double(f);
    out << ',' << sample.label << "\n";
  }
}

inline void write_segments_csv(
    const std::vector<std::pair<const Trajectory*, SegmentationResult>>& results,
    std::ostream& out) {
  out << "trajectory_id,segment_id,start_index,end_index,start_t,end_t\n";
  for (const auto& [traj, result] : results) {
    for (std::size_t i = 0; i < result.segments.size(); ++i) {
      const Segment& s = result.segments[i];
      out << result.trajectory_id << ',' << i << ',' << s.start_index << ','
          << s.end_index << ',' << format_double(traj->points[s.start_index].t) << ','
          << format_double(traj->points[s.end_index].t) << "\n";
    }
  }
}

}  // namespace wsii
