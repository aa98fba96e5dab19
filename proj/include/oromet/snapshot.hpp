#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oromet/csv.hpp"
#include "oromet/error.hpp"
#include "oromet/metric_dataset.hpp"
#include "oromet/orometry.hpp"
#include "oromet/text_num.hpp"

namespace oromet {

/// Sidecar header committed next to each snapshot (<file>.meta.json).
struct SnapshotMeta {
  std::string country;
  std::string retrieved_at;
  std::size_t rows = 0;
  std::size_t labeled = 0;
};

inline std::string snapshot_meta_path(const std::string& csv_path) {
  return csv_path + ".meta.json";
}

namespace detail {

inline const std::vector<std::string> kSnapshotHeader = {"qid", "name", "lat",
                                                         "lon", "population", "label"};
inline const std::vector<std::string> kEnrichedHeader = {
    "qid", "name", "lat", "lon", "population", "label",
    "isolation_km", "prominence", "delta_used"};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

inline void check_header(const csv::Row& header, const std::vector<std::string>& expected,
                         const std::string& path) {
  if (header.fields != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw ParseError(path + ": line 1: expected header '" + want + "'");
  }
}

inline PointRecord parse_point_fields(const csv::Row& row, const std::string& path) {
  const std::string where = path + ": line " + std::to_string(row.line);
  PointRecord p;
  p.id = row.fields[0];
  p.name = row.fields[1];
  GeoPoint coord;
  coord.lat_deg = parse_double(row.fields[2], where + ": lat");
  coord.lon_deg = parse_double(row.fields[3], where + ": lon");
  p.coordinates = coord;
  const long long population = parse_integer(row.fields[4], where + ": population");
  if (population < 0) throw ParseError(where + ": population must be nonnegative");
  p.height = static_cast<double>(population);
  const long long label = parse_integer(row.fields[5], where + ": label");
  if (label != 0 && label != 1) throw ParseError(where + ": label must be 0 or 1");
  p.label = static_cast<int>(label);
  if (p.id.empty()) throw ParseError(where + ": empty qid");
  return p;
}

}  // namespace detail

/// Reads a snapshot CSV into a geodesic-backed dataset.  When the sidecar
/// header exists its row and label counts are cross-checked against the file.
inline MetricDataset load_snapshot(const std::string& path,
                                   SnapshotMeta* meta_out = nullptr) {
  const std::string text = detail::read_file(path);
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError(path + ": empty file");
  detail::check_header(rows[0], detail::kSnapshotHeader, path);

  std::vector<PointRecord> points;
  points.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
    if (row.fields.size() != detail::kSnapshotHeader.size())
      throw ParseError(path + ": line " + std::to_string(row.line) + ": expected " +
                       std::to_string(detail::kSnapshotHeader.size()) + " columns, got " +
                       std::to_string(row.fields.size()));
    points.push_back(detail::parse_point_fields(row, path));
  }

  std::size_t labeled = 0;
  for (const auto& p : points) labeled += static_cast<std::size_t>(p.label.value_or(0));

  const std::string meta_path = snapshot_meta_path(path);
  if (std::filesystem::exists(meta_path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(detail::read_file(meta_path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(meta_path + ": " + e.what());
    }
    SnapshotMeta meta;
    meta.country = j.value("country", "");
    meta.retrieved_at = j.value("retrieved_at", "");
    meta.rows = j.value("rows", std::size_t{0});
    meta.labeled = j.value("labeled", std::size_t{0});
    if (meta.rows != points.size())
      throw ParseError(meta_path + ": header says " + std::to_string(meta.rows) +
                       " rows but the snapshot has " + std::to_string(points.size()));
    if (meta.labeled != labeled)
      throw ParseError(meta_path + ": header says " + std::to_string(meta.labeled) +
                       " labeled rows but the snapshot has " + std::to_string(labeled));
    if (meta_out) *meta_out = meta;
  } else if (meta_out) {
    *meta_out = SnapshotMeta{"", "", points.size(), labeled};
  }

  return MetricDataset::with_geodesic_distances(std::move(points));
}

inline void save_snapshot(const MetricDataset& ds, const std::string& path,
                          const std::string& country, const std::string& retrieved_at) {
  std::string out = "qid,name,lat,lon,population,label\n";
  std::size_t labeled = 0;
  for (const auto& p : ds.points()) {
    if (!p.coordinates)
      throw ValidationError("point '" + p.id + "' lacks coordinates; snapshots require them");
    out += csv::escape(p.id);
    out += ',';
    out += csv::escape(p.name);
    out += ',';
    out += format_double(p.coordinates->lat_deg);
    out += ',';
    out += format_double(p.coordinates->lon_deg);
    out += ',';
    out += std::to_string(std::llround(p.height));
    out += ',';
    out += std::to_string(p.label.value_or(0));
    out += '\n';
    labeled += static_cast<std::size_t>(p.label.value_or(0));
  }
  detail::write_file(path, out);

  nlohmann::json meta = {{"country", country},
                         {"retrieved_at", retrieved_at},
                         {"rows", ds.size()},
                         {"labeled", labeled}};
  detail::write_file(snapshot_meta_path(path), meta.dump(2) + "\n");
}

/// Snapshot columns plus the computed valuations, one row per point.
inline void save_enriched(const MetricDataset& ds, const OrometricScores& scores,
                          const std::string& path) {
  std::string out =
      "qid,name,lat,lon,population,label,isolation_km,prominence,delta_used\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& p = ds.point(i);
    out += csv::escape(p.id);
    out += ',';
    out += csv::escape(p.name);
    out += ',';
    out += format_double(p.coordinates->lat_deg);
    out += ',';
    out += format_double(p.coordinates->lon_deg);
    out += ',';
    out += std::to_string(std::llround(p.height));
    out += ',';
    out += std::to_string(p.label.value_or(0));
    out += ',';
    out += format_double(scores.isolation[i]);
    out += ',';
    out += format_double(scores.prominence[i]);
    out += ',';
    out += format_double(scores.delta_used);
    out += '\n';
  }
  detail::write_file(path, out);
}

struct EnrichedTable {
  std::vector<PointRecord> points;
  std::vector<double> isolation;
  std::vector<double> prominence;
  double delta_used = 0.0;
};

inline EnrichedTable load_enriched(const std::string& path) {
  const std::string text = detail::read_file(path);
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError(path + ": empty file");
  detail::check_header(rows[0], detail::kEnrichedHeader, path);

  EnrichedTable table;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    const std::string where = path + ": line " + std::to_string(row.line);
    if (row.fields.size() != detail::kEnrichedHeader.size())
      throw ParseError(where + ": expected " + std::to_string(detail::kEnrichedHeader.size()) +
                       " columns, got " + std::to_string(row.fields.size()));
    csv::Row base{{row.fields.begin(), row.fields.begin() + 6}, row.line};
    table.points.push_back(detail::parse_point_fields(base, path));
    table.isolation.push_back(parse_double(row.fields[6], where + ": isolation_km"));
    table.prominence.push_back(parse_double(row.fields[7], where + ": prominence"));
    table.delta_used = parse_double(row.fields[8], where + ": delta_used");
  }
  if (table.points.empty()) throw ParseError(path + ": no data rows");
  return table;
}

}  // namespace oromet
