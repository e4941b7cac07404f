#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace kfbem {

inline constexpr int kReportSchemaVersion = 1;

/// Library version string baked in at build time.
const char* code_version();

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<nlohmann::json>> rows;

  /// RFC 4180: CRLF line ends, fields with commas, quotes or line breaks quoted.
  std::string to_csv() const;
};

/// Plot-ready two-column data.
struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<std::array<double, 2>> points;

  std::string to_dat() const;
};

struct StudyReport {
  std::string kind;
  nlohmann::json config;
  std::uint64_t config_hash = 0;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();  // wall-clock fields live here only
  std::vector<std::string> warnings;
  std::vector<Table> tables;
  std::vector<Series> series;

  nlohmann::json to_json(bool include_timings = true) const;
};

std::string csv_field(const std::string& s);

/// Writes report.json, tables/<name>.csv and <name>.dat under out_dir.
void write_report(const StudyReport& report, const std::string& out_dir);

}  // namespace kfbem
