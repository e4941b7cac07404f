#include "kfbem/report.hpp"

#include <cstdio>
#include <filesystem>

#include "kfbem/config.hpp"
#include "kfbem/error.hpp"
#include "kfbem/serialization.hpp"

#ifndef KFBEM_VERSION
#define KFBEM_VERSION "unknown"
#endif

namespace kfbem {

const char* code_version() { return KFBEM_VERSION; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string cell_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += csv_field(header[i]);
  }
  out += "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cell_text(row[i]));
    }
    out += "\r\n";
  }
  return out;
}

std::string Series::to_dat() const {
  std::string out = "# " + x_label + " " + y_label + "\n";
  for (const auto& p : points) out += number_text(p[0]) + " " + number_text(p[1]) + "\n";
  return out;
}

nlohmann::json StudyReport::to_json(bool include_timings) const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["code_version"] = code_version();
  j["kind"] = kind;
  j["config_hash"] = hex64(config_hash);
  j["config"] = config;
  j["results"] = results;
  j["warnings"] = warnings;
  if (include_timings) j["timings"] = timings;
  return j;
}

void write_report(const StudyReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "tables", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + out_dir);
  write_text((fs::path(out_dir) / "report.json").string(), report.to_json().dump(2) + "\n");
  for (const auto& t : report.tables)
    write_text((fs::path(out_dir) / "tables" / (t.name + ".csv")).string(), t.to_csv());
  for (const auto& s : report.series) write_text((fs::path(out_dir) / (s.name + ".dat")).string(), s.to_dat());
}

}  // namespace kfbem
