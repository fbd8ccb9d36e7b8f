#include "dobgibbs/report.hpp"

#include <filesystem>
#include <fstream>

#include "dobgibbs/core.hpp"
#include "dobgibbs/util.hpp"
#include "dobgibbs/version.hpp"

namespace dobgibbs {

ReportWriter::ReportWriter(std::string out_dir, std::string format,
                           uint64_t config_hash, uint64_t seed)
    : out_dir_(std::move(out_dir)),
      format_(std::move(format)),
      config_hash_(config_hash),
      seed_(seed) {
  if (format_ != "csv" && format_ != "json")
    throw ConfigError("expected csv|json, got '" + format_ + "'", "format");
  provenance_ = std::string(kToolName) + " " + kToolVersion +
                " config=" + hex16(config_hash_) + " seed=" + std::to_string(seed_);
  std::filesystem::create_directories(out_dir_);
}

std::vector<std::string> ReportWriter::write_table(
    const std::string& name, const std::vector<std::string>& columns,
    const std::vector<Row>& rows) {
  for (const Row& row : rows)
    if (row.size() != columns.size())
      throw std::logic_error("report row width mismatch in table " + name);

  std::vector<std::string> written;
  const std::filesystem::path base = std::filesystem::path(out_dir_) / name;

  if (format_ == "csv") {
    const std::string path = base.string() + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'", "out");
    out << "# " << provenance_ << "\n";
    for (size_t c = 0; c < columns.size(); ++c)
      out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const Row& row : rows) {
      for (size_t c = 0; c < row.size(); ++c) {
        const auto& cell = row[c];
        if (cell.is_number_float())
          out << fmt17(cell.get<double>());
        else if (cell.is_string())
          out << cell.get<std::string>();
        else
          out << cell.dump();
        out << (c + 1 < row.size() ? "," : "\n");
      }
    }
    written.push_back(path);
  }

  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config"] = hex16(config_hash_);
  j["seed"] = seed_;
  j["table"] = name;
  j["columns"] = columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const Row& row : rows) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& cell : row) jr.push_back(cell);
    j["rows"].push_back(std::move(jr));
  }
  const std::string jpath = base.string() + ".json";
  std::ofstream jout(jpath, std::ios::binary);
  if (!jout) throw ConfigError("cannot write '" + jpath + "'", "out");
  jout << j.dump(2) << "\n";
  written.push_back(jpath);
  return written;
}

}  // namespace dobgibbs
