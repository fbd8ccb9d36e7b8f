#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace dobgibbs {

// Deterministic table writer.  CSV files start with a provenance comment
//   # dobgibbs <version> config=<16-hex> seed=<u64>
// followed by a header row; real cells are serialized with 17 significant
// digits so a round-trip parse is exact.  Every CSV gets a JSON mirror with
// the same provenance fields; with format "json" only the mirror is written.
class ReportWriter {
 public:
  ReportWriter(std::string out_dir, std::string format, uint64_t config_hash,
               uint64_t seed);

  using Row = std::vector<nlohmann::ordered_json>;
  // Returns the path(s) written, CSV first when present.
  std::vector<std::string> write_table(const std::string& name,
                                       const std::vector<std::string>& columns,
                                       const std::vector<Row>& rows);

 private:
  std::string out_dir_;
  std::string format_;
  std::string provenance_;
  uint64_t config_hash_;
  uint64_t seed_;
};

}  // namespace dobgibbs
