#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace srw::io {

// 17 significant digits: enough for any double to survive a write/read
// round trip bit for bit.
std::string formatDouble(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hashHex(std::uint64_t h);

// Fingerprint of a canonical (sorted-key) config dump; embedded in
// stochastic artifacts so they can be traced back to their run.
std::string configHash(const nlohmann::json& config);

// Same fingerprint with the location and parallelism keys ("out", "workers")
// stripped first. Runs that differ only in where they write or how many
// threads they use produce identical numbers, so they share this hash.
std::string reproducibilityHash(nlohmann::json config);

struct Column {
  std::string name;
  std::vector<double> values;
};

// "name1,name2,..." header then one row per index. Columns must share one
// length. A nonempty preamble goes first, one '#'-prefixed line per entry.
void writeCsv(const std::filesystem::path& path, const std::vector<Column>& columns,
              const std::vector<std::string>& preamble = {});

// Lattice mass table as "x,mass" with x running from xMin upward.
void writeLatticeCsv(const std::filesystem::path& path, long long xMin,
                     const std::vector<double>& mass,
                     const std::vector<std::string>& preamble = {});

// Run record written beside every artifact. The stored config is a valid
// --config payload, so a run can be replayed from its manifest alone.
struct Manifest {
  std::string command;
  nlohmann::json config;
  bool hasSeed = false;
  std::uint64_t seed = 0;
  double wallTimeSeconds = 0.0;
  std::vector<std::string> outputs;
  nlohmann::json counters = nlohmann::json::object();
};

void writeManifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace srw::io
