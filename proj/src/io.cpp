#include "srw/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "srw/version.hpp"

namespace srw::io {

std::string formatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hashHex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string configHash(const nlohmann::json& config) { return hashHex(fnv1a64(config.dump())); }

std::string reproducibilityHash(nlohmann::json config) {
  if (config.is_object()) {
    config.erase("out");
    config.erase("workers");
  }
  return configHash(config);
}

namespace {

std::ofstream openOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // binary: identical bytes everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

void writeCsv(const std::filesystem::path& path, const std::vector<Column>& columns,
              const std::vector<std::string>& preamble) {
  if (columns.empty()) throw std::invalid_argument("writeCsv: no columns");
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns)
    if (c.values.size() != rows) throw std::invalid_argument("writeCsv: ragged columns");

  auto out = openOut(path);
  for (const auto& line : preamble) out << "# " << line << '\n';
  for (std::size_t j = 0; j < columns.size(); ++j)
    out << columns[j].name << (j + 1 < columns.size() ? ',' : '\n');
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < columns.size(); ++j)
      out << formatDouble(columns[j].values[i]) << (j + 1 < columns.size() ? ',' : '\n');
}

void writeLatticeCsv(const std::filesystem::path& path, long long xMin,
                     const std::vector<double>& mass, const std::vector<std::string>& preamble) {
  auto out = openOut(path);
  for (const auto& line : preamble) out << "# " << line << '\n';
  out << "x,mass\n";
  for (std::size_t i = 0; i < mass.size(); ++i)
    out << xMin + static_cast<long long>(i) << ',' << formatDouble(mass[i]) << '\n';
}

void writeManifest(const std::filesystem::path& path, const Manifest& m) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = m.command;
  j["config"] = m.config;
  j["config_hash"] = reproducibilityHash(m.config);
  if (m.hasSeed) j["seed"] = m.seed;
  j["wall_time_s"] = m.wallTimeSeconds;
  j["outputs"] = m.outputs;
  j["counters"] = m.counters;
  auto out = openOut(path);
  out << j.dump(2) << '\n';
}

}  // namespace srw::io
