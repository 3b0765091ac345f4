#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "srw/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// scratch directory per test case, removed on scope exit
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("srw_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

int runCli(const std::vector<std::string>& args) { return srw::cli::run(args); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open ", p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<std::string> preamble;
  std::vector<std::string> header;
  std::map<std::string, std::vector<double>> cols;
};

Csv readCsv(const fs::path& p) {
  Csv out;
  std::ifstream in(p);
  REQUIRE_MESSAGE(in.good(), "cannot open ", p.string());
  std::string line;
  bool haveHeader = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.preamble.push_back(line);
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!haveHeader) {
      while (std::getline(ss, cell, ',')) out.header.push_back(cell);
      haveHeader = true;
      continue;
    }
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      REQUIRE(i < out.header.size());
      out.cols[out.header[i++]].push_back(std::stod(cell));
    }
  }
  return out;
}

json readManifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  REQUIRE_MESSAGE(in.good(), "no manifest in ", dir.string());
  return json::parse(in);
}

}  // namespace

TEST_CASE("exact: the fair walk writes an msd column equal to t") {
  TempDir dir("exact");
  REQUIRE(runCli({"exact", "--model", "geometric:p=0.5", "--tmax", "100", "--propagator-at", "8",
                  "--out", dir.path.string()}) == 0);

  const Csv csv = readCsv(dir / "moments.csv");
  REQUIRE(csv.cols.at("t").size() == 101);
  for (std::size_t t = 0; t <= 100; ++t) {
    CHECK(std::fabs(csv.cols.at("msd")[t] - static_cast<double>(t)) <= 1e-10);
    CHECK(std::fabs(csv.cols.at("mean")[t]) <= 1e-12);
    CHECK(std::fabs(csv.cols.at("variance")[t] - static_cast<double>(t)) <= 1e-10);
  }

  const Csv prop = readCsv(dir / "propagator_t8.csv");
  REQUIRE(prop.cols.at("x").size() == 17);
  CHECK(prop.cols.at("x").front() == -8.0);
  double total = 0.0;
  for (const double m : prop.cols.at("mass")) total += m;
  CHECK(std::fabs(total - 1.0) <= 1e-12);

  const json m = readManifest(dir.path);
  CHECK(m.at("command") == "exact");
  CHECK(m.at("config").at("tmax") == 100);
  const auto& outputs = m.at("outputs");
  CHECK(std::find(outputs.begin(), outputs.end(), "moments.csv") != outputs.end());
  CHECK(std::find(outputs.begin(), outputs.end(), "propagator_t8.csv") != outputs.end());
}

TEST_CASE("exact: symmetrizing kills the mean and evens the propagator") {
  TempDir dir("symm");
  REQUIRE(runCli({"exact", "--model", "sibuya:mu=0.5", "--tmax", "30", "--sigma0=-1",
                  "--symmetrize", "--propagator-at", "7", "--out", dir.path.string()}) == 0);

  const Csv csv = readCsv(dir / "moments.csv");
  for (const double v : csv.cols.at("mean")) CHECK(std::fabs(v) <= 1e-13);

  const Csv prop = readCsv(dir / "propagator_t7.csv");
  const auto& mass = prop.cols.at("mass");
  REQUIRE(mass.size() == 15);
  for (std::size_t i = 0; i < mass.size(); ++i)
    CHECK(std::fabs(mass[i] - mass[mass.size() - 1 - i]) <= 1e-12);
}

TEST_CASE("simulate: one seed means one byte stream, whatever the worker count") {
  TempDir a("simA"), b("simB"), c("simC");
  const std::vector<std::string> base{"simulate", "--model",        "sibuya:mu=0.5",
                                      "--tmax",   "10",             "--paths",
                                      "1000",     "--seed",         "7",
                                      "--histogram-at", "10"};
  auto withOut = [&](const TempDir& d, const std::vector<std::string>& extra) {
    std::vector<std::string> args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    args.insert(args.end(), {"--out", d.path.string()});
    return runCli(args);
  };
  REQUIRE(withOut(a, {}) == 0);
  REQUIRE(withOut(b, {}) == 0);
  REQUIRE(withOut(c, {"--workers", "3"}) == 0);

  CHECK(slurp(a / "stats.csv") == slurp(b / "stats.csv"));
  CHECK(slurp(a / "stats.csv") == slurp(c / "stats.csv"));
  CHECK(slurp(a / "histogram_t10.csv") == slurp(c / "histogram_t10.csv"));

  const Csv stats = readCsv(a / "stats.csv");
  REQUIRE(stats.preamble.size() == 2);
  CHECK(stats.preamble[0] == "# seed=7");
  CHECK(stats.preamble[1].rfind("# config_hash=", 0) == 0);
  CHECK(stats.cols.at("t").size() == 10);

  const json m = readManifest(a.path);
  CHECK(m.at("seed") == 7);
  CHECK(m.at("config_hash") == readManifest(c.path).at("config_hash"));
}

TEST_CASE("simulate: a missing seed is a configuration error") {
  TempDir dir("noseed");
  CHECK(runCli({"simulate", "--model", "sibuya:mu=0.5", "--tmax", "5", "--paths", "10", "--out",
                dir.path.string()}) != 0);
  CHECK(!fs::exists(dir / "stats.csv"));
}

TEST_CASE("oracle: enumeration and the transform propagator coincide") {
  TempDir dir("oracle");
  REQUIRE(runCli({"oracle", "--model", "geometric:p=0.3", "--t", "8", "--out",
                  dir.path.string()}) == 0);

  const json m = readManifest(dir.path);
  CHECK(m.at("counters").at("max_abs_diff").get<double>() < 1e-11);

  const Csv oracle = readCsv(dir / "oracle.csv");
  const Csv direct = readCsv(dir / "exact.csv");
  REQUIRE(oracle.cols.at("x").size() == 17);
  REQUIRE(direct.cols.at("x").size() == 17);
  for (std::size_t i = 0; i < 17; ++i)
    CHECK(std::fabs(oracle.cols.at("mass")[i] - direct.cols.at("mass")[i]) < 1e-11);
}

TEST_CASE("kernel: anchor values head the table") {
  TempDir dir("kernel");
  REQUIRE(runCli({"kernel", "--mu", "0.5", "--nu", "2", "--lambda", "2", "--tmax", "5", "--out",
                  dir.path.string()}) == 0);
  const Csv csv = readCsv(dir / "kernel.csv");
  REQUIRE(csv.cols.at("value").size() == 6);
  CHECK(csv.cols.at("value")[0] == -1.0);
  CHECK(csv.cols.at("value")[1] == -1.0);
}

TEST_CASE("kernel: the step-halving report lands monotonically on its target") {
  TempDir dir("scaling");
  REQUIRE(runCli({"kernel", "--mu", "0.5", "--nu", "2", "--lambda", "2", "--tmax", "2",
                  "--scaling-time", "2", "--scaling-h", "0.5", "--scaling-lambda0", "0.5",
                  "--halvings", "4", "--out", dir.path.string()}) == 0);
  const Csv csv = readCsv(dir / "scaling.csv");
  REQUIRE(csv.cols.at("h").size() == 5);
  const auto& dev = csv.cols.at("deviation");
  CHECK(dev.back() < dev.front());
  const json m = readManifest(dir.path);
  CHECK(m.at("counters").contains("scaling_target"));
}

TEST_CASE("dtarp: memoryless aging keeps every forward-recurrence row identical") {
  TempDir dir("dtarp");
  REQUIRE(runCli({"dtarp", "--model", "geometric:p=0.4", "--taumax", "10", "--tmax", "10",
                  "--out", dir.path.string()}) == 0);

  const Csv fe = readCsv(dir / "fe.csv");
  const auto& value = fe.cols.at("value");
  REQUIRE(value.size() == 11 * 11);
  for (std::size_t tau = 1; tau <= 10; ++tau)
    for (std::size_t t = 0; t <= 10; ++t)
      CHECK(std::fabs(value[tau * 11 + t] - value[t]) <= 1e-12);

  const Csv deficit = readCsv(dir / "deficit.csv");
  REQUIRE(deficit.cols.at("tau").size() == 11);

  const json m = readManifest(dir.path);
  CHECK(m.at("counters").at("max_row_sum_deviation").get<double>() < 1e-10);
}

TEST_CASE("dtarp: oversized tables are refused before any work") {
  TempDir dir("dtarpcap");
  CHECK(runCli({"dtarp", "--model", "geometric:p=0.4", "--taumax", "300", "--tmax", "300",
                "--out", dir.path.string()}) != 0);
  CHECK(!fs::exists(dir / "fe.csv"));
}

TEST_CASE("asymptotics: an exact power law comes back with its exponent") {
  TempDir dir("asym");
  REQUIRE(runCli({"asymptotics", "--model", "geometric:p=0.5", "--quantity", "msd", "--window",
                  "100:1000", "--out", dir.path.string()}) == 0);
  const json m = readManifest(dir.path);
  CHECK(std::fabs(m.at("counters").at("slope").get<double>() - 1.0) < 1e-9);
  CHECK(std::fabs(m.at("counters").at("amplitude").get<double>() - 1.0) < 1e-9);
  const Csv track = readCsv(dir / "track.csv");
  CHECK(track.cols.at("t").size() == 901);
}

TEST_CASE("ctsrw: exponential-clock means follow the memoryless closed form") {
  TempDir dir("ctsrw");
  REQUIRE(runCli({"ctsrw", "--model", "geometric:p=0.3", "--clock", "poisson:xi=1.5", "--times",
                  "0.5", "2", "5", "--propagator-at", "2", "--out", dir.path.string()}) == 0);

  const Csv csv = readCsv(dir / "moments.csv");
  const auto& times = csv.cols.at("time");
  const auto& mean = csv.cols.at("mean");
  const auto& msd = csv.cols.at("msd");
  const auto& variance = csv.cols.at("variance");
  REQUIRE(times.size() == 3);
  const double p = 0.3, xi = 1.5;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double want = (1.0 - 2.0 * p) / (2.0 * p) * -std::expm1(-2.0 * p * xi * times[i]);
    CHECK(std::fabs(mean[i] - want) <= 1e-8);
    CHECK(std::fabs(variance[i] - (msd[i] - mean[i] * mean[i])) <= 1e-12);
  }

  const Csv prop = readCsv(dir / "propagator_t2.csv");
  double total = 0.0;
  for (const double v : prop.cols.at("mass")) total += v;
  CHECK(std::fabs(total - 1.0) <= 1e-8);
}

TEST_CASE("ctsrw: a small simulated ensemble lands on the conditioned mean") {
  TempDir dir("ctsrwmc");
  REQUIRE(runCli({"ctsrw", "--model", "geometric:p=0.3", "--clock", "poisson:xi=1.5", "--times",
                  "2", "--paths", "4000", "--seed", "11", "--out", dir.path.string()}) == 0);
  const Csv csv = readCsv(dir / "mc_stats.csv");
  REQUIRE(csv.cols.at("time").size() == 1);
  const double want = (1.0 - 0.6) / 0.6 * -std::expm1(-0.9 * 2.0);
  CHECK(std::fabs(csv.cols.at("mean")[0] - want) <= 5.0 * csv.cols.at("se_mean")[0]);
  CHECK(csv.preamble.front() == "# seed=11");
}

TEST_CASE("ctsrw: simulation flags are validated") {
  TempDir dir("ctsrwbad");
  // paths without a seed
  CHECK(runCli({"ctsrw", "--model", "geometric:p=0.3", "--clock", "poisson:xi=1.5", "--times",
                "1", "--paths", "50", "--out", dir.path.string()}) != 0);
  // freeze outside simulation mode
  CHECK(runCli({"ctsrw", "--model", "geometric:p=0.3", "--clock", "poisson:xi=1.5", "--times",
                "1", "--freeze", "--out", dir.path.string()}) != 0);
}

TEST_CASE("config file: json and flags drive the same pipeline") {
  TempDir dir("config");
  const fs::path cfgFile = dir / "run.json";
  {
    json cfg{{"command", "exact"},
             {"model", "geometric:p=0.5"},
             {"tmax", 50},
             {"out", (dir / "a").string()}};
    std::ofstream out(cfgFile);
    out << cfg.dump(2);
  }
  REQUIRE(runCli({"--config", cfgFile.string()}) == 0);
  REQUIRE(fs::exists(dir.path / "a" / "moments.csv"));
  const Csv first = readCsv(dir.path / "a" / "moments.csv");
  REQUIRE(first.cols.at("t").size() == 51);

  // a manifest is itself a config payload; flags override its entries
  REQUIRE(runCli({"--config", (dir.path / "a" / "manifest.json").string(),
                  "--out=" + (dir / "b").string()}) == 0);
  CHECK(slurp(dir.path / "a" / "moments.csv") == slurp(dir.path / "b" / "moments.csv"));
}

TEST_CASE("bad configurations exit nonzero and leave nothing behind") {
  TempDir dir("bad");
  const std::string out = dir.path.string();
  CHECK(runCli({"exact", "--model", "geometric:p=1.5", "--tmax", "5", "--out", out}) != 0);
  CHECK(runCli({"exact", "--model", "nosuch:x=1", "--tmax", "5", "--out", out}) != 0);
  CHECK(runCli({"exact", "--model", "sibuya", "--tmax", "5", "--out", out}) != 0);
  CHECK(runCli({"exact", "--model", "geometric:p=0.5", "--tmax", "5", "--sigma0", "2", "--out",
                out}) != 0);
  CHECK(runCli({"frobnicate"}) != 0);
  CHECK(runCli({"oracle", "--model", "geometric:p=0.5", "--t", "15", "--out", out}) != 0);
  CHECK(!fs::exists(dir / "moments.csv"));
  CHECK(!fs::exists(dir / "oracle.csv"));
}

TEST_CASE("selftest reports a clean bill") {
  TempDir dir("selftest");
  CHECK(runCli({"selftest", "--out", dir.path.string()}) == 0);
  const json m = readManifest(dir.path);
  CHECK(m.at("counters").at("failures") == 0);
  CHECK(m.at("counters").at("api_checks") == 38);
  CHECK(m.at("counters").at("verification_checks") == 11);
}
