#include "srw/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srw/ctsrw.hpp"
#include "srw/dtarp.hpp"
#include "srw/io.hpp"
#include "srw/montecarlo.hpp"
#include "srw/renewal.hpp"
#include "srw/rng.hpp"
#include "srw/series.hpp"
#include "srw/specfun.hpp"
#include "srw/srw_exact.hpp"
#include "srw/verify.hpp"
#include "srw/version.hpp"

namespace srw::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double nowSeconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double parseDoubleStrict(const std::string& text, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (text.empty() || pos != text.size())
    throw std::invalid_argument(where + ": cannot parse number '" + text + "'");
  return v;
}

std::size_t parseSizeStrict(const std::string& text, const std::string& where) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (text.empty() || pos != text.size())
    throw std::invalid_argument(where + ": cannot parse count '" + text + "'");
  return static_cast<std::size_t>(v);
}

// "kind:key=value,key=value"; list-valued entries use ';' between items so
// they never collide with the ',' separator.
struct SpecText {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;
};

SpecText splitSpec(const std::string& text) {
  SpecText out;
  const auto colon = text.find(':');
  out.kind = text.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::stringstream body(text.substr(colon + 1));
  std::string item;
  while (std::getline(body, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("spec '" + text + "': expected key=value, got '" + item + "'");
    out.params.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> paramMap(const SpecText& s,
                                            const std::set<std::string>& allowed) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : s.params) {
    if (!allowed.count(k)) throw std::invalid_argument(s.kind + ": unknown parameter '" + k + "'");
    if (!out.emplace(k, v).second)
      throw std::invalid_argument(s.kind + ": duplicate parameter '" + k + "'");
  }
  return out;
}

const std::string& need(const std::map<std::string, std::string>& m, const std::string& key,
                        const std::string& kind) {
  const auto it = m.find(key);
  if (it == m.end()) throw std::invalid_argument(kind + ": missing parameter '" + key + "'");
  return it->second;
}

renewal::WaitingTimeModel parseModel(const std::string& text) {
  const SpecText s = splitSpec(text);
  if (s.kind == "geometric") {
    const auto m = paramMap(s, {"p"});
    return renewal::WaitingTimeModel::geometric(parseDoubleStrict(need(m, "p", s.kind), "p"));
  }
  if (s.kind == "sibuya") {
    const auto m = paramMap(s, {"mu"});
    return renewal::WaitingTimeModel::sibuya(parseDoubleStrict(need(m, "mu", s.kind), "mu"));
  }
  if (s.kind == "fracbernoulli") {
    const auto m = paramMap(s, {"mu", "lambda"});
    return renewal::WaitingTimeModel::fractionalBernoulli(
        parseDoubleStrict(need(m, "mu", s.kind), "mu"),
        parseDoubleStrict(need(m, "lambda", s.kind), "lambda"));
  }
  if (s.kind == "broadpowertail") {
    const auto m = paramMap(s, {"lambda", "support"});
    const double lambda = parseDoubleStrict(need(m, "lambda", s.kind), "lambda");
    if (m.count("support"))
      return renewal::WaitingTimeModel::broadPowerTail(lambda,
                                                       parseSizeStrict(m.at("support"), "support"));
    return renewal::WaitingTimeModel::broadPowerTail(lambda);
  }
  if (s.kind == "custom") {
    const auto m = paramMap(s, {"file", "pdf"});
    if (m.count("file") + m.count("pdf") != 1)
      throw std::invalid_argument("custom: give exactly one of file=PATH or pdf=v0;v1;...");
    if (m.count("file")) return renewal::WaitingTimeModel::customFromFile(m.at("file"));
    std::vector<double> pdf;
    std::stringstream ss(m.at("pdf"));
    std::string item;
    while (std::getline(ss, item, ';')) pdf.push_back(parseDoubleStrict(item, "pdf"));
    return renewal::WaitingTimeModel::custom(std::move(pdf));
  }
  throw std::invalid_argument("unknown model kind '" + s.kind +
                              "' (expected geometric, sibuya, fracbernoulli, broadpowertail, "
                              "custom)");
}

ctsrw::ClockModel parseClock(const std::string& text) {
  const SpecText s = splitSpec(text);
  if (s.kind == "poisson") {
    const auto m = paramMap(s, {"xi"});
    return ctsrw::ClockModel::poisson(parseDoubleStrict(need(m, "xi", s.kind), "xi"));
  }
  if (s.kind == "fracpoisson") {
    const auto m = paramMap(s, {"alpha", "xi"});
    return ctsrw::ClockModel::fractionalPoisson(
        parseDoubleStrict(need(m, "alpha", s.kind), "alpha"),
        parseDoubleStrict(need(m, "xi", s.kind), "xi"));
  }
  throw std::invalid_argument("unknown clock kind '" + s.kind +
                              "' (expected poisson, fracpoisson)");
}

std::pair<std::size_t, std::size_t> parseWindow(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("window: expected LO:HI, got '" + text + "'");
  const std::size_t lo = parseSizeStrict(text.substr(0, colon), "window");
  const std::size_t hi = parseSizeStrict(text.substr(colon + 1), "window");
  if (lo < 1 || hi <= lo) throw std::invalid_argument("window: need 1 <= LO < HI");
  return {lo, hi};
}

void requireSigma(int sigma0) {
  if (sigma0 != 1 && sigma0 != -1) throw std::invalid_argument("sigma0 must be +1 or -1");
}

fs::path resolveOutDir(const std::string& flagValue) {
  if (!flagValue.empty()) return fs::path(flagValue);
  if (const char* env = std::getenv("SRW_OUT_DIR"); env && *env) return fs::path(env);
  return fs::path("out");
}

std::vector<double> indexColumn(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 0.0);
  return v;
}

// Collects the artifacts of one run and finishes with the manifest. Every
// CSV carries the reproducibility hash (plus the seed when there is one), so
// any file can be traced back to the exact configuration that produced it.
struct ArtifactSink {
  fs::path dir;
  io::Manifest manifest;
  double t0 = nowSeconds();

  ArtifactSink(std::string command, fs::path outDir, json config) : dir(std::move(outDir)) {
    manifest.command = std::move(command);
    manifest.config = std::move(config);
  }

  std::vector<std::string> preamble() const {
    std::vector<std::string> lines;
    if (manifest.hasSeed) lines.push_back("seed=" + std::to_string(manifest.seed));
    lines.push_back("config_hash=" + io::reproducibilityHash(manifest.config));
    return lines;
  }

  void csv(const std::string& name, const std::vector<io::Column>& columns) {
    io::writeCsv(dir / name, columns, preamble());
    manifest.outputs.push_back(name);
    std::cout << "wrote " << (dir / name).string() << "\n";
  }

  void lattice(const std::string& name, const exact::LatticeDistribution& d) {
    io::writeLatticeCsv(dir / name, d.xMin, d.mass, preamble());
    manifest.outputs.push_back(name);
    std::cout << "wrote " << (dir / name).string() << "\n";
  }

  void finish() {
    manifest.wallTimeSeconds = nowSeconds() - t0;
    io::writeManifest(dir / "manifest.json", manifest);
    std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
  }
};

exact::LatticeDistribution mixLattice(const exact::LatticeDistribution& a,
                                      const exact::LatticeDistribution& b) {
  exact::LatticeDistribution out;
  out.xMin = std::min(a.xMin, b.xMin);
  const long long end = std::max(a.xMin + static_cast<long long>(a.mass.size()),
                                 b.xMin + static_cast<long long>(b.mass.size()));
  out.mass.assign(static_cast<std::size_t>(end - out.xMin), 0.0);
  for (std::size_t i = 0; i < a.mass.size(); ++i)
    out.mass[static_cast<std::size_t>(a.xMin - out.xMin) + i] += 0.5 * a.mass[i];
  for (std::size_t i = 0; i < b.mass.size(); ++i)
    out.mass[static_cast<std::size_t>(b.xMin - out.xMin) + i] += 0.5 * b.mass[i];
  out.massDeficit = 0.5 * (a.massDeficit + b.massDeficit);
  out.maxImagResidue = std::max(a.maxImagResidue, b.maxImagResidue);
  return out;
}

double latticeMaxAbsDiff(const exact::LatticeDistribution& a,
                         const exact::LatticeDistribution& b) {
  const long long lo = std::min(a.xMin, b.xMin);
  const long long hi = std::max(a.xMin + static_cast<long long>(a.mass.size()),
                                b.xMin + static_cast<long long>(b.mass.size()));
  const auto pick = [](const exact::LatticeDistribution& d, long long x) {
    const long long i = x - d.xMin;
    return (i >= 0 && i < static_cast<long long>(d.mass.size()))
               ? d.mass[static_cast<std::size_t>(i)]
               : 0.0;
  };
  double worst = 0.0;
  for (long long x = lo; x < hi; ++x) worst = std::max(worst, std::fabs(pick(a, x) - pick(b, x)));
  return worst;
}

// All t in 1..horizon while that stays small; above 1000 a log-spaced grid
// of at most 1000 distinct times, horizon always included.
std::vector<std::size_t> defaultCheckpoints(std::size_t horizon) {
  if (horizon == 0) return {};
  if (horizon <= 1000) {
    std::vector<std::size_t> out(horizon);
    std::iota(out.begin(), out.end(), std::size_t{1});
    return out;
  }
  std::set<std::size_t> pts;
  const double top = std::log(static_cast<double>(horizon));
  for (int k = 0; k < 1000; ++k) {
    const auto x = static_cast<std::size_t>(std::llround(std::exp(top * k / 999.0)));
    pts.insert(std::clamp<std::size_t>(x, 1, horizon));
  }
  pts.insert(horizon);
  return {pts.begin(), pts.end()};
}

constexpr std::size_t kTmaxCap = 200'000;          // transform pipelines are O(t^2)
constexpr std::size_t kDtarpCellCap = 1u << 24;    // 256^3 table cells
constexpr std::size_t kDtarpDumpCap = 1u << 20;    // full tensor dump stays under ~40 MB

// ---------------------------------------------------------------- exact ----

struct ExactOpts {
  std::string model, out;
  int sigma0 = 1;
  std::size_t tmax = 0;
  bool symmetrize = false;
  std::vector<std::size_t> propagatorAt;
  long long occupationAt = -1;
  std::string occupationSide = "plus";
};

int cmdExact(const ExactOpts& o) {
  const auto model = parseModel(o.model);
  requireSigma(o.sigma0);
  if (o.tmax > kTmaxCap)
    throw std::invalid_argument("exact: tmax above " + std::to_string(kTmaxCap));
  for (const std::size_t t : o.propagatorAt)
    if (t > o.tmax) throw std::invalid_argument("exact: propagator time beyond tmax");
  if (o.occupationAt > static_cast<long long>(o.tmax))
    throw std::invalid_argument("exact: occupation time beyond tmax");

  const fs::path dir = resolveOutDir(o.out);
  json cfg{{"command", "exact"}, {"model", o.model},  {"sigma0", o.sigma0},
           {"tmax", o.tmax},     {"out", dir.string()}};
  if (o.symmetrize) cfg["symmetrize"] = true;
  if (!o.propagatorAt.empty()) cfg["propagator-at"] = o.propagatorAt;
  if (o.occupationAt >= 0) {
    cfg["occupation-at"] = o.occupationAt;
    cfg["occupation-side"] = o.occupationSide;
  }
  ArtifactSink sink("exact", dir, cfg);

  auto track = exact::momentTrack(model, o.sigma0, o.tmax);
  if (o.symmetrize) {
    const auto mirror = exact::momentTrack(model, -o.sigma0, o.tmax);
    for (std::size_t t = 0; t <= o.tmax; ++t) {
      track.mean[t] = 0.5 * (track.mean[t] + mirror.mean[t]);
      track.msd[t] = 0.5 * (track.msd[t] + mirror.msd[t]);
      track.variance[t] = track.msd[t] - track.mean[t] * track.mean[t];
    }
  }
  sink.csv("moments.csv", {{"t", indexColumn(o.tmax + 1)},
                           {"mean", track.mean},
                           {"msd", track.msd},
                           {"variance", track.variance}});

  json propCounters = json::object();
  for (const std::size_t t : o.propagatorAt) {
    auto p = exact::propagator(model, o.sigma0, t);
    if (o.symmetrize) p = mixLattice(p, exact::propagator(model, -o.sigma0, t));
    sink.lattice("propagator_t" + std::to_string(t) + ".csv", p);
    propCounters[std::to_string(t)] = {{"mass_deficit", p.massDeficit},
                                       {"max_imag_residue", p.maxImagResidue}};
  }
  if (!propCounters.empty()) sink.manifest.counters["propagators"] = propCounters;

  if (o.occupationAt >= 0) {
    const auto side = o.occupationSide == "plus" ? exact::State::Plus : exact::State::Minus;
    const auto occ = exact::occupationTimePropagator(
        model, static_cast<std::size_t>(o.occupationAt), side);
    sink.lattice("occupation_" + o.occupationSide + "_t" + std::to_string(o.occupationAt) + ".csv",
                 occ);
  }
  sink.finish();
  return 0;
}

// ------------------------------------------------------------- simulate ----

struct SimulateOpts {
  std::string model, out;
  int sigma0 = 1;
  std::size_t tmax = 0;
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<std::size_t> checkpoints;
  std::vector<std::size_t> histogramAt;
};

int cmdSimulate(const SimulateOpts& o) {
  const auto model = parseModel(o.model);
  requireSigma(o.sigma0);
  if (o.tmax == 0) throw std::invalid_argument("simulate: tmax must be at least 1");

  std::vector<std::size_t> cks = o.checkpoints.empty() ? defaultCheckpoints(o.tmax)
                                                       : o.checkpoints;
  cks.insert(cks.end(), o.histogramAt.begin(), o.histogramAt.end());
  std::sort(cks.begin(), cks.end());
  cks.erase(std::unique(cks.begin(), cks.end()), cks.end());

  const fs::path dir = resolveOutDir(o.out);
  json cfg{{"command", "simulate"}, {"model", o.model},     {"sigma0", o.sigma0},
           {"tmax", o.tmax},        {"paths", o.paths},     {"seed", o.seed},
           {"workers", o.workers},  {"out", dir.string()}};
  if (!o.checkpoints.empty()) cfg["checkpoints"] = o.checkpoints;
  if (!o.histogramAt.empty()) cfg["histogram-at"] = o.histogramAt;
  ArtifactSink sink("simulate", dir, cfg);
  sink.manifest.hasSeed = true;
  sink.manifest.seed = o.seed;

  const exact::WalkSpec spec{model, o.sigma0, o.tmax};
  montecarlo::SimConfig mc;
  mc.nPaths = o.paths;
  mc.workers = o.workers;
  mc.checkpoints = cks;
  mc.histogramAt = o.histogramAt;
  const auto stats = montecarlo::simulateSrw(spec, mc, {o.seed});

  const std::size_t n = stats.checkpoints.size();
  std::vector<double> t(n), nPaths(n), mean(n), seMean(n), msd(n), seMsd(n), variance(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = stats.checkpoints[i];
    t[i] = c.time;
    nPaths[i] = static_cast<double>(c.nPaths);
    mean[i] = c.mean;
    seMean[i] = c.seMean;
    msd[i] = c.secondMoment;
    seMsd[i] = c.seSecondMoment;
    variance[i] = c.variance;
  }
  sink.csv("stats.csv", {{"t", t},
                         {"n_paths", nPaths},
                         {"mean", mean},
                         {"se_mean", seMean},
                         {"msd", msd},
                         {"se_msd", seMsd},
                         {"variance", variance}});

  for (const auto& c : stats.checkpoints) {
    if (!c.hasHistogram) continue;
    const std::size_t bins = c.histogram.size();
    std::vector<double> x(bins), count(bins), fraction(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      x[i] = static_cast<double>(c.histXMin + static_cast<long long>(i));
      count[i] = static_cast<double>(c.histogram[i]);
      fraction[i] = count[i] / static_cast<double>(c.nPaths);
    }
    const auto tag = std::to_string(static_cast<long long>(std::llround(c.time)));
    sink.csv("histogram_t" + tag + ".csv",
             {{"x", x}, {"count", count}, {"fraction", fraction}});
  }

  sink.manifest.counters["reversal_free_paths"] = stats.reversalFreePaths;
  sink.manifest.counters["capped_draws"] = stats.cappedDraws;
  sink.finish();
  return 0;
}

// --------------------------------------------------------------- oracle ----

struct OracleOpts {
  std::string model, out;
  int sigma0 = 1;
  std::size_t t = 0;
};

int cmdOracle(const OracleOpts& o) {
  const auto model = parseModel(o.model);
  requireSigma(o.sigma0);

  const fs::path dir = resolveOutDir(o.out);
  const json cfg{{"command", "oracle"}, {"model", o.model},  {"sigma0", o.sigma0},
                 {"t", o.t},            {"out", dir.string()}};
  ArtifactSink sink("oracle", dir, cfg);

  const exact::WalkSpec spec{model, o.sigma0, o.t};
  const auto oracle = montecarlo::pathEnumerationOracle(spec, o.t);
  const auto direct = exact::propagator(model, o.sigma0, o.t);
  const double maxAbs = latticeMaxAbsDiff(oracle.distribution, direct);

  sink.lattice("oracle.csv", oracle.distribution);
  sink.lattice("exact.csv", direct);
  sink.manifest.counters["max_abs_diff"] = maxAbs;
  sink.manifest.counters["oracle_mean"] = oracle.mean;
  sink.manifest.counters["exact_mean"] = direct.mean();
  sink.manifest.counters["oracle_second_moment"] = oracle.secondMoment;
  sink.manifest.counters["exact_second_moment"] = direct.secondMoment();
  std::printf("max abs difference: %.3e\n", maxAbs);
  sink.finish();
  return 0;
}

// ---------------------------------------------------------------- dtarp ----

struct DtarpOpts {
  std::string model, out;
  std::size_t taumax = 0, tmax = 0;
  long long mmax = -1;
  bool states = false;
  double v = 0.0;
  CLI::Option* vOpt = nullptr;
};

int cmdDtarp(const DtarpOpts& o) {
  const auto model = parseModel(o.model);
  const std::size_t mmax = o.mmax < 0 ? o.tmax : static_cast<std::size_t>(o.mmax);
  const unsigned long long cells = static_cast<unsigned long long>(o.taumax + 1) *
                                   (mmax + 1) * (o.tmax + 1);
  if (cells > kDtarpCellCap)
    throw std::invalid_argument("dtarp: " + std::to_string(cells) + " table cells exceed the " +
                                std::to_string(kDtarpCellCap) + " budget");

  const fs::path dir = resolveOutDir(o.out);
  json cfg{{"command", "dtarp"}, {"model", o.model},  {"taumax", o.taumax},
           {"tmax", o.tmax},     {"mmax", mmax},      {"out", dir.string()}};
  if (o.states) cfg["states"] = true;
  const bool wantV = o.vOpt && o.vOpt->count() > 0;
  if (wantV) cfg["v"] = o.v;
  ArtifactSink sink("dtarp", dir, cfg);

  const auto table = dtarp::buildAgedTable(model, o.taumax, mmax, o.tmax);

  {
    const std::size_t rows = (o.taumax + 1) * (o.tmax + 1);
    std::vector<double> tau(rows), t(rows), value(rows);
    std::size_t r = 0;
    for (std::size_t a = 0; a <= o.taumax; ++a)
      for (std::size_t b = 0; b <= o.tmax; ++b, ++r) {
        tau[r] = static_cast<double>(a);
        t[r] = static_cast<double>(b);
        value[r] = table.fE.at(a, b);
      }
    sink.csv("fe.csv", {{"tau", tau}, {"t", t}, {"value", value}});
  }
  {
    std::vector<double> tau(o.taumax + 1), deficit(o.taumax + 1);
    for (std::size_t a = 0; a <= o.taumax; ++a) {
      tau[a] = static_cast<double>(a);
      deficit[a] = table.tailDeficit[a];
    }
    sink.csv("deficit.csv", {{"tau", tau}, {"deficit", deficit}});
  }

  if (o.states) {
    if (cells > kDtarpDumpCap)
      throw std::invalid_argument("dtarp: --states dump limited to " +
                                  std::to_string(kDtarpDumpCap) + " cells");
    std::vector<double> tau, m, t, value;
    tau.reserve(cells);
    m.reserve(cells);
    t.reserve(cells);
    value.reserve(cells);
    for (std::size_t a = 0; a <= o.taumax; ++a)
      for (std::size_t mm = 0; mm <= mmax; ++mm)
        for (std::size_t b = 0; b <= o.tmax; ++b) {
          tau.push_back(static_cast<double>(a));
          m.push_back(static_cast<double>(mm));
          t.push_back(static_cast<double>(b));
          value.push_back(table.states.at(a, mm, b));
        }
    sink.csv("states.csv", {{"tau", tau}, {"m", m}, {"t", t}, {"value", value}});
  }

  if (wantV) {
    const auto& gv = table.statePolynomial(o.v);
    const std::size_t rows = (o.taumax + 1) * (o.tmax + 1);
    std::vector<double> tau(rows), t(rows), value(rows);
    std::size_t r = 0;
    for (std::size_t a = 0; a <= o.taumax; ++a)
      for (std::size_t b = 0; b <= o.tmax; ++b, ++r) {
        tau[r] = static_cast<double>(a);
        t[r] = static_cast<double>(b);
        value[r] = gv.at(a, b);
      }
    sink.csv("state_polynomial.csv", {{"tau", tau}, {"t", t}, {"value", value}});
  }

  double maxDeficit = 0.0;
  for (const double d : table.tailDeficit) maxDeficit = std::max(maxDeficit, std::fabs(d));
  sink.manifest.counters["max_tail_deficit"] = maxDeficit;
  if (mmax >= o.tmax) {
    // every reachable state is tabulated, so the rows must close to one
    double worst = 0.0;
    for (std::size_t a = 0; a <= o.taumax; ++a)
      for (std::size_t b = 0; b <= o.tmax; ++b)
        worst = std::max(worst, std::fabs(table.states.rowSum(a, b) - 1.0));
    sink.manifest.counters["max_row_sum_deviation"] = worst;
  }
  sink.finish();
  return 0;
}

// --------------------------------------------------------------- kernel ----

struct KernelOpts {
  std::string out;
  double mu = 0.0, nu = 0.0, lambda = 0.0;
  std::size_t tmax = 0;
  double scalingTime = 0.0;  // > 0 switches the convergence report on
  double scalingH = 0.5;
  double scalingLambda0 = 0.5;
  int halvings = 4;
};

int cmdKernel(const KernelOpts& o) {
  const specfun::PrabhakarParams params{o.mu, o.nu, o.lambda};
  const auto k = specfun::prabhakarKernel(params, o.tmax);

  const fs::path dir = resolveOutDir(o.out);
  json cfg{{"command", "kernel"}, {"mu", o.mu},       {"nu", o.nu},
           {"lambda", o.lambda},  {"tmax", o.tmax},   {"out", dir.string()}};
  if (o.scalingTime > 0.0) {
    cfg["scaling-time"] = o.scalingTime;
    cfg["scaling-h"] = o.scalingH;
    cfg["scaling-lambda0"] = o.scalingLambda0;
    cfg["halvings"] = o.halvings;
  }
  ArtifactSink sink("kernel", dir, cfg);

  sink.csv("kernel.csv", {{"t", indexColumn(o.tmax + 1)}, {"value", k}});
  sink.manifest.counters["k0"] = k[0];
  if (o.tmax >= 1) sink.manifest.counters["k1"] = k[1];
  std::printf("k(0)=%s%s\n", io::formatDouble(k[0]).c_str(),
              o.tmax >= 1 ? (" k(1)=" + io::formatDouble(k[1])).c_str() : "");

  if (o.scalingTime > 0.0) {
    const auto rep = specfun::prabhakarScalingLimit(o.mu, o.nu, o.scalingLambda0, o.scalingTime,
                                                    o.scalingH, o.halvings);
    const std::size_t n = rep.steps.size();
    std::vector<double> h(n), value(n), deviation(n);
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = rep.steps[i].h;
      value[i] = rep.steps[i].value;
      deviation[i] = rep.steps[i].deviation;
    }
    sink.csv("scaling.csv", {{"h", h}, {"value", value}, {"deviation", deviation}});
    sink.manifest.counters["scaling_target"] = rep.target;
    sink.manifest.counters["scaling_monotone"] = rep.monotone;
    std::printf("scaling target %s, deviations %s -> %s, monotone %s\n",
                io::formatDouble(rep.target).c_str(),
                io::formatDouble(deviation.front()).c_str(),
                io::formatDouble(deviation.back()).c_str(), rep.monotone ? "yes" : "no");
  }
  sink.finish();
  return 0;
}

// ---------------------------------------------------------------- ctsrw ----

struct CtsrwOpts {
  std::string model, clock, out;
  int sigma0 = 1;
  std::vector<double> times;
  double propagatorAt = 0.0;
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool freeze = false;
  CLI::Option* seedOpt = nullptr;
  CLI::Option* propagatorOpt = nullptr;
};

int cmdCtsrw(const CtsrwOpts& o) {
  const auto model = parseModel(o.model);
  const auto clock = parseClock(o.clock);
  requireSigma(o.sigma0);
  const bool wantPropagator = o.propagatorOpt && o.propagatorOpt->count() > 0;
  const bool monteCarlo = o.paths > 0;
  if (monteCarlo && (!o.seedOpt || o.seedOpt->count() == 0))
    throw std::invalid_argument("ctsrw: --paths needs --seed");
  if (!monteCarlo && o.freeze)
    throw std::invalid_argument("ctsrw: --freeze is a simulation flag; add --paths");
  if (monteCarlo && wantPropagator)
    throw std::invalid_argument("ctsrw: --propagator-at is exact-mode only; drop --paths");

  std::vector<double> times = o.times;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.empty() || times.front() < 0.0)
    throw std::invalid_argument("ctsrw: times must be nonnegative");

  const fs::path dir = resolveOutDir(o.out);
  json cfg{{"command", "ctsrw"}, {"model", o.model},  {"clock", o.clock},
           {"sigma0", o.sigma0}, {"times", o.times},  {"out", dir.string()}};
  if (wantPropagator) cfg["propagator-at"] = o.propagatorAt;
  if (monteCarlo) {
    cfg["paths"] = o.paths;
    cfg["seed"] = o.seed;
    cfg["workers"] = o.workers;
    if (o.freeze) cfg["freeze"] = true;
  }
  ArtifactSink sink("ctsrw", dir, cfg);

  const exact::WalkSpec spec{model, o.sigma0, 0};

  if (monteCarlo) {
    sink.manifest.hasSeed = true;
    sink.manifest.seed = o.seed;
    montecarlo::CtsrwConfig mc;
    mc.nPaths = o.paths;
    mc.workers = o.workers;
    mc.checkpoints = times;
    mc.freezeDirection = o.freeze;
    const auto stats = montecarlo::simulateCtsrw(spec, clock, mc, {o.seed});

    const std::size_t n = stats.checkpoints.size();
    std::vector<double> t(n), nPaths(n), mean(n), seMean(n), msd(n), seMsd(n), variance(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = stats.checkpoints[i];
      t[i] = c.time;
      nPaths[i] = static_cast<double>(c.nPaths);
      mean[i] = c.mean;
      seMean[i] = c.seMean;
      msd[i] = c.secondMoment;
      seMsd[i] = c.seSecondMoment;
      variance[i] = c.variance;
    }
    sink.csv("mc_stats.csv", {{"time", t},
                              {"n_paths", nPaths},
                              {"mean", mean},
                              {"se_mean", seMean},
                              {"msd", msd},
                              {"se_msd", seMsd},
                              {"variance", variance}});
    sink.manifest.counters["reversal_free_paths"] = stats.reversalFreePaths;
    sink.manifest.counters["capped_draws"] = stats.cappedDraws;
    sink.finish();
    return 0;
  }

  // Exact conditioning: build every clock distribution first, then tabulate
  // the discrete moments once out to the deepest support actually needed.
  std::vector<ctsrw::ClockDistribution> dists;
  dists.reserve(times.size());
  std::size_t mTop = 0;
  for (const double t : times) {
    dists.push_back(ctsrw::clockDistribution(clock, t));
    mTop = std::max(mTop, dists.back().probs.size() - 1);
  }
  const auto meanTab = exact::expectedPosition(model, o.sigma0, mTop);
  const auto msdTab = exact::msdViaK(model, mTop);

  const std::size_t n = times.size();
  std::vector<double> mean(n), meanBound(n), msd(n), msdBound(n), variance(n), states(n);
  double worstBound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto vMean = ctsrw::timeChangedMean(meanTab, dists[i]);
    const auto vMsd = ctsrw::timeChangedMean(msdTab, dists[i]);
    mean[i] = vMean.value;
    meanBound[i] = vMean.tailBound;
    msd[i] = vMsd.value;
    msdBound[i] = vMsd.tailBound;
    variance[i] = vMsd.value - vMean.value * vMean.value;
    states[i] = static_cast<double>(vMsd.terms);
    worstBound = std::max(worstBound, std::max(vMean.tailBound, vMsd.tailBound));
  }
  sink.csv("moments.csv", {{"time", times},
                           {"mean", mean},
                           {"mean_tail_bound", meanBound},
                           {"msd", msd},
                           {"msd_tail_bound", msdBound},
                           {"variance", variance},
                           {"clock_states", states}});
  sink.manifest.counters["max_tail_bound"] = worstBound;

  if (wantPropagator) {
    const auto p = ctsrw::ctsrwPropagator(spec, clock, o.propagatorAt);
    sink.lattice("propagator_t" + io::formatDouble(o.propagatorAt) + ".csv", p);
    sink.manifest.counters["propagator_mass_deficit"] = p.massDeficit;
  }
  sink.finish();
  return 0;
}

// ---------------------------------------------------------- asymptotics ----

struct AsymptoticsOpts {
  std::string model, quantity = "variance", window, out;
  int sigma0 = 1;
};

int cmdAsymptotics(const AsymptoticsOpts& o) {
  const auto model = parseModel(o.model);
  requireSigma(o.sigma0);
  const auto [lo, hi] = parseWindow(o.window);
  if (hi > kTmaxCap)
    throw std::invalid_argument("asymptotics: window top above " + std::to_string(kTmaxCap));

  const fs::path dir = resolveOutDir(o.out);
  const json cfg{{"command", "asymptotics"}, {"model", o.model},  {"sigma0", o.sigma0},
                 {"quantity", o.quantity},   {"window", o.window}, {"out", dir.string()}};
  ArtifactSink sink("asymptotics", dir, cfg);

  const auto track = exact::momentTrack(model, o.sigma0, hi);
  std::vector<double> values = o.quantity == "mean"  ? track.mean
                               : o.quantity == "msd" ? track.msd
                                                     : track.variance;
  if (o.quantity == "mean")
    for (double& v : values) v = std::fabs(v);

  const auto fit = montecarlo::exponentFit(values, lo, hi);
  const double amplitude = std::exp(fit.logIntercept);

  std::vector<double> t(hi - lo + 1), y(hi - lo + 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(lo + i);
    y[i] = values[lo + i];
  }
  sink.csv("track.csv", {{"t", t}, {o.quantity, y}});
  sink.manifest.counters["slope"] = fit.slope;
  sink.manifest.counters["amplitude"] = amplitude;
  sink.manifest.counters["r2"] = fit.r2;
  std::printf("slope %.6g amplitude %.6g r2 %.6g window [%zu, %zu]\n", fit.slope, amplitude,
              fit.r2, lo, hi);
  sink.finish();
  return 0;
}

// ------------------------------------------------------------- selftest ----

struct Smoke {
  std::string name;
  std::function<bool()> fn;
};

std::vector<Smoke> smokeChecks(const fs::path& dir) {
  using renewal::WaitingTimeModel;
  std::vector<Smoke> out;
  const auto add = [&out](std::string name, std::function<bool()> fn) {
    out.push_back({std::move(name), std::move(fn)});
  };
  const auto near = [](double a, double b, double tol) { return std::fabs(a - b) <= tol; };

  add("series.linearCombine", [] {
    const series::RealSeries a(std::vector<double>{1, 2, 3});
    const series::RealSeries b(std::vector<double>{4, 5, 6});
    const auto c = series::linearCombine(a, b, 2.0, -1.0);
    return c[0] == -2.0 && c[1] == -1.0 && c[2] == 0.0;
  });
  add("series.mul", [] {
    const series::RealSeries a(std::vector<double>{1, 1, 0});
    const auto sq = series::mul(a, a);
    return sq[0] == 1.0 && sq[1] == 2.0 && sq[2] == 1.0;
  });
  add("series.div", [near] {
    const series::RealSeries num(std::vector<double>{1, 3, 3, 1});
    const series::RealSeries den(std::vector<double>{1, 1, 0, 0});
    const auto q = series::div(num, den);
    return near(q[0], 1, 1e-15) && near(q[1], 2, 1e-15) && near(q[2], 1, 1e-15) &&
           near(q[3], 0, 1e-15);
  });
  add("series.fracPowerOneMinusU", [] {
    const auto s = series::fracPowerOneMinusU(1.0, 3);
    return s[0] == 1.0 && s[1] == -1.0 && s[2] == 0.0 && s[3] == 0.0;
  });
  add("series.scaleArgument", [] {
    const series::RealSeries a(std::vector<double>{1, 1, 1});
    const auto s = series::scaleArgument(a, 2.0);
    return s[0] == 1.0 && s[1] == 2.0 && s[2] == 4.0;
  });
  add("series.derivative", [] {
    const series::RealSeries a(std::vector<double>{5, 1, 1, 1});
    const auto d = series::derivative(a);
    return d[0] == 1.0 && d[1] == 2.0 && d[2] == 3.0;
  });
  add("series.dividedDifference", [near] {
    const auto psi = WaitingTimeModel::geometric(0.4).gfSeries(6);
    const auto dd = series::dividedDifference(psi, 2, 2);
    return near(dd.at(1, 2), dd.at(2, 1), 1e-15) && near(dd.at(0, 1), psi[2], 1e-15);
  });
  add("series.bivariateCombine", [near] {
    const auto psi = WaitingTimeModel::geometric(0.4).gfSeries(8);
    const auto base = series::dividedDifference(psi, 3, 3);
    const series::RealSeries one(std::vector<double>{1, 0, 0, 0});
    const auto same = base.addScaled(base, 1.0, 1.0).mulUnivariateU(one).divUnivariateU(one);
    for (std::size_t tau = 0; tau <= 3; ++tau)
      for (std::size_t t = 0; t <= 3; ++t)
        if (!near(same.at(tau, t), 2.0 * base.at(tau, t), 1e-14)) return false;
    const auto shifted = base.shiftU(1);
    return near(shifted.at(2, 3), base.at(2, 2), 1e-15) && shifted.at(0, 0) == 0.0;
  });

  add("renewal.pdfTable", [near] {
    const auto pdf = WaitingTimeModel::geometric(0.5).pdfTable(3);
    return pdf[0] == 0.0 && near(pdf[1], 0.5, 1e-15) && near(pdf[2], 0.25, 1e-15) &&
           near(pdf[3], 0.125, 1e-15);
  });
  add("renewal.gfSeries", [near] {
    const auto model = WaitingTimeModel::sibuya(0.5);
    const auto gf = model.gfSeries(5);
    const auto pdf = model.pdfTable(5);
    for (std::size_t k = 0; k <= 5; ++k)
      if (!near(gf[k], pdf[k], 1e-14)) return false;
    return true;
  });
  add("renewal.stateProbabilities", [near] {
    const auto p0 = renewal::stateProbabilities(WaitingTimeModel::geometric(0.5), 0, 4);
    return near(p0[0], 1, 1e-14) && near(p0[2], 0.25, 1e-14) && near(p0[4], 0.0625, 1e-14);
  });
  add("renewal.statePolynomialAtMinusOne", [near] {
    const auto alt = renewal::statePolynomialAtMinusOne(WaitingTimeModel::geometric(1.0), 3);
    return near(alt[0], 1, 1e-14) && near(alt[1], -1, 1e-14) && near(alt[2], 1, 1e-14) &&
           near(alt[3], -1, 1e-14);
  });
  add("renewal.sampleWaitingTime", [] {
    const auto model = WaitingTimeModel::geometric(1.0);
    model.prepareSampling(8);
    rng::Stream stream(12345);
    for (int i = 0; i < 5; ++i)
      if (model.sampleWaitingTime(stream, 8) != 1) return false;
    return true;
  });

  add("exact.expectedPosition", [near] {
    const auto mean = exact::expectedPosition(WaitingTimeModel::geometric(1.0), 1, 4);
    return near(mean[0], 0, 1e-15) && near(mean[1], -1, 1e-14) && near(mean[2], 0, 1e-14) &&
           near(mean[3], -1, 1e-14);
  });
  add("exact.bernoulliClosedForms", [near] {
    const auto track = exact::bernoulliClosedForms(0.5, 1, 6);
    for (std::size_t t = 0; t <= 6; ++t)
      if (!near(track.msd[t], static_cast<double>(t), 1e-13)) return false;
    return true;
  });
  add("exact.msdViaK", [] {
    const auto msd = exact::msdViaK(WaitingTimeModel::sibuya(0.5), 3);
    return msd[0] == 0.0 && msd[1] == 1.0;
  });
  add("exact.sibuyaClosedForms", [near] {
    const auto closed = exact::sibuyaClosedForms(0.5, 1, 8);
    const auto generic = exact::msdViaK(WaitingTimeModel::sibuya(0.5), 8);
    for (std::size_t t = 0; t <= 8; ++t)
      if (!near(closed.msd[t], generic[t], 1e-10)) return false;
    return true;
  });
  add("exact.segmentedGf", [near] {
    const auto g = exact::segmentedGf(WaitingTimeModel::geometric(0.3), {1.0, 0.0}, {1.0, 0.0}, 5);
    for (std::size_t k = 0; k <= 5; ++k)
      if (!near(g[k].real(), 1.0, 1e-12) || !near(g[k].imag(), 0.0, 1e-12)) return false;
    return true;
  });
  add("exact.propagator", [near] {
    const auto p = exact::propagator(WaitingTimeModel::geometric(0.5), 1, 1);
    return p.xMin == -1 && p.mass.size() == 3 && near(p.mass[0], 0.5, 1e-12) &&
           near(p.mass[1], 0.0, 1e-12) && near(p.mass[2], 0.5, 1e-12);
  });
  add("exact.occupationTimePropagator", [near] {
    const auto occ =
        exact::occupationTimePropagator(WaitingTimeModel::geometric(1.0), 2, exact::State::Plus);
    const long long i = 1 - occ.xMin;
    return i >= 0 && i < static_cast<long long>(occ.mass.size()) &&
           near(occ.mass[static_cast<std::size_t>(i)], 1.0, 1e-12);
  });
  add("exact.consistencyIdentity", [] {
    // the derivative probe uses finite differences, so allow their O(h^2) bias
    return exact::consistencyIdentity(WaitingTimeModel::geometric(0.3), 12) < 1e-7;
  });

  add("dtarp.forwardRecurrenceDensity", [near] {
    const auto model = WaitingTimeModel::geometric(0.4);
    const auto fe = dtarp::forwardRecurrenceDensity(model, 3, 4);
    const auto pdf = model.pdfTable(4);
    for (std::size_t tau = 0; tau <= 3; ++tau)
      for (std::size_t t = 0; t <= 4; ++t)
        if (!near(fe.at(tau, t), pdf[t], 1e-13)) return false;
    return true;
  });
  add("dtarp.agedStateProbabilities", [near] {
    const auto tensor = dtarp::agedStateProbabilities(WaitingTimeModel::sibuya(0.5), 3, 4, 4);
    return near(tensor.rowSum(2, 3), 1.0, 1e-12) && near(tensor.rowSum(3, 4), 1.0, 1e-12);
  });
  add("dtarp.agedStatePolynomial", [near] {
    const auto gv = dtarp::agedStatePolynomial(WaitingTimeModel::sibuya(0.5), 1.0, 3, 3);
    for (std::size_t tau = 0; tau <= 3; ++tau)
      for (std::size_t t = 0; t <= 3; ++t)
        if (!near(gv.at(tau, t), 1.0, 1e-12)) return false;
    return true;
  });

  add("specfun.prabhakarKernel", [] {
    const auto k = specfun::prabhakarKernel({0.5, 2.0, 2.0}, 4);
    return k[0] == -1.0 && k[1] == -1.0;
  });
  add("specfun.prabhakarScalingLimit", [] {
    const auto rep = specfun::prabhakarScalingLimit(0.5, 2.0, 0.5, 2.0, 0.5, 3);
    return rep.steps.size() == 4 && rep.steps.back().deviation < rep.steps.front().deviation;
  });
  add("specfun.mittagLeffler", [near] {
    return near(specfun::mittagLeffler(1.0, 1.0, -1.0), std::exp(-1.0), 1e-12);
  });
  add("specfun.fractionalPoissonStateProbs", [near] {
    const auto p = specfun::fractionalPoissonStateProbs(1.0, 1.0, 1.0, 3);
    return near(p[0], std::exp(-1.0), 1e-12) && near(p[1], std::exp(-1.0), 1e-12);
  });

  add("montecarlo.simulateSrw", [] {
    const exact::WalkSpec spec{WaitingTimeModel::geometric(0.5), 1, 10};
    montecarlo::SimConfig cfg;
    cfg.nPaths = 200;
    cfg.checkpoints = {10};
    const auto a = montecarlo::simulateSrw(spec, cfg, {3});
    const auto b = montecarlo::simulateSrw(spec, cfg, {3});
    return a.nPaths == 200 && a.checkpoints.size() == 1 &&
           a.checkpoints[0].mean == b.checkpoints[0].mean &&
           a.checkpoints[0].secondMoment == b.checkpoints[0].secondMoment &&
           std::fabs(a.checkpoints[0].mean) < 1.0;
  });
  add("montecarlo.simulateCtsrw", [] {
    const exact::WalkSpec spec{WaitingTimeModel::geometric(0.3), 1, 0};
    montecarlo::CtsrwConfig cfg;
    cfg.nPaths = 200;
    cfg.checkpoints = {1.0};
    const auto s = montecarlo::simulateCtsrw(spec, ctsrw::ClockModel::poisson(1.0), cfg, {5});
    return s.nPaths == 200 && s.checkpoints.size() == 1 && std::isfinite(s.checkpoints[0].mean);
  });
  add("montecarlo.pathEnumerationOracle", [near] {
    const exact::WalkSpec spec{WaitingTimeModel::geometric(1.0), 1, 3};
    const auto res = montecarlo::pathEnumerationOracle(spec, 3);
    return near(res.mean, -1.0, 1e-12) && near(res.distribution.massDeficit, 0.0, 1e-12);
  });
  add("montecarlo.exponentFit", [near] {
    std::vector<double> vals(41, 0.0);
    for (std::size_t t = 1; t <= 40; ++t) vals[t] = 5.0 * std::pow(static_cast<double>(t), 3.0);
    const auto fit = montecarlo::exponentFit(vals, 2, 40);
    return near(fit.slope, 3.0, 1e-10) && near(std::exp(fit.logIntercept), 5.0, 1e-8);
  });

  add("ctsrw.timeChangedMean", [near] {
    const auto dist = ctsrw::clockDistribution(ctsrw::ClockModel::poisson(1.0), 1.0);
    const std::vector<double> ones(dist.probs.size(), 1.0);
    const auto v = ctsrw::timeChangedMean(ones, dist);
    return near(v.value, 1.0, 1e-9) && v.tailBound <= 1e-9;
  });
  add("ctsrw.ctsrwPropagator", [near] {
    const exact::WalkSpec spec{WaitingTimeModel::geometric(0.5), 1, 0};
    const auto p = ctsrw::ctsrwPropagator(spec, ctsrw::ClockModel::poisson(1.0), 1.0);
    double total = 0.0;
    for (const double m : p.mass) total += m;
    return near(total, 1.0, 1e-8) && p.massDeficit <= 1e-8;
  });
  add("ctsrw.telegraphExpectedPosition", [near] {
    return near(ctsrw::telegraphExpectedPosition(1.0, 0.5, 50.0), 1.0, 1e-10) &&
           ctsrw::telegraphExpectedPosition(1.0, 0.5, 0.0) == 0.0;
  });
  add("ctsrw.fractionalTelegraphExpectedPosition", [near] {
    const double a = ctsrw::fractionalTelegraphExpectedPosition(2.0, 0.7, 1.0, 0.9);
    const double b = ctsrw::telegraphExpectedPosition(2.0, 0.7, 0.9);
    return near(a, b, 1e-12);
  });

  add("cli.run", [dir] {
    const fs::path sub = dir / "api-exact";
    return run({"exact", "--model", "geometric:p=0.5", "--tmax", "5", "--out", sub.string()}) ==
               0 &&
           fs::exists(sub / "moments.csv") && fs::exists(sub / "manifest.json");
  });
  add("cli.subcommands", [dir] {
    const fs::path sub = dir / "api-kernel";
    return run({"kernel", "--mu", "0.5", "--nu", "2", "--lambda", "2", "--tmax", "3", "--out",
                sub.string()}) == 0 &&
           fs::exists(sub / "kernel.csv");
  });

  return out;
}

// std::cout diverted into a buffer while a smoke check runs, so nested runs
// cannot interleave with the table printed through std::printf.
struct CoutCapture {
  std::stringstream buffer;
  std::streambuf* saved;
  CoutCapture() : saved(std::cout.rdbuf(buffer.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(saved); }
};

struct SelftestOpts {
  std::string out;
};

int cmdSelftest(const SelftestOpts& o) {
  const fs::path dir = resolveOutDir(o.out);
  const json cfg{{"command", "selftest"}, {"out", dir.string()}};
  ArtifactSink sink("selftest", dir, cfg);

  int failures = 0;
  const auto smoke = smokeChecks(dir);
  std::printf("api checks:\n");
  for (const auto& check : smoke) {
    bool ok = false;
    std::string note;
    try {
      const CoutCapture capture;
      ok = check.fn();
    } catch (const std::exception& e) {
      note = e.what();
    }
    std::printf("  [%s] %-42s %s\n", ok ? "PASS" : "FAIL", check.name.c_str(), note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  std::printf("verification suite:\n");
  std::fflush(stdout);
  const auto checks = verify::runAll();
  for (const auto& c : checks) {
    std::printf("  [%s] %-22s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    if (!c.pass) ++failures;
  }
  std::printf("selftest: %zu api checks, %zu verification checks, %d failures\n", smoke.size(),
              checks.size(), failures);
  std::fflush(stdout);

  sink.manifest.counters["api_checks"] = smoke.size();
  sink.manifest.counters["verification_checks"] = checks.size();
  sink.manifest.counters["failures"] = failures;
  sink.finish();
  return failures == 0 ? 0 : 1;
}

// ----------------------------------------------------------- config file ----

// Expands a config JSON into the equivalent command line: {"command": "exact",
// "tmax": 100, ...} becomes ["exact", "--tmax=100", ...]. A manifest written
// by an earlier run works directly because its "config" member is unwrapped
// first. Explicit command-line flags win over file entries.
std::vector<std::string> tokensFromConfig(json doc, const std::vector<std::string>& extras) {
  if (doc.is_object() && doc.contains("tool") && doc.contains("config"))
    doc = doc.at("config");
  if (!doc.is_object()) throw std::invalid_argument("--config: expected a JSON object");
  if (!doc.contains("command") || !doc.at("command").is_string())
    throw std::invalid_argument("--config: missing string field 'command'");

  std::set<std::string> overridden;
  for (const auto& a : extras)
    if (a.rfind("--", 0) == 0) overridden.insert(a.substr(2, a.find('=') - 2));

  std::vector<std::string> tokens{doc.at("command").get<std::string>()};
  for (const auto& [key, value] : doc.items()) {
    if (key == "command" || key == "config") continue;
    if (overridden.count(key)) continue;
    const auto scalar = [&key](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number_float()) return io::formatDouble(v.get<double>());
      throw std::invalid_argument("--config: unsupported value for '" + key + "'");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back("--" + key);
    } else if (value.is_array()) {
      for (const auto& v : value) tokens.push_back("--" + key + "=" + scalar(v));
    } else {
      tokens.push_back("--" + key + "=" + scalar(value));
    }
  }
  tokens.insert(tokens.end(), extras.begin(), extras.end());
  return tokens;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  // --config FILE expands into the equivalent command line and reparses, so
  // config files and manifests replay through the same validation as flags.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config") continue;
    if (i + 1 >= args.size()) {
      std::cerr << "error: --config expects a file path\n";
      return 2;
    }
    try {
      std::ifstream in(args[i + 1]);
      if (!in) throw std::invalid_argument("--config: cannot open '" + args[i + 1] + "'");
      std::vector<std::string> extras;
      for (std::size_t j = 0; j < args.size(); ++j)
        if (j != i && j != i + 1) extras.push_back(args[j]);
      return run(tokensFromConfig(json::parse(in), extras));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"squirrel random walk: exact transforms, aging, subordination, Monte Carlo"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  ExactOpts ex;
  auto* cmdEx = app.add_subcommand("exact", "transform-based moments and propagators");
  cmdEx->add_option("--model", ex.model, "waiting-time law, e.g. geometric:p=0.5")->required();
  cmdEx->add_option("--sigma0", ex.sigma0, "initial direction, +1 or -1");
  cmdEx->add_option("--tmax", ex.tmax, "horizon")->required();
  cmdEx->add_flag("--symmetrize", ex.symmetrize, "average the two initial directions");
  cmdEx->add_option("--propagator-at", ex.propagatorAt, "write the lattice law at these times");
  cmdEx->add_option("--occupation-at", ex.occupationAt, "write the occupation-time law here");
  cmdEx->add_option("--occupation-side", ex.occupationSide, "plus or minus")
      ->check(CLI::IsMember({"plus", "minus"}));
  cmdEx->add_option("--out", ex.out, "output directory (default $SRW_OUT_DIR, then ./out)");

  SimulateOpts sim;
  auto* cmdSim = app.add_subcommand("simulate", "seeded ensemble of discrete walks");
  cmdSim->add_option("--model", sim.model, "waiting-time law")->required();
  cmdSim->add_option("--sigma0", sim.sigma0, "initial direction, +1 or -1");
  cmdSim->add_option("--tmax", sim.tmax, "horizon")->required();
  cmdSim->add_option("--paths", sim.paths, "ensemble size")->required();
  cmdSim->add_option("--seed", sim.seed, "master seed")->required();
  cmdSim->add_option("--workers", sim.workers, "worker threads (result is worker-independent)");
  cmdSim->add_option("--checkpoints", sim.checkpoints, "statistics times (default: a full grid)");
  cmdSim->add_option("--histogram-at", sim.histogramAt, "also record histograms at these times");
  cmdSim->add_option("--out", sim.out, "output directory");

  OracleOpts ora;
  auto* cmdOra = app.add_subcommand("oracle", "brute-force path enumeration vs the transforms");
  cmdOra->add_option("--model", ora.model, "waiting-time law")->required();
  cmdOra->add_option("--sigma0", ora.sigma0, "initial direction, +1 or -1");
  cmdOra->add_option("--t", ora.t, "time to enumerate (2^t paths, t <= 14)")->required();
  cmdOra->add_option("--out", ora.out, "output directory");

  DtarpOpts dta;
  auto* cmdDta = app.add_subcommand("dtarp", "aged renewal tables");
  cmdDta->add_option("--model", dta.model, "waiting-time law")->required();
  cmdDta->add_option("--taumax", dta.taumax, "largest aging span")->required();
  cmdDta->add_option("--tmax", dta.tmax, "horizon after aging")->required();
  cmdDta->add_option("--mmax", dta.mmax, "largest tabulated count (default tmax)");
  cmdDta->add_flag("--states", dta.states, "also dump the full state tensor");
  dta.vOpt = cmdDta->add_option("--v", dta.v, "also write the state polynomial at this v");
  cmdDta->add_option("--out", dta.out, "output directory");

  KernelOpts ker;
  auto* cmdKer = app.add_subcommand("kernel", "discrete Prabhakar kernel values");
  cmdKer->add_option("--mu", ker.mu, "lower index, in (0, 1]")->required();
  cmdKer->add_option("--nu", ker.nu, "upper index, positive")->required();
  cmdKer->add_option("--lambda", ker.lambda, "argument, positive and not 1")->required();
  cmdKer->add_option("--tmax", ker.tmax, "horizon")->required();
  cmdKer->add_option("--scaling-time", ker.scalingTime,
                     "report h -> 0 convergence at this continuum time");
  cmdKer->add_option("--scaling-h", ker.scalingH, "starting step (halved each stage)");
  cmdKer->add_option("--scaling-lambda0", ker.scalingLambda0, "continuum rate");
  cmdKer->add_option("--halvings", ker.halvings, "number of halvings");
  cmdKer->add_option("--out", ker.out, "output directory");

  CtsrwOpts cts;
  auto* cmdCts = app.add_subcommand("ctsrw", "walk subordinated to a renewal clock");
  cmdCts->add_option("--model", cts.model, "waiting-time law")->required();
  cmdCts->add_option("--clock", cts.clock, "clock law, e.g. fracpoisson:alpha=0.8,xi=1")
      ->required();
  cmdCts->add_option("--sigma0", cts.sigma0, "initial direction, +1 or -1");
  cmdCts->add_option("--times", cts.times, "evaluation times")->required();
  cts.propagatorOpt =
      cmdCts->add_option("--propagator-at", cts.propagatorAt, "lattice law at this time");
  cmdCts->add_option("--paths", cts.paths, "switch to Monte Carlo with this many paths");
  cts.seedOpt = cmdCts->add_option("--seed", cts.seed, "master seed (required with --paths)");
  cmdCts->add_option("--workers", cts.workers, "worker threads");
  cmdCts->add_flag("--freeze", cts.freeze, "suppress reversals (frozen-direction ensemble)");
  cmdCts->add_option("--out", cts.out, "output directory");

  AsymptoticsOpts asy;
  auto* cmdAsy = app.add_subcommand("asymptotics", "power-law fit of an exact moment track");
  cmdAsy->add_option("--model", asy.model, "waiting-time law")->required();
  cmdAsy->add_option("--sigma0", asy.sigma0, "initial direction, +1 or -1");
  cmdAsy->add_option("--quantity", asy.quantity, "mean, msd, or variance")
      ->check(CLI::IsMember({"mean", "msd", "variance"}));
  cmdAsy->add_option("--window", asy.window, "fit window LO:HI")->required();
  cmdAsy->add_option("--out", asy.out, "output directory");

  SelftestOpts sel;
  auto* cmdSel = app.add_subcommand("selftest", "API smoke checks plus the verification suite");
  cmdSel->add_option("--out", sel.out, "output directory");

  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.emplace_back("srw");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(full.size());
  for (auto& s : full) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cmdEx->parsed()) return cmdExact(ex);
    if (cmdSim->parsed()) return cmdSimulate(sim);
    if (cmdOra->parsed()) return cmdOracle(ora);
    if (cmdDta->parsed()) return cmdDtarp(dta);
    if (cmdKer->parsed()) return cmdKernel(ker);
    if (cmdCts->parsed()) return cmdCtsrw(cts);
    if (cmdAsy->parsed()) return cmdAsymptotics(asy);
    if (cmdSel->parsed()) return cmdSelftest(sel);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc) - 1 : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace srw::cli
