#include "srw/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace srw::montecarlo {

namespace {

constexpr std::size_t kChunk = 1024;

struct HistSpec {
  std::size_t checkpointIndex = 0;
  long long xMin = 0;
  std::size_t bins = 0;
};

struct ChunkAccum {
  std::vector<double> sx, sx2, sx4;
  std::vector<std::vector<std::uint64_t>> hist;
  std::uint64_t reversalFree = 0;
};

// Runs pathFn over all paths in fixed 1024-path chunks. Workers pull chunk
// indices from a shared counter, but each chunk is accumulated sequentially
// in path order and chunks are merged in index order afterwards, so the
// result is bitwise independent of the worker count. pathFn(index, stream,
// values) must fill one value per checkpoint and return whether the path
// kept its initial direction throughout.
template <class PathFn>
EnsembleStats runEnsemble(std::uint64_t nPaths, unsigned workers, std::uint64_t masterSeed,
                          const std::vector<double>& times, const std::vector<HistSpec>& hists,
                          PathFn&& pathFn) {
  const std::size_t nCheckpoints = times.size();
  const std::uint64_t nChunks = (nPaths + kChunk - 1) / kChunk;
  std::vector<ChunkAccum> accums(nChunks);

  std::atomic<std::uint64_t> nextChunk{0};
  std::atomic<bool> badHistogram{false};

  auto work = [&] {
    std::vector<double> values(nCheckpoints);
    for (;;) {
      const std::uint64_t c = nextChunk.fetch_add(1, std::memory_order_relaxed);
      if (c >= nChunks) return;
      ChunkAccum& acc = accums[c];
      acc.sx.assign(nCheckpoints, 0.0);
      acc.sx2.assign(nCheckpoints, 0.0);
      acc.sx4.assign(nCheckpoints, 0.0);
      acc.hist.resize(hists.size());
      for (std::size_t h = 0; h < hists.size(); ++h) acc.hist[h].assign(hists[h].bins, 0);

      const std::uint64_t lo = c * kChunk;
      const std::uint64_t hi = std::min(nPaths, lo + kChunk);
      for (std::uint64_t p = lo; p < hi; ++p) {
        rng::Stream stream = rng::pathStream(masterSeed, p);
        if (pathFn(p, stream, values)) ++acc.reversalFree;
        for (std::size_t k = 0; k < nCheckpoints; ++k) {
          const double v = values[k];
          const double v2 = v * v;
          acc.sx[k] += v;
          acc.sx2[k] += v2;
          acc.sx4[k] += v2 * v2;
        }
        for (std::size_t h = 0; h < hists.size(); ++h) {
          const double v = values[hists[h].checkpointIndex];
          const long long idx = std::llround(v) - hists[h].xMin;
          if (idx < 0 || static_cast<std::size_t>(idx) >= hists[h].bins) {
            badHistogram.store(true, std::memory_order_relaxed);
            continue;
          }
          ++acc.hist[h][static_cast<std::size_t>(idx)];
        }
      }
    }
  };

  const unsigned nWorkers = std::max(1u, std::min<unsigned>(workers, 64));
  if (nWorkers == 1 || nChunks <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nWorkers);
    for (unsigned w = 0; w < nWorkers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (badHistogram.load())
    throw std::runtime_error("runEnsemble: path value fell outside its histogram range");

  EnsembleStats out;
  out.nPaths = nPaths;
  out.checkpoints.resize(nCheckpoints);
  for (std::size_t k = 0; k < nCheckpoints; ++k) {
    double sx = 0.0, sx2 = 0.0, sx4 = 0.0;
    for (const ChunkAccum& acc : accums) {
      sx += acc.sx[k];
      sx2 += acc.sx2[k];
      sx4 += acc.sx4[k];
    }
    CheckpointStats& cp = out.checkpoints[k];
    cp.time = times[k];
    cp.nPaths = nPaths;
    const double n = static_cast<double>(nPaths);
    cp.mean = sx / n;
    cp.secondMoment = sx2 / n;
    cp.variance = std::max(0.0, cp.secondMoment - cp.mean * cp.mean);
    cp.seMean = std::sqrt(cp.variance / n);
    cp.seSecondMoment =
        std::sqrt(std::max(0.0, sx4 / n - cp.secondMoment * cp.secondMoment) / n);
  }
  for (std::size_t h = 0; h < hists.size(); ++h) {
    CheckpointStats& cp = out.checkpoints[hists[h].checkpointIndex];
    cp.hasHistogram = true;
    cp.histXMin = hists[h].xMin;
    cp.histogram.assign(hists[h].bins, 0);
    for (const ChunkAccum& acc : accums)
      for (std::size_t i = 0; i < hists[h].bins; ++i) cp.histogram[i] += acc.hist[h][i];
  }
  for (const ChunkAccum& acc : accums) out.reversalFreePaths += acc.reversalFree;
  return out;
}

void validateWalkSpec(const exact::WalkSpec& spec) {
  if (spec.sigma0 != 1 && spec.sigma0 != -1)
    throw std::invalid_argument("simulate: sigma0 must be +1 or -1");
}

}  // namespace

EnsembleStats simulateSrw(const exact::WalkSpec& spec, const SimConfig& cfg,
                          const RngPolicy& rng) {
  validateWalkSpec(spec);
  if (cfg.nPaths == 0) throw std::invalid_argument("simulateSrw: nPaths must be positive");
  if (cfg.checkpoints.empty())
    throw std::invalid_argument("simulateSrw: at least one checkpoint required");
  for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) {
    if (cfg.checkpoints[k] > spec.horizon)
      throw std::invalid_argument("simulateSrw: checkpoint beyond the horizon");
    if (k > 0 && cfg.checkpoints[k] <= cfg.checkpoints[k - 1])
      throw std::invalid_argument("simulateSrw: checkpoints must be strictly increasing");
  }

  std::vector<HistSpec> hists;
  for (const std::size_t t : cfg.histogramAt) {
    const auto it = std::find(cfg.checkpoints.begin(), cfg.checkpoints.end(), t);
    if (it == cfg.checkpoints.end())
      throw std::invalid_argument("simulateSrw: histogram time is not a checkpoint");
    HistSpec h;
    h.checkpointIndex = static_cast<std::size_t>(it - cfg.checkpoints.begin());
    h.xMin = -static_cast<long long>(t);
    h.bins = 2 * t + 1;
    hists.push_back(h);
  }

  const renewal::WaitingTimeModel& model = spec.model;
  model.prepareSampling(spec.horizon);
  const std::uint64_t cappedBefore = model.truncatedDraws();

  std::vector<double> times(cfg.checkpoints.begin(), cfg.checkpoints.end());
  const std::vector<std::size_t>& cks = cfg.checkpoints;
  const std::size_t horizon = spec.horizon;
  const int sigma0 = spec.sigma0;

  auto pathFn = [&](std::uint64_t, rng::Stream& stream, std::vector<double>& values) {
    int sign = sigma0;
    long long x = 0;
    std::size_t reversals = 0;
    std::size_t k = 0;
    while (k < cks.size() && cks[k] == 0) values[k++] = 0.0;
    std::size_t nextArrival = model.sampleWaitingTime(stream, horizon);
    for (std::size_t r = 1; r <= horizon; ++r) {
      if (r == nextArrival) {
        sign = -sign;
        ++reversals;
        nextArrival = r < horizon ? r + model.sampleWaitingTime(stream, horizon - r)
                                  : horizon + 1;
      }
      x += sign;
      if (k < cks.size() && cks[k] == r) values[k++] = static_cast<double>(x);
    }
    return reversals == 0;
  };

  EnsembleStats out =
      runEnsemble(cfg.nPaths, cfg.workers, rng.masterSeed, times, hists, pathFn);
  out.cappedDraws = model.truncatedDraws() - cappedBefore;
  return out;
}

EnsembleStats simulateCtsrw(const exact::WalkSpec& spec, const ctsrw::ClockModel& clock,
                            const CtsrwConfig& cfg, const RngPolicy& rng) {
  validateWalkSpec(spec);
  if (cfg.nPaths == 0) throw std::invalid_argument("simulateCtsrw: nPaths must be positive");
  if (cfg.checkpoints.empty())
    throw std::invalid_argument("simulateCtsrw: at least one checkpoint required");
  for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) {
    if (!(cfg.checkpoints[k] >= 0.0))
      throw std::invalid_argument("simulateCtsrw: checkpoints must be nonnegative");
    if (k > 0 && cfg.checkpoints[k] <= cfg.checkpoints[k - 1])
      throw std::invalid_argument("simulateCtsrw: checkpoints must be strictly increasing");
  }

  const renewal::WaitingTimeModel& model = spec.model;
  const double tLast = cfg.checkpoints.back();
  // Operational horizon bound for the sampling table: twice the clock's
  // characteristic count scale is already beyond any reachable support.
  const double countScale = std::pow(clock.xi, 1.0 / clock.alpha) * tLast;
  const auto tableBound = static_cast<std::size_t>(std::min(2.0 * countScale + 64.0, 1.0e7));
  model.prepareSampling(tableBound);
  const std::uint64_t cappedBefore = model.truncatedDraws();

  const std::vector<double>& cks = cfg.checkpoints;
  const int sigma0 = spec.sigma0;
  const bool freeze = cfg.freezeDirection;
  const double alpha = clock.alpha;
  const double xi = clock.xi;

  auto pathFn = [&](std::uint64_t, rng::Stream& stream, std::vector<double>& values) {
    std::vector<std::size_t> mAt(cks.size());
    std::size_t m = 0;
    double epoch = mlInterarrival(stream, alpha, xi);
    for (std::size_t k = 0; k < cks.size(); ++k) {
      while (epoch <= cks[k]) {
        ++m;
        epoch += mlInterarrival(stream, alpha, xi);
      }
      mAt[k] = m;
    }
    if (freeze) {
      for (std::size_t k = 0; k < cks.size(); ++k)
        values[k] = static_cast<double>(sigma0) * static_cast<double>(mAt[k]);
      return true;
    }

    const std::size_t opHorizon = mAt.back();
    int sign = sigma0;
    long long x = 0;
    std::size_t reversals = 0;
    std::size_t k = 0;
    while (k < cks.size() && mAt[k] == 0) values[k++] = 0.0;
    std::size_t nextArrival = model.sampleWaitingTime(stream, opHorizon);
    for (std::size_t r = 1; r <= opHorizon; ++r) {
      if (r == nextArrival) {
        sign = -sign;
        ++reversals;
        nextArrival = r < opHorizon ? r + model.sampleWaitingTime(stream, opHorizon - r)
                                    : opHorizon + 1;
      }
      x += sign;
      while (k < cks.size() && mAt[k] == r) values[k++] = static_cast<double>(x);
    }
    return reversals == 0;
  };

  EnsembleStats out =
      runEnsemble(cfg.nPaths, cfg.workers, rng.masterSeed, cks, {}, pathFn);
  out.cappedDraws = model.truncatedDraws() - cappedBefore;
  return out;
}

double mlInterarrival(rng::Stream& stream, double alpha, double xi) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("mlInterarrival: alpha must lie in (0, 1]");
  if (!(xi > 0.0)) throw std::invalid_argument("mlInterarrival: xi must be positive");
  const double u = stream.uniform();
  if (alpha == 1.0) return -std::log(u) / xi;
  const double v = stream.uniform();
  const double apv = alpha * std::numbers::pi;
  // sin(a pi)/tan(a pi v) - cos(a pi) = sin(a pi (1-v)) / sin(a pi v) > 0
  const double mix = std::sin(apv) / std::tan(apv * v) - std::cos(apv);
  return std::pow(xi, -1.0 / alpha) * -std::log(u) * std::pow(mix, 1.0 / alpha);
}

OracleResult pathEnumerationOracle(const exact::WalkSpec& spec, std::size_t t) {
  validateWalkSpec(spec);
  if (t > 14)
    throw std::invalid_argument("pathEnumerationOracle: enumeration is limited to t <= 14");
  const std::vector<double> psi = spec.model.pdfTable(t);
  const std::vector<double> surv = spec.model.survivalTable(t);

  OracleResult out;
  out.distribution.xMin = -static_cast<long long>(t);
  out.distribution.mass.assign(2 * t + 1, 0.0);

  const std::uint32_t nPatterns = 1u << t;
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < nPatterns; ++mask) {
    double w = 1.0;
    std::size_t last = 0;
    int sign = spec.sigma0;
    long long x = 0;
    for (std::size_t r = 1; r <= t && w != 0.0; ++r) {
      if ((mask >> (r - 1)) & 1u) {
        w *= psi[r - last];
        last = r;
        sign = -sign;
      }
      x += sign;
    }
    if (w == 0.0) continue;
    w *= surv[t - last];
    const double xd = static_cast<double>(x);
    out.distribution.mass[static_cast<std::size_t>(x + static_cast<long long>(t))] += w;
    out.mean += w * xd;
    out.secondMoment += w * xd * xd;
    total += w;
  }
  out.distribution.massDeficit = std::fabs(1.0 - total);
  return out;
}

PowerLawFit exponentFitPairs(const std::vector<double>& times,
                             const std::vector<double>& values) {
  if (times.size() != values.size())
    throw std::invalid_argument("exponentFitPairs: length mismatch");
  if (times.size() < 2) throw std::invalid_argument("exponentFitPairs: need at least two points");
  const std::size_t n = times.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("exponentFitPairs: window must be strictly positive");
    lx[i] = std::log(times[i]);
    ly[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("exponentFitPairs: degenerate abscissae");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.logIntercept = my - fit.slope * mx;
  double ssRes = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.logIntercept + fit.slope * lx[i]);
    ssRes += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssRes / syy : 1.0;
  return fit;
}

namespace {

void checkWindow(const std::vector<double>& values, std::size_t tLo, std::size_t tHi) {
  if (tLo < 1 || tLo >= tHi || tHi >= values.size())
    throw std::invalid_argument("exponent window must satisfy 1 <= tLo < tHi < size");
}

}  // namespace

PowerLawFit exponentFit(const std::vector<double>& values, std::size_t tLo, std::size_t tHi) {
  checkWindow(values, tLo, tHi);
  std::vector<double> ts, ys;
  ts.reserve(tHi - tLo + 1);
  ys.reserve(tHi - tLo + 1);
  for (std::size_t t = tLo; t <= tHi; ++t) {
    ts.push_back(static_cast<double>(t));
    ys.push_back(values[t]);
  }
  return exponentFitPairs(ts, ys);
}

double pinnedAmplitude(const std::vector<double>& values, double exponent, std::size_t tLo,
                       std::size_t tHi) {
  checkWindow(values, tLo, tHi);
  double acc = 0.0;
  for (std::size_t t = tLo; t <= tHi; ++t)
    acc += values[t] * std::pow(static_cast<double>(t), -exponent);
  return acc / static_cast<double>(tHi - tLo + 1);
}

double chiSquarePValue(const std::vector<std::uint64_t>& observed,
                       const std::vector<double>& expected, double minExpected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chiSquarePValue: length mismatch");
  if (observed.empty()) throw std::invalid_argument("chiSquarePValue: empty input");
  double n = 0.0;
  for (const std::uint64_t o : observed) n += static_cast<double>(o);
  if (!(n > 0.0)) throw std::invalid_argument("chiSquarePValue: no observations");

  std::vector<double> oCls, eCls;
  double oAcc = 0.0, eAcc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    oAcc += static_cast<double>(observed[i]);
    eAcc += expected[i] * n;
    if (eAcc >= minExpected) {
      oCls.push_back(oAcc);
      eCls.push_back(eAcc);
      oAcc = 0.0;
      eAcc = 0.0;
    }
  }
  if (oAcc > 0.0 || eAcc > 0.0) {
    if (eCls.empty()) throw std::invalid_argument("chiSquarePValue: expected mass too dilute");
    oCls.back() += oAcc;
    eCls.back() += eAcc;
  }
  if (eCls.size() < 2)
    throw std::invalid_argument("chiSquarePValue: fewer than two classes after pooling");

  double stat = 0.0;
  for (std::size_t i = 0; i < eCls.size(); ++i) {
    const double d = oCls[i] - eCls[i];
    stat += d * d / eCls[i];
  }
  const double dof = static_cast<double>(eCls.size() - 1);
  return regularizedGammaQ(dof / 2.0, stat / 2.0);
}

double regularizedGammaQ(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("regularizedGammaQ: a must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("regularizedGammaQ: x must be nonnegative");
  if (x == 0.0) return 1.0;
  const double logScale = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // lower series: P = x^a e^-x / Gamma(a) * sum x^k / (a)_{k+1}
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 100000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(logScale);
  }
  // Lentz continued fraction for Q directly
  double b = x + 1.0 - a;
  double c = 1e308;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 100000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(logScale) * h;
}

}  // namespace srw::montecarlo
