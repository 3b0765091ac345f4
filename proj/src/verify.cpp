#include "srw/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

#include "srw/ctsrw.hpp"
#include "srw/dtarp.hpp"
#include "srw/montecarlo.hpp"
#include "srw/renewal.hpp"
#include "srw/specfun.hpp"
#include "srw/srw_exact.hpp"

namespace srw::verify {

namespace {

using renewal::WaitingTimeModel;

double now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

// deviation normalized by max(1, |reference|): absolute near zero, relative
// on large magnitudes
double normDev(double got, double ref) {
  return std::fabs(got - ref) / std::max(1.0, std::fabs(ref));
}

Check timed(const char* name, double budgetSeconds, bool ok, const std::string& detail,
            double t0) {
  Check c;
  c.name = name;
  c.seconds = now() - t0;
  c.pass = ok && c.seconds < budgetSeconds;
  c.detail = detail + fmt("; %.1fs of %.0fs", c.seconds, budgetSeconds);
  return c;
}

Check oracleEquivalence() {
  const double t0 = now();
  const WaitingTimeModel models[] = {
      WaitingTimeModel::geometric(0.3),  WaitingTimeModel::geometric(0.5),
      WaitingTimeModel::geometric(1.0),  WaitingTimeModel::sibuya(0.3),
      WaitingTimeModel::sibuya(0.5),     WaitingTimeModel::sibuya(0.8),
      WaitingTimeModel::fractionalBernoulli(0.7, 1.5),
      WaitingTimeModel::custom({0.0, 0.2, 0.5, 0.3})};
  double worst = 0.0;
  for (const auto& m : models)
    for (std::size_t t = 0; t <= 14; ++t) {
      exact::WalkSpec spec{m, 1, t};
      const auto orc = montecarlo::pathEnumerationOracle(spec, t);
      const auto prop = exact::propagator(m, 1, t);
      if (orc.distribution.xMin != prop.xMin ||
          orc.distribution.mass.size() != prop.mass.size())
        return timed("oracle-equivalence", 60.0, false, "support mismatch", t0);
      for (std::size_t i = 0; i < prop.mass.size(); ++i)
        worst = std::max(worst, std::fabs(orc.distribution.mass[i] - prop.mass[i]));
    }
  return timed("oracle-equivalence", 60.0, worst < 1e-11,
               fmt("max |enumeration - transform| %.2e (budget 1e-11)", worst), t0);
}

Check bernoulliClosedForms() {
  const double t0 = now();
  double worst = 0.0;
  for (double p : {0.1, 0.3, 0.5, 0.9, 1.0})
    for (int s0 : {1, -1}) {
      const auto gf = exact::momentTrack(WaitingTimeModel::geometric(p), s0, 500);
      const auto cf = exact::bernoulliClosedForms(p, s0, 500);
      for (std::size_t t = 0; t <= 500; ++t) {
        worst = std::max(worst, normDev(gf.mean[t], cf.mean[t]));
        worst = std::max(worst, normDev(gf.msd[t], cf.msd[t]));
        worst = std::max(worst, normDev(gf.variance[t], cf.variance[t]));
      }
    }
  return timed("bernoulli-closed-forms", 60.0, worst < 1e-12,
               fmt("worst moment deviation %.2e (budget 1e-12)", worst), t0);
}

Check sibuyaExactMsd() {
  const double t0 = now();
  double worst = 0.0;
  bool unitFirstStep = true;
  for (double mu : {0.25, 0.5, 0.75}) {
    const auto m = WaitingTimeModel::sibuya(mu);
    const auto k = exact::msdViaK(m, 200);
    const auto cf = exact::sibuyaClosedForms(mu, 1, 200);
    for (std::size_t t = 0; t <= 200; ++t) worst = std::max(worst, normDev(k[t], cf.msd[t]));
    unitFirstStep = unitFirstStep && k[1] == 1.0 && cf.msd[1] == 1.0;
  }
  return timed("sibuya-exact-msd", 60.0, worst < 1e-10 && unitFirstStep,
               fmt("route deviation %.2e (budget 1e-10); first step unit: %s", worst,
                   unitFirstStep ? "exact" : "BROKEN"),
               t0);
}

Check ballisticLaw() {
  const double t0 = now();
  const double mu = 0.5;
  const auto cf = exact::sibuyaClosedForms(mu, 1, 10000);
  const auto fit = montecarlo::exponentFit(cf.variance, 1000, 10000);
  const double amp = montecarlo::pinnedAmplitude(cf.variance, 2.0, 1000, 10000);
  const double ampRatio = amp / (1.0 - mu);
  const bool ok = std::fabs(fit.slope - 2.0) <= 0.05 && std::fabs(ampRatio - 1.0) <= 0.10;
  return timed("ballistic-law", 60.0, ok,
               fmt("variance slope %.4f (2.00 +- 0.05), prefactor ratio %.3f (1 +- 0.10)",
                   fit.slope, ampRatio),
               t0);
}

Check escapeLaw() {
  const double t0 = now();
  bool ok = true;
  std::string detail;
  for (double mu : {0.25, 0.5}) {
    const auto cf = exact::sibuyaClosedForms(mu, 1, 10000);
    std::vector<double> absMean(cf.mean.size());
    for (std::size_t i = 0; i < cf.mean.size(); ++i) absMean[i] = std::fabs(cf.mean[i]);
    const auto fit = montecarlo::exponentFit(absMean, 1000, 10000);
    const double amp = montecarlo::pinnedAmplitude(absMean, 1.0 - mu, 1000, 10000);
    const double ampRatio = amp * 2.0 * std::tgamma(2.0 - mu);
    ok = ok && std::fabs(fit.slope - (1.0 - mu)) <= 0.05 && std::fabs(ampRatio - 1.0) <= 0.10;
    detail += fmt("mu=%.2f slope %.3f (%.2f +- 0.05) prefactor ratio %.3f; ", mu, fit.slope,
                  1.0 - mu, ampRatio);
  }
  return timed("escape-law", 60.0, ok, detail, t0);
}

Check broadDensityMsd() {
  const double t0 = now();
  const auto broad = exact::msdViaK(WaitingTimeModel::broadPowerTail(1.5), 10000);
  const auto bFit = montecarlo::exponentFit(broad, 1000, 10000);
  const auto light = exact::msdViaK(WaitingTimeModel::custom({0.0, 0.2, 0.5, 0.3}), 10000);
  const auto lFit = montecarlo::exponentFit(light, 1000, 10000);
  const bool ok = std::fabs(bFit.slope - 1.5) <= 0.1 && std::fabs(lFit.slope - 1.0) <= 0.05;
  return timed("broad-density-msd", 120.0, ok,
               fmt("broad slope %.4f (1.5 +- 0.1), light slope %.4f (1.0 +- 0.05)",
                   bFit.slope, lFit.slope),
               t0);
}

Check agingRenewal() {
  const double t0 = now();
  // memoryless first-event density: identical rows whatever the age
  const auto fe = dtarp::forwardRecurrenceDensity(WaitingTimeModel::geometric(0.4), 64, 64);
  double rowDev = 0.0;
  for (std::size_t tau = 1; tau <= 64; ++tau)
    for (std::size_t t = 0; t <= 64; ++t)
      rowDev = std::max(rowDev, std::fabs(fe.at(tau, t) - fe.at(0, t)));

  // aged count law stays normalized
  double sumDev = 0.0;
  for (const auto& m : {WaitingTimeModel::geometric(0.4), WaitingTimeModel::sibuya(0.5)}) {
    const auto tensor = dtarp::agedStateProbabilities(m, 64, 64, 64);
    for (std::size_t tau = 0; tau <= 64; ++tau)
      for (std::size_t t = 0; t <= 64; ++t)
        sumDev = std::max(sumDev, std::fabs(tensor.rowSum(tau, t) - 1.0));
  }

  // strongly aged fat-tailed row against its separable power form
  const double mu = 0.5;
  const auto feS = dtarp::forwardRecurrenceDensity(WaitingTimeModel::sibuya(mu), 1000, 20);
  const double power = std::pow(1000.0, mu - 1.0) / std::pow(20.0, mu) /
                       (std::tgamma(1.0 - mu) * std::tgamma(mu));
  const double agedRatio = feS.at(1000, 20) / power;

  const bool ok = rowDev < 1e-12 && sumDev < 1e-10 && std::fabs(agedRatio - 1.0) <= 0.15;
  return timed("aging-renewal", 60.0, ok,
               fmt("row dev %.2e (1e-12), normalization dev %.2e (1e-10), "
                   "aged ratio %.4f (1 +- 0.15)",
                   rowDev, sumDev, agedRatio),
               t0);
}

Check prabhakarKernel() {
  const double t0 = now();
  bool anchors = true;
  for (double mu : {0.25, 0.5, 0.75})
    for (double nu : {2.0, mu + 2.0, mu + 3.0}) {
      const auto k = specfun::prabhakarKernel({mu, nu, 2.0}, 1);
      anchors = anchors && k[0] == -1.0 && k[1] == 2.0 * mu - nu;
    }

  std::vector<specfun::PrabhakarParams> grid;
  for (double mu : {0.25, 0.5, 0.75})
    for (double nu : {2.0, mu + 2.0, mu + 3.0}) grid.push_back({mu, nu, 2.0});
  grid.push_back({0.5, 2.0, 0.5});
  grid.push_back({0.75, 1.5, 0.25});
  double routeDev = 0.0;
  for (const auto& p : grid) {
    const auto viaGf = specfun::prabhakarKernel(p, 500);
    const auto direct = specfun::prabhakarKernelDirect(p, 500);
    for (std::size_t t = 0; t <= 500; ++t)
      routeDev = std::max(routeDev, normDev(direct[t], viaGf[t]));
  }

  const auto report = specfun::prabhakarScalingLimit(0.5, 2.0, 0.5, 1.0, 1.0 / 64.0, 4);
  const bool shrinking =
      report.monotone && report.steps.back().deviation < report.steps.front().deviation;

  const bool ok = anchors && routeDev < 1e-11 && shrinking;
  return timed("prabhakar-kernel", 60.0, ok,
               fmt("anchors %s, route deviation %.2e (budget 1e-11), scaling refinement "
                   "monotone %s",
                   anchors ? "exact" : "BROKEN", routeDev, shrinking ? "yes" : "NO"),
               t0);
}

Check ensembleConsistency() {
  const double t0 = now();
  bool moments = true, bitwise = true;
  double worstZ = 0.0;
  for (const auto& m : {WaitingTimeModel::geometric(0.3), WaitingTimeModel::sibuya(0.5)}) {
    exact::WalkSpec spec{m, 1, 1000};
    montecarlo::SimConfig cfg;
    cfg.nPaths = 100000;
    cfg.checkpoints = {10, 100, 1000};
    const auto one = montecarlo::simulateSrw(spec, cfg, {20260819});
    cfg.workers = 8;
    const auto eight = montecarlo::simulateSrw(spec, cfg, {20260819});
    const auto trk = exact::momentTrack(m, 1, 1000);
    for (std::size_t k = 0; k < 3; ++k) {
      bitwise = bitwise && one.checkpoints[k].mean == eight.checkpoints[k].mean &&
                one.checkpoints[k].secondMoment == eight.checkpoints[k].secondMoment;
      const auto t = static_cast<std::size_t>(one.checkpoints[k].time);
      const double zm =
          std::fabs(one.checkpoints[k].mean - trk.mean[t]) / one.checkpoints[k].seMean;
      const double z2 = std::fabs(one.checkpoints[k].secondMoment - trk.msd[t]) /
                        one.checkpoints[k].seSecondMoment;
      worstZ = std::max({worstZ, zm, z2});
      moments = moments && zm <= 4.0 && z2 <= 4.0;
    }
  }
  return timed("ensemble-consistency", 180.0, moments && bitwise,
               fmt("worst |z| %.2f (budget 4), 1 vs 8 workers bitwise: %s", worstZ,
                   bitwise ? "yes" : "NO"),
               t0);
}

Check subordinatedWalk() {
  const double t0 = now();
  const auto geo = WaitingTimeModel::geometric(0.3);
  const double p = 0.3, xi = 1.5;
  auto meanFormula = [&](double t) {
    return (1.0 - 2.0 * p) / (2.0 * p) * -std::expm1(-2.0 * p * xi * t);
  };

  // exact clock conditioning against the memoryless closed form
  const auto clock1 = ctsrw::ClockModel::poisson(xi);
  const auto top = ctsrw::clockDistribution(clock1, 25.0);
  const auto track = exact::momentTrack(geo, 1, top.probs.size() - 1 + 8);
  double condDev = 0.0;
  for (double t : {0.5, 1.0, 2.0, 5.0, 10.0, 25.0}) {
    const auto tab = ctsrw::clockDistribution(clock1, t);
    const auto got = ctsrw::timeChangedMean(track.mean, tab);
    condDev = std::max(condDev, std::fabs(got.value - meanFormula(t)));
  }

  // sampled paths against the same curve
  exact::WalkSpec gspec{geo, 1, 0};
  montecarlo::CtsrwConfig mcCfg;
  mcCfg.nPaths = 100000;
  mcCfg.checkpoints = {0.5, 2.0, 8.0};
  const auto mc = montecarlo::simulateCtsrw(gspec, clock1, mcCfg, {55});
  double worstZ = 0.0;
  for (const auto& cp : mc.checkpoints)
    worstZ = std::max(worstZ, std::fabs(cp.mean - meanFormula(cp.time)) / cp.seMean);

  // anomalous exponents under the fractional clock
  const auto clockA = ctsrw::ClockModel::fractionalPoisson(0.8, 1.0);
  montecarlo::CtsrwConfig slopeCfg;
  slopeCfg.nPaths = 40000;
  slopeCfg.checkpoints = {100, 178, 316, 562, 1000, 1778, 3162, 5623, 10000};
  std::vector<double> ts(slopeCfg.checkpoints.begin(), slopeCfg.checkpoints.end());

  exact::WalkSpec sspec{WaitingTimeModel::sibuya(0.5), 1, 0};
  const auto sRun = montecarlo::simulateCtsrw(sspec, clockA, slopeCfg, {808});
  std::vector<double> ys;
  for (const auto& cp : sRun.checkpoints) ys.push_back(cp.secondMoment);
  const double sibSlope = montecarlo::exponentFitPairs(ts, ys).slope;

  const auto gRun = montecarlo::simulateCtsrw(gspec, clockA, slopeCfg, {809});
  ys.clear();
  for (const auto& cp : gRun.checkpoints) ys.push_back(cp.secondMoment);
  const double geoSlope = montecarlo::exponentFitPairs(ts, ys).slope;

  // frozen-direction variance constant
  double frozenDev = 0.0;
  for (double alpha : {0.8, 0.5}) {
    const double tEnd = alpha == 0.8 ? 1000.0 : 4000.0;
    montecarlo::CtsrwConfig fCfg;
    fCfg.nPaths = 100000;
    fCfg.checkpoints = {tEnd};
    fCfg.freezeDirection = true;
    const auto run = montecarlo::simulateCtsrw(
        gspec, ctsrw::ClockModel::fractionalPoisson(alpha, 1.0), fCfg, {606});
    const double cAlpha = 2.0 / std::tgamma(2.0 * alpha + 1.0) -
                          1.0 / (std::tgamma(alpha + 1.0) * std::tgamma(alpha + 1.0));
    frozenDev = std::max(
        frozenDev,
        std::fabs(run.checkpoints[0].variance / std::pow(tEnd, 2.0 * alpha) / cAlpha - 1.0));
  }

  const bool ok = condDev < 1e-8 && worstZ <= 4.0 && std::fabs(sibSlope - 1.6) <= 0.1 &&
                  std::fabs(geoSlope - 0.8) <= 0.1 && frozenDev <= 0.10;
  return timed("subordinated-walk", 300.0, ok,
               fmt("conditioning dev %.2e (1e-8), MC |z| %.2f (4), slopes %.3f/%.3f "
                   "(1.6/0.8 +- 0.1), frozen dev %.3f (0.10)",
                   condDev, worstZ, sibSlope, geoSlope, frozenDev),
               t0);
}

Check continuumLimit() {
  const double t0 = now();
  const double xi0 = 0.7, t = 1.0;

  // classical: first-order convergence of the rescaled mean
  std::vector<double> errs;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const auto n = static_cast<std::size_t>(t / h);
    const auto cf = exact::bernoulliClosedForms(xi0 * h, 1, n);
    const double want = ctsrw::telegraphExpectedPosition(1.0, xi0, t);
    errs.push_back(std::fabs(cf.mean[n] * h / want - 1.0));
  }
  bool firstOrder = true;
  std::string ratios;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double r = errs[i] / errs[i + 1];
    firstOrder = firstOrder && r >= 6.0 && r <= 15.0;
    ratios += fmt("%.1f ", r);
  }

  // fractional: heavy-tailed steps against the Mittag-Leffler curve
  const double mu = 0.7, h = 1e-4;
  const double lambda = std::pow(h, -mu) / xi0;
  const auto fb = WaitingTimeModel::fractionalBernoulli(mu, lambda);
  const auto n = static_cast<std::size_t>(t / h);
  const auto mean = exact::expectedPosition(fb, 1, n);
  const double want = ctsrw::fractionalTelegraphExpectedPosition(1.0, xi0, mu, t);
  const double fracErr = std::fabs(mean[n] * h / want - 1.0);

  const bool ok = firstOrder && fracErr <= 1e-3;
  return timed("continuum-limit", 60.0, ok,
               fmt("error ratios per decade %s(budget [6,15]), fractional error %.2e "
                   "(budget 1e-3)",
                   ratios.c_str(), fracErr),
               t0);
}

}  // namespace

std::vector<Check> runAll() {
  return {oracleEquivalence(), bernoulliClosedForms(), sibuyaExactMsd(),
          ballisticLaw(),      escapeLaw(),            broadDensityMsd(),
          agingRenewal(),      prabhakarKernel(),      ensembleConsistency(),
          subordinatedWalk(),  continuumLimit()};
}

}  // namespace srw::verify
