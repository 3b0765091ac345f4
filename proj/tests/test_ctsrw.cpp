#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "srw/ctsrw.hpp"
#include "srw/montecarlo.hpp"
#include "srw/renewal.hpp"
#include "srw/specfun.hpp"
#include "srw/srw_exact.hpp"

using srw::ctsrw::ClockDistribution;
using srw::ctsrw::ClockModel;
using srw::exact::WalkSpec;
using srw::renewal::WaitingTimeModel;

namespace {

// The fractional clock tables over the [150, 1500] decade dominate the cost
// of this suite (the top point alone is about a minute), so every test that
// needs them shares this one set.
struct DecadeTables {
  std::vector<double> grid{150.0, 330.0, 700.0, 1500.0};
  std::vector<ClockDistribution> tables;
  std::size_t maxSupport = 0;
};

const DecadeTables& decadeTables() {
  static const DecadeTables dt = [] {
    DecadeTables d;
    const auto clock = ClockModel::fractionalPoisson(0.8, 1.0);
    for (double t : d.grid) {
      d.tables.push_back(srw::ctsrw::clockDistribution(clock, t));
      d.maxSupport = std::max(d.maxSupport, d.tables.back().probs.size());
    }
    return d;
  }();
  return dt;
}

}  // namespace

TEST_CASE("clock factories validate their parameters") {
  CHECK_THROWS_AS(ClockModel::poisson(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockModel::poisson(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockModel::fractionalPoisson(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockModel::fractionalPoisson(1.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockModel::fractionalPoisson(0.5, 0.0), std::invalid_argument);
  CHECK(ClockModel::fractionalPoisson(1.0, 2.0).alpha == 1.0);
  CHECK(ClockModel::poisson(3.0).xi == 3.0);
}

TEST_CASE("Poisson clock probabilities match the direct mass function") {
  const auto clock = ClockModel::poisson(1.7);
  const double x = 1.7 * 3.0;
  const auto probs = srw::ctsrw::clockStateProbs(clock, 3.0, 20);
  REQUIRE(probs.size() == 21);
  for (std::size_t m = 0; m <= 20; ++m) {
    const double pm = std::exp(-x + m * std::log(x) - std::lgamma(m + 1.0));
    CHECK(std::fabs(probs[m] - pm) <= 1e-13 * std::max(1.0, pm));
  }

  // an index-one fractional clock is the same process
  const auto viaFp = srw::ctsrw::clockStateProbs(ClockModel::fractionalPoisson(1.0, 1.7), 3.0, 20);
  for (std::size_t m = 0; m <= 20; ++m) CHECK(viaFp[m] == probs[m]);

  // fractional route delegates to the state-probability evaluator
  const auto fp = ClockModel::fractionalPoisson(0.8, 1.3);
  const auto got = srw::ctsrw::clockStateProbs(fp, 4.0, 12);
  const auto want = srw::specfun::fractionalPoissonStateProbs(0.8, 1.3, 4.0, 12);
  for (std::size_t m = 0; m <= 12; ++m) CHECK(got[m] == want[m]);
}

TEST_CASE("clock evaluation windows are enforced") {
  CHECK(srw::ctsrw::clockAdmissible(ClockModel::poisson(1.0), 600.0));
  CHECK_FALSE(srw::ctsrw::clockAdmissible(ClockModel::poisson(1.0), 800.0));
  CHECK_THROWS_AS(srw::ctsrw::clockStateProbs(ClockModel::poisson(1.0), 800.0, 4),
                  std::domain_error);

  const auto fp = ClockModel::fractionalPoisson(0.8, 1.0);
  CHECK(srw::ctsrw::clockAdmissible(fp, 1500.0));
  CHECK_FALSE(srw::ctsrw::clockAdmissible(fp, 1600.0));
  CHECK_THROWS_AS(srw::ctsrw::clockStateProbs(fp, 1600.0, 4), std::domain_error);

  CHECK_THROWS_AS(srw::ctsrw::clockStateProbs(fp, -1.0, 4), std::invalid_argument);
}

TEST_CASE("clock distribution captures all but a vanishing tail") {
  for (const auto& clock :
       {ClockModel::poisson(2.0), ClockModel::fractionalPoisson(0.8, 1.0)}) {
    const double t = clock.kind == ClockModel::Kind::Poisson ? 30.0 : 50.0;
    const auto tab = srw::ctsrw::clockDistribution(clock, t);
    REQUIRE(!tab.probs.empty());
    CHECK(tab.tailMass >= 0.0);
    CHECK(tab.tailMass <= 1e-10);
    double sum = 0.0;
    for (double p : tab.probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::fabs(sum + tab.tailMass - 1.0) <= 1e-12);
  }

  // truncated Poisson mean stays on xi t
  const auto tab = srw::ctsrw::clockDistribution(ClockModel::poisson(2.0), 30.0);
  double mean = 0.0;
  for (std::size_t m = 0; m < tab.probs.size(); ++m)
    mean += static_cast<double>(m) * tab.probs[m];
  CHECK(std::fabs(mean - 60.0) <= 1e-6);
}

TEST_CASE("conditioning on the clock is exact for constants") {
  const auto tab = srw::ctsrw::clockDistribution(ClockModel::fractionalPoisson(0.8, 1.0), 20.0);
  const std::vector<double> ones(tab.probs.size(), 1.0);
  const auto got = srw::ctsrw::timeChangedMean(ones, tab);
  CHECK(std::fabs(got.value - 1.0) <= 1e-10);
  CHECK(got.tailBound <= 1e-10);
  CHECK(got.terms == tab.probs.size());

  const std::vector<double> tooShort(tab.probs.size() - 1, 1.0);
  CHECK_THROWS_AS(srw::ctsrw::timeChangedMean(tooShort, tab), std::invalid_argument);

  // the (model, t) convenience overload agrees with the prebuilt table
  const auto direct =
      srw::ctsrw::timeChangedMean(ones, ClockModel::fractionalPoisson(0.8, 1.0), 20.0);
  CHECK(direct.value == got.value);
}

TEST_CASE("the clock at time zero is a point mass at zero counts") {
  const auto tab = srw::ctsrw::clockDistribution(ClockModel::fractionalPoisson(0.8, 1.0), 0.0);
  REQUIRE(tab.probs.size() == 1);
  CHECK(tab.probs[0] == 1.0);
  CHECK(srw::ctsrw::timeChangedMean({42.0}, tab).value == 42.0);

  WalkSpec spec{WaitingTimeModel::geometric(0.3), 1, 0};
  const auto mix = srw::ctsrw::ctsrwPropagator(spec, ClockModel::poisson(1.0), 0.0);
  REQUIRE(mix.mass.size() == 1);
  CHECK(mix.xMin == 0);
  CHECK(std::fabs(mix.mass[0] - 1.0) <= 1e-15);
}

TEST_CASE("exponential-clock geometric mean hits the closed form") {
  // E Y(t) = sigma0 (1-2p)/(2p) (1 - exp(-2 p xi t)) for the memoryless clock
  const auto clock = ClockModel::poisson(1.5);
  const double p = 0.3;
  const auto geo = WaitingTimeModel::geometric(p);
  const auto top = srw::ctsrw::clockDistribution(clock, 25.0);
  const auto track = srw::exact::momentTrack(geo, 1, top.probs.size() - 1 + 8);
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0, 5.0, 10.0, 25.0}) {
    const auto tab = srw::ctsrw::clockDistribution(clock, t);
    const auto got = srw::ctsrw::timeChangedMean(track.mean, tab);
    const double want = (1.0 - 2.0 * p) / (2.0 * p) * -std::expm1(-2.0 * p * 1.5 * t);
    worst = std::max(worst, std::fabs(got.value - want));
  }
  CHECK(worst <= 1e-8);  // observed 5.5e-11
}

TEST_CASE("subordinated propagator moments equal the conditioned moments") {
  const auto clock = ClockModel::fractionalPoisson(0.8, 1.0);
  WalkSpec spec{WaitingTimeModel::sibuya(0.5), 1, 0};
  const auto mix = srw::ctsrw::ctsrwPropagator(spec, clock, 10.0);
  CHECK(mix.massDeficit <= 1e-8);
  CHECK(mix.maxImagResidue <= 1e-9);

  const auto tab = srw::ctsrw::clockDistribution(clock, 10.0);
  const auto track = srw::exact::momentTrack(spec.model, 1, tab.probs.size() - 1);
  const double mean = srw::ctsrw::timeChangedMean(track.mean, tab).value;
  const double msd = srw::ctsrw::timeChangedMean(track.msd, tab).value;
  CHECK(std::fabs(mix.mean() - mean) <= 1e-9);
  CHECK(std::fabs(mix.secondMoment() - msd) <= 1e-9);
}

TEST_CASE("at matched mean counts the subordinated law shadows the discrete one") {
  // xi t = 100 exponential clock over the diffusive geometric walk vs the
  // discrete walk at exactly 100 steps
  const auto geo = WaitingTimeModel::geometric(0.3);
  WalkSpec spec{geo, 1, 0};
  const auto mix = srw::ctsrw::ctsrwPropagator(spec, ClockModel::poisson(1.0), 100.0);
  const auto fix = srw::exact::propagator(geo, 1, 100);
  CHECK(mix.massDeficit <= 1e-8);

  // moments of the mixture have already saturated onto the fixed-step values
  CHECK(std::fabs(mix.mean() - fix.mean()) <= 1e-9);          // observed 4.7e-11
  CHECK(std::fabs(mix.secondMoment() - fix.secondMoment()) <= 2e-7);  // observed 2.8e-8

  // the laws differ only by clock spread: small uniform CDF distance
  double dmax = 0.0, cm = 0.0, cf = 0.0;
  const long long lo = mix.xMin;
  const long long hi = mix.xMin + static_cast<long long>(mix.mass.size()) - 1;
  for (long long x = lo; x <= hi; ++x) {
    cm += mix.mass[static_cast<std::size_t>(x - mix.xMin)];
    if (x >= fix.xMin && x < fix.xMin + static_cast<long long>(fix.mass.size()))
      cf += fix.mass[static_cast<std::size_t>(x - fix.xMin)];
    else if (x >= fix.xMin + static_cast<long long>(fix.mass.size()))
      cf = 1.0;
    dmax = std::max(dmax, std::fabs(cm - cf));
  }
  CHECK(dmax <= 0.05);  // observed 0.013
}

TEST_CASE("subordinated propagator rejects clocks outside their window") {
  WalkSpec spec{WaitingTimeModel::geometric(0.3), 1, 0};
  CHECK_THROWS_AS(srw::ctsrw::ctsrwPropagator(spec, ClockModel::poisson(10.0), 500.0),
                  std::domain_error);
}

TEST_CASE("fractional clock conditioning: ballistic walk gains exponent 2 alpha") {
  const auto& d = decadeTables();
  const auto track = srw::exact::momentTrack(WaitingTimeModel::sibuya(0.5), 1, d.maxSupport - 1);
  std::vector<double> ys;
  for (const auto& tab : d.tables)
    ys.push_back(srw::ctsrw::timeChangedMean(track.msd, tab).value);
  const auto fit = srw::montecarlo::exponentFitPairs(d.grid, ys);
  CHECK(std::fabs(fit.slope - 1.6) <= 0.08);  // observed 1.607
}

TEST_CASE("fractional clock conditioning: diffusive walk keeps exponent alpha") {
  const auto& d = decadeTables();
  const auto track = srw::exact::momentTrack(WaitingTimeModel::geometric(0.3), 1, d.maxSupport - 1);
  std::vector<double> ys;
  for (const auto& tab : d.tables)
    ys.push_back(srw::ctsrw::timeChangedMean(track.msd, tab).value);
  const auto fit = srw::montecarlo::exponentFitPairs(d.grid, ys);
  CHECK(std::fabs(fit.slope - 0.8) <= 0.08);  // observed 0.806
}

TEST_CASE("fractional clock conditioning: Prabhakar kernel follows its power law") {
  // <p_{mu,nu}(lambda, M(t))> ~ -(1/lambda) t^{a(nu-mu-1)} / Gamma(a(nu-mu-1)+1)
  // for mu=0.5, nu=3.5, lambda=2, a=0.8: exponent 1.6, amplitude 1/(2 Gamma(2.6))
  const auto& d = decadeTables();
  const srw::specfun::PrabhakarParams pk{0.5, 3.5, 2.0};
  const auto kernel = srw::specfun::prabhakarKernel(pk, d.maxSupport - 1);
  std::vector<double> ys;
  for (const auto& tab : d.tables)
    ys.push_back(-srw::ctsrw::timeChangedMean(kernel, tab).value);
  const auto fit = srw::montecarlo::exponentFitPairs(d.grid, ys);
  CHECK(std::fabs(fit.slope - 1.6) / 1.6 <= 0.10);  // observed 1.558

  // by the top of the decade the subleading bend has decayed into the budget
  const double asym = 0.5 * std::pow(1500.0, 1.6) / std::tgamma(2.6);
  CHECK(std::fabs(ys.back() / asym - 1.0) <= 0.10);  // observed 1.045
}

TEST_CASE("ensemble paths agree with clock conditioning across the catalog") {
  const auto clock = ClockModel::fractionalPoisson(0.8, 1.0);
  const auto tab5 = srw::ctsrw::clockDistribution(clock, 5.0);
  const auto tab55 = srw::ctsrw::clockDistribution(clock, 55.0);
  const WaitingTimeModel models[] = {
      WaitingTimeModel::geometric(0.3), WaitingTimeModel::sibuya(0.5),
      WaitingTimeModel::fractionalBernoulli(0.7, 1.5), WaitingTimeModel::broadPowerTail(1.5),
      WaitingTimeModel::custom({0.0, 0.2, 0.5, 0.3})};
  for (const auto& m : models) {
    WalkSpec spec{m, 1, 0};
    srw::montecarlo::CtsrwConfig cfg;
    cfg.nPaths = 30000;
    cfg.checkpoints = {5.0, 55.0};
    const auto st = srw::montecarlo::simulateCtsrw(spec, clock, cfg, {2718});
    const auto trk = srw::exact::momentTrack(m, 1, tab55.probs.size() - 1 + 8);
    const ClockDistribution* tabs[] = {&tab5, &tab55};
    for (int k = 0; k < 2; ++k) {
      const double mean = srw::ctsrw::timeChangedMean(trk.mean, *tabs[k]).value;
      const double msd = srw::ctsrw::timeChangedMean(trk.msd, *tabs[k]).value;
      CHECK(std::fabs(st.checkpoints[k].mean - mean) <= 4.0 * st.checkpoints[k].seMean);
      CHECK(std::fabs(st.checkpoints[k].secondMoment - msd) <=
            4.0 * st.checkpoints[k].seSecondMoment);  // observed worst 2.0 SE
    }
  }
}

TEST_CASE("telegraph mean: saturation and the diffusive-step limit") {
  using srw::ctsrw::telegraphExpectedPosition;
  CHECK(telegraphExpectedPosition(1.0, 0.7, 0.0) == 0.0);
  CHECK(std::fabs(telegraphExpectedPosition(1.0, 0.7, 50.0) - 1.0 / 1.4) <= 1e-12);
  CHECK(telegraphExpectedPosition(1.0, 0.7, 0.5) < telegraphExpectedPosition(1.0, 0.7, 1.0));
  CHECK_THROWS_AS(telegraphExpectedPosition(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(telegraphExpectedPosition(1.0, 0.7, -1.0), std::invalid_argument);

  // discrete walk with flip probability xi0 h, viewed every h: its rescaled
  // mean converges to the telegraph curve as h -> 0
  const double h = 1e-4, xi0 = 0.7, t = 1.0;
  const auto n = static_cast<std::size_t>(t / h);
  const auto cf = srw::exact::bernoulliClosedForms(xi0 * h, 1, n);
  const double want = telegraphExpectedPosition(1.0, xi0, t);
  CHECK(std::fabs(cf.mean[n] * h / want - 1.0) <= 1e-3);  // observed 1.1e-4
}

TEST_CASE("fractional telegraph mean: reductions and asymptotics") {
  using srw::ctsrw::fractionalTelegraphExpectedPosition;
  using srw::ctsrw::telegraphExpectedPosition;

  for (double t : {0.1, 1.0, 5.0, 40.0})
    CHECK(std::fabs(fractionalTelegraphExpectedPosition(1.3, 0.6, 1.0, t) -
                    telegraphExpectedPosition(1.3, 0.6, t)) <= 1e-12);

  CHECK(fractionalTelegraphExpectedPosition(1.0, 0.7, 0.7, 0.0) == 0.0);

  // short times are ballistic at speed v0
  const double eps = 1e-6;
  CHECK(std::fabs(fractionalTelegraphExpectedPosition(2.0, 0.7, 0.7, eps) / (2.0 * eps) - 1.0) <=
        1e-3);

  // long times follow v0 t^(1-mu) / (2 xi0 Gamma(2-mu)); at 2 xi0 t^mu = 25
  // the next correction sits below five percent
  for (double mu : {0.5, 0.7}) {
    const double t = std::pow(25.0 / 1.4, 1.0 / mu);
    const double got = fractionalTelegraphExpectedPosition(1.0, 0.7, mu, t);
    const double want = std::pow(t, 1.0 - mu) / (1.4 * std::tgamma(2.0 - mu));
    CHECK(std::fabs(got / want - 1.0) <= 0.05);
  }

  CHECK_THROWS_AS(fractionalTelegraphExpectedPosition(1.0, 0.7, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fractionalTelegraphExpectedPosition(1.0, 0.7, 1.2, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fractionalTelegraphExpectedPosition(1.0, -0.7, 0.5, 1.0),
                  std::invalid_argument);
}
