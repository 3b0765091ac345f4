#include "srw/ctsrw.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "srw/specfun.hpp"

namespace srw::ctsrw {

namespace {

// exp(-x) must stay representable for the Poisson recurrence start.
constexpr double kPoissonWindow = 700.0;

bool poissonLike(const ClockModel& clock) {
  return clock.kind == ClockModel::Kind::Poisson || clock.alpha == 1.0;
}

}  // namespace

ClockModel ClockModel::poisson(double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("ClockModel::poisson: xi must be positive");
  ClockModel c;
  c.kind = Kind::Poisson;
  c.alpha = 1.0;
  c.xi = xi;
  return c;
}

ClockModel ClockModel::fractionalPoisson(double alpha, double xi) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("ClockModel::fractionalPoisson: alpha must lie in (0, 1]");
  if (!(xi > 0.0))
    throw std::invalid_argument("ClockModel::fractionalPoisson: xi must be positive");
  ClockModel c;
  c.kind = Kind::FractionalPoisson;
  c.alpha = alpha;
  c.xi = xi;
  return c;
}

bool clockAdmissible(const ClockModel& clock, double t) {
  if (!(t >= 0.0)) return false;
  if (poissonLike(clock)) return clock.xi * t <= kPoissonWindow;
  return specfun::fractionalPoissonAdmissible(clock.alpha, clock.xi, t);
}

std::vector<double> clockStateProbs(const ClockModel& clock, double t, std::size_t mMax) {
  if (!(t >= 0.0)) throw std::invalid_argument("clockStateProbs: t must be nonnegative");
  if (poissonLike(clock)) {
    const double x = clock.xi * t;
    if (x > kPoissonWindow)
      throw std::domain_error("clockStateProbs: xi t too large for the Poisson recurrence");
    std::vector<double> out(mMax + 1, 0.0);
    double p = std::exp(-x);
    for (std::size_t m = 0; m <= mMax; ++m) {
      out[m] = p;
      p *= x / static_cast<double>(m + 1);
    }
    return out;
  }
  return specfun::fractionalPoissonStateProbs(clock.alpha, clock.xi, t, mMax);
}

ClockDistribution clockDistribution(const ClockModel& clock, double t) {
  constexpr double kTailTarget = 1e-10;
  constexpr std::size_t kCap = 10'000;

  // Initial support guess: the count mean plus generous spread. The
  // fractional count law is broad (width comparable to the mean), so its
  // guess is a multiple of the mean rather than mean + O(sqrt).
  std::size_t guess;
  if (poissonLike(clock)) {
    const double x = clock.xi * t;
    guess = static_cast<std::size_t>(x + 12.0 * std::sqrt(x + 1.0)) + 32;
  } else {
    const double mean = clock.xi * std::pow(t, clock.alpha) / std::tgamma(1.0 + clock.alpha);
    guess = static_cast<std::size_t>(4.0 * mean) + 64;
  }

  for (;;) {
    const std::size_t mMax = std::min(guess, kCap);
    const std::vector<double> probs = clockStateProbs(clock, t, mMax);
    double acc = 0.0, comp = 0.0;
    for (std::size_t m = 0; m <= mMax; ++m) {
      const double y = probs[m] - comp;
      const double next = acc + y;
      comp = (next - acc) - y;
      acc = next;
      if (1.0 - acc <= kTailTarget) {
        ClockDistribution out;
        out.probs.assign(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(m + 1));
        out.tailMass = std::max(0.0, 1.0 - acc);
        return out;
      }
    }
    if (mMax == kCap)
      throw std::domain_error(
          "clockDistribution: count mass not captured within 10^4 states; "
          "the clock argument is outside the conditioning window");
    guess *= 2;
  }
}

ConditionedValue timeChangedMean(const std::vector<double>& f, const ClockDistribution& clock) {
  if (f.size() < clock.probs.size())
    throw std::invalid_argument("timeChangedMean: f table shorter than the clock support");
  double value = 0.0, comp = 0.0, maxAbs = 0.0;
  for (std::size_t m = 0; m < clock.probs.size(); ++m) {
    const double y = clock.probs[m] * f[m] - comp;
    const double next = value + y;
    comp = (next - value) - y;
    value = next;
    maxAbs = std::max(maxAbs, std::fabs(f[m]));
  }
  return {value, clock.tailMass * maxAbs, clock.probs.size()};
}

ConditionedValue timeChangedMean(const std::vector<double>& f, const ClockModel& clock,
                                 double t) {
  return timeChangedMean(f, clockDistribution(clock, t));
}

exact::LatticeDistribution ctsrwPropagator(const exact::WalkSpec& spec, const ClockModel& clock,
                                           double t) {
  const ClockDistribution clk = clockDistribution(clock, t);
  const std::size_t mTop = clk.probs.size() - 1;
  if (mTop > 2000)
    throw std::invalid_argument(
        "ctsrwPropagator: clock support exceeds 2000 operational steps; use Monte Carlo");

  const auto slices =
      exact::propagatorSweep(spec.model, spec.sigma0, mTop);

  exact::LatticeDistribution out;
  out.xMin = -static_cast<long long>(mTop);
  out.mass.assign(2 * mTop + 1, 0.0);
  for (std::size_t m = 0; m <= mTop; ++m) {
    const double w = clk.probs[m];
    const auto& slice = slices[m];
    const std::size_t shift = mTop - m;  // slice support is [-m, m]
    for (std::size_t i = 0; i < slice.mass.size(); ++i) out.mass[shift + i] += w * slice.mass[i];
    out.maxImagResidue = std::max(out.maxImagResidue, slice.maxImagResidue);
  }
  double total = 0.0;
  for (const double v : out.mass) total += v;
  out.massDeficit = std::fabs(1.0 - total);
  return out;
}

double telegraphExpectedPosition(double v0, double xi0, double t) {
  if (!(xi0 > 0.0))
    throw std::invalid_argument("telegraphExpectedPosition: xi0 must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("telegraphExpectedPosition: t must be nonnegative");
  return v0 / (2.0 * xi0) * -std::expm1(-2.0 * xi0 * t);
}

double fractionalTelegraphExpectedPosition(double v0, double xi0, double mu, double t) {
  if (!(mu > 0.0 && mu <= 1.0))
    throw std::invalid_argument("fractionalTelegraphExpectedPosition: mu must lie in (0, 1]");
  if (!(xi0 > 0.0))
    throw std::invalid_argument("fractionalTelegraphExpectedPosition: xi0 must be positive");
  if (!(t >= 0.0))
    throw std::invalid_argument("fractionalTelegraphExpectedPosition: t must be nonnegative");
  if (mu == 1.0 || t == 0.0) return telegraphExpectedPosition(v0, xi0, t);
  const double z = -2.0 * xi0 * std::pow(t, mu);
  return v0 * t * specfun::mittagLeffler(mu, 2.0, z);
}

}  // namespace srw::ctsrw
