#pragma once

#include <cstddef>
#include <vector>

#include "srw/renewal.hpp"
#include "srw/srw_exact.hpp"

namespace srw::ctsrw {

// Continuous-time renewal clock driving the subordinated walk Y(t) = X_{M(t)}.
// Poisson has exponential gaps of rate xi; FractionalPoisson has
// Mittag-Leffler gaps with index alpha and scale xi (alpha = 1 is Poisson).
struct ClockModel {
  enum class Kind { Poisson, FractionalPoisson };

  Kind kind = Kind::Poisson;
  double alpha = 1.0;
  double xi = 1.0;

  static ClockModel poisson(double xi);
  static ClockModel fractionalPoisson(double alpha, double xi);
};

// P[M(t) = m] for m = 0..mMax. Fractional clocks are restricted to the
// series window of fractionalPoissonStateProbs; Poisson clocks to
// xi t <= 700 (below that exp(-xi t) is representable).
std::vector<double> clockStateProbs(const ClockModel& clock, double t, std::size_t mMax);

bool clockAdmissible(const ClockModel& clock, double t);

// Clock count distribution truncated where the captured mass reaches
// 1 - 1e-10, capped at 10^4 states. Building one of these is the expensive
// part of every conditioning sum, so callers evaluating several observables
// at the same (clock, t) should build it once and reuse it.
struct ClockDistribution {
  std::vector<double> probs;  // probs[m] = P[M(t) = m]
  double tailMass = 0.0;      // 1 - sum(probs)
};

ClockDistribution clockDistribution(const ClockModel& clock, double t);

struct ConditionedValue {
  double value = 0.0;
  double tailBound = 0.0;   // |value error| <= tailMass * max|f| over the table
  std::size_t terms = 0;    // clock states actually summed
};

// E[f(M(t))] by conditioning on the clock count. f must be tabulated at
// least as far as the truncated clock support reaches.
ConditionedValue timeChangedMean(const std::vector<double>& f, const ClockDistribution& clock);
ConditionedValue timeChangedMean(const std::vector<double>& f, const ClockModel& clock, double t);

// Law of Y(t) = X_{M(t)} on the lattice: the clock mixture of the exact
// discrete propagators. Refuses clock supports past 2000 states; those are
// Monte Carlo territory.
exact::LatticeDistribution ctsrwPropagator(const exact::WalkSpec& spec, const ClockModel& clock,
                                           double t);

// (v0 / (2 xi0)) (1 - exp(-2 xi0 t)): stationary-start telegraph mean.
double telegraphExpectedPosition(double v0, double xi0, double t);

// v0 t E_{mu,2}(-2 xi0 t^mu): its fractional generalization; mu = 1 reduces
// to the exponential form above.
double fractionalTelegraphExpectedPosition(double v0, double xi0, double mu, double t);

}  // namespace srw::ctsrw
