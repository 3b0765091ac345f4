#pragma once

#include <cstddef>
#include <vector>

#include "srw/renewal.hpp"
#include "srw/series.hpp"

namespace srw::exact {

// A walk configuration: waiting-time law, initial step direction, horizon.
struct WalkSpec {
  renewal::WaitingTimeModel model;
  int sigma0 = 1;  // +1 or -1
  std::size_t horizon = 0;
};

struct MomentTrack {
  std::vector<double> mean;
  std::vector<double> msd;
  std::vector<double> variance;
};

// <X_t> for t = 0..tMax from the first-moment generating function.
std::vector<double> expectedPosition(const renewal::WaitingTimeModel& model, int sigma0,
                                     std::size_t tMax);

// <X_t^2> = 2 K(t) - t with K from its generating function; K(0) = 0 exactly.
std::vector<double> msdViaK(const renewal::WaitingTimeModel& model, std::size_t tMax);

// mean + msd + variance assembled from the generating-function routes.
MomentTrack momentTrack(const renewal::WaitingTimeModel& model, int sigma0, std::size_t tMax);

// Closed forms for the geometric waiting-time walk (valid for all p in (0,1]).
MomentTrack bernoulliClosedForms(double p, int sigma0, std::size_t tMax);

// Closed forms for the Sibuya walk, expressed through discrete Prabhakar
// kernels at lambda = 2.
MomentTrack sibuyaClosedForms(double mu, int sigma0, std::size_t tMax);

// Coefficients in u of the two-state propagator g(u; zeta1, zeta2), where
// zeta1 marks steps taken in the +sigma0 direction and zeta2 steps in the
// -sigma0 direction. |zeta| may exceed 1 by at most 1e-3 (finite-difference
// probes); larger moduli destabilize the truncated series and are rejected.
series::ComplexSeries segmentedGf(const renewal::WaitingTimeModel& model, series::Complex zeta1,
                                  series::Complex zeta2, std::size_t order);

struct LatticeDistribution {
  long long xMin = 0;
  std::vector<double> mass;  // mass[i] sits at x = xMin + i
  double maxImagResidue = 0.0;
  double massDeficit = 0.0;

  double mean() const;
  double secondMoment() const;
};

// P(X_t = x) on x in {-t..t} by Fourier inversion of the segmented
// generating function on a (2t+1)-point grid; exact up to roundoff.
LatticeDistribution propagator(const renewal::WaitingTimeModel& model, int sigma0, std::size_t t);

// All propagators for t = 0..tMax from a single (2 tMax + 1)-point grid.
std::vector<LatticeDistribution> propagatorSweep(const renewal::WaitingTimeModel& model,
                                                 int sigma0, std::size_t tMax);

enum class State { Plus, Minus };

// Distribution of the number of steps spent moving in the +sigma0 (Plus) or
// -sigma0 (Minus) direction up to time t; support {0..t}.
LatticeDistribution occupationTimePropagator(const renewal::WaitingTimeModel& model, std::size_t t,
                                             State state);

// Max coefficient deviation between the central-difference derivative
// (d/dzeta1 - d/dzeta2) [zeta1 g] at zeta = 1 and the first-moment
// generating function it must reproduce. Small values certify that the
// segmented propagator and the moment route agree.
double consistencyIdentity(const renewal::WaitingTimeModel& model, std::size_t order);

}  // namespace srw::exact
