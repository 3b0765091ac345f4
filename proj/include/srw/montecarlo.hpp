#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "srw/ctsrw.hpp"
#include "srw/rng.hpp"
#include "srw/srw_exact.hpp"

namespace srw::montecarlo {

// One rule: path i always draws from rng::pathStream(masterSeed, i). The
// ensemble therefore does not depend on how paths are distributed over
// workers, and merges happen in fixed chunk order, so fixed (seed, config)
// gives bitwise identical statistics for any worker count.
struct RngPolicy {
  std::uint64_t masterSeed = 1;
};

struct SimConfig {
  std::uint64_t nPaths = 100'000;
  unsigned workers = 1;
  std::vector<std::size_t> checkpoints;   // strictly increasing, <= horizon
  std::vector<std::size_t> histogramAt;   // subset of checkpoints
};

struct CheckpointStats {
  double time = 0.0;
  std::uint64_t nPaths = 0;
  double mean = 0.0;
  double secondMoment = 0.0;
  double variance = 0.0;
  double seMean = 0.0;
  double seSecondMoment = 0.0;
  bool hasHistogram = false;
  long long histXMin = 0;
  std::vector<std::uint64_t> histogram;  // counts at x = histXMin + index
};

struct EnsembleStats {
  std::uint64_t nPaths = 0;
  std::vector<CheckpointStats> checkpoints;
  std::uint64_t reversalFreePaths = 0;  // paths whose direction never flipped
  std::uint64_t cappedDraws = 0;        // waiting-time draws cut by the sampling table
};

EnsembleStats simulateSrw(const exact::WalkSpec& spec, const SimConfig& cfg,
                          const RngPolicy& rng);

struct CtsrwConfig {
  std::uint64_t nPaths = 100'000;
  unsigned workers = 1;
  std::vector<double> checkpoints;  // nondecreasing real times, first >= 0
  bool freezeDirection = false;     // no reversals: Y(t) = sigma0 * M(t)
};

EnsembleStats simulateCtsrw(const exact::WalkSpec& spec, const ctsrw::ClockModel& clock,
                            const CtsrwConfig& cfg, const RngPolicy& rng);

// One clock interarrival: exponential for alpha = 1 (one uniform), otherwise
// the Mittag-Leffler ratio representation (two uniforms).
double mlInterarrival(rng::Stream& stream, double alpha, double xi);

struct OracleResult {
  exact::LatticeDistribution distribution;
  double mean = 0.0;
  double secondMoment = 0.0;
};

// Exact law of X_t by summing all 2^t reversal patterns, weighted by the
// waiting-time gaps and the survival residual. Only viable for t <= 14.
OracleResult pathEnumerationOracle(const exact::WalkSpec& spec, std::size_t t);

struct PowerLawFit {
  double slope = 0.0;
  double logIntercept = 0.0;  // natural log of the fitted prefactor
  double r2 = 0.0;
};

// Least squares of log(values[t]) against log(t) over t in [tLo, tHi].
PowerLawFit exponentFit(const std::vector<double>& values, std::size_t tLo, std::size_t tHi);

// Same fit for explicit (t, value) pairs with positive abscissae.
PowerLawFit exponentFitPairs(const std::vector<double>& times, const std::vector<double>& values);

// Window mean of values[t] / t^exponent: the amplitude of a power law whose
// exponent is already known. Unlike the free fit above it carries no
// slope-bias leverage, so it is the right amplitude estimator on windows
// where the asymptote still bends.
double pinnedAmplitude(const std::vector<double>& values, double exponent, std::size_t tLo,
                       std::size_t tHi);

// Pearson chi-square p-value of observed counts against model probabilities
// over the same bins. Bins are pooled left to right until each class carries
// expected count >= minExpected; dof = classes - 1.
double chiSquarePValue(const std::vector<std::uint64_t>& observed,
                       const std::vector<double>& expected, double minExpected = 5.0);

// Upper regularized incomplete gamma Q(a, x).
double regularizedGammaQ(double a, double x);

}  // namespace srw::montecarlo
