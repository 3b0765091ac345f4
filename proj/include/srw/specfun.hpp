#pragma once

// Discrete Prabhakar kernel, Mittag-Leffler function, and fractional Poisson
// counting probabilities.  Series with heavy alternating cancellation are
// summed internally at dynamically chosen extended precision and returned as
// doubles; validity windows are enforced with hard errors.

#include <cstddef>
#include <vector>

namespace srw::specfun {

// Kernel parameters: mu in (0,1], nu > 0, lambda > 0 and != 1.  The upper
// kernel index is fixed at one.  (The nu == mu case obeys an identity that
// relates the kernel back to the heavy-tailed waiting-time table; it is not
// exported separately.)
struct PrabhakarParams {
  double mu;
  double nu;
  double lambda;
};

void validate(const PrabhakarParams& p);

// Kernel values for t = 0..tMax via generating-function coefficient
// extraction: (1-u)^(mu-nu) / ((1-u)^mu - lambda) expanded to order tMax.
std::vector<double> prabhakarKernel(const PrabhakarParams& p, std::size_t tMax);

// Same values by direct summation of the lambda-branch series (term cutoff
// at relative 1e-15).  Independent of the series pipeline; used as an oracle.
std::vector<double> prabhakarKernelDirect(const PrabhakarParams& p, std::size_t tMax);

struct ScalingLimitStep {
  double h;
  double value;      // h^(nu-1) p(lambda0 h^mu, t/h)
  double deviation;  // |value - target|
};

struct ScalingLimitReport {
  double target;  // t^(nu-1) E_{mu,nu}(lambda0 t^mu)
  std::vector<ScalingLimitStep> steps;
  bool monotone;  // deviations strictly decreasing along the h-halvings
};

// Continuum-limit check: h runs from hStart halving `halvings` times; t/h
// must land on integers.  lambda0 h^mu must stay below one.
ScalingLimitReport prabhakarScalingLimit(double mu, double nu, double lambda0, double t,
                                         double hStart, int halvings);

// Two-parameter Mittag-Leffler E_{alpha,beta}(z) for alpha in (0,1], beta > 0.
// Power-series branch for |z| <= 50; for z < -50 the leading large-argument
// form -1/(z Gamma(beta-alpha)).  z > 50 is out of range.
double mittagLeffler(double alpha, double beta, double z);
inline double mittagLeffler(double alpha, double z) { return mittagLeffler(alpha, 1.0, z); }

// Fractional Poisson state probabilities P_n(t), n = 0..nMax, for renewal
// clocks with Mittag-Leffler waiting times of index alpha and rate xi.
// Alternating-series validity window: xi t^alpha <= 30, extended to larger
// arguments while the summation cost stays bounded (xi^(1/alpha) t <= 1500).
std::vector<double> fractionalPoissonStateProbs(double alpha, double xi, double t,
                                                std::size_t nMax);

bool fractionalPoissonAdmissible(double alpha, double xi, double t);

// 1/Gamma(x), zero at the poles.
double reciprocalGamma(double x);

}  // namespace srw::specfun
