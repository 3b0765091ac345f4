#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "srw/renewal.hpp"
#include "srw/series.hpp"

namespace srw::dtarp {

// Forward recurrence density f_E(tau, t): probability that the first event
// after an aging span of tau steps falls exactly t steps later. Row tau = 0
// reproduces the waiting-time density; the t = 0 column is identically zero
// because the aged count starts at zero.
series::BivariateSeries forwardRecurrenceDensity(const renewal::WaitingTimeModel& model,
                                                 std::size_t tauMax, std::size_t tMax);

// Mass beyond the table horizon, one entry per tau: 1 - sum_t f_E(tau, t).
std::vector<double> rowTailDeficit(const series::BivariateSeries& fe);

// Dense table of aged state probabilities P[N_tau(t) = m].
class AgedStateTensor {
 public:
  AgedStateTensor(std::size_t tauMax, std::size_t mMax, std::size_t tMax)
      : tau_(tauMax),
        m_(mMax),
        t_(tMax),
        c_((tauMax + 1) * (mMax + 1) * (tMax + 1), 0.0) {}

  std::size_t tauMax() const { return tau_; }
  std::size_t mMax() const { return m_; }
  std::size_t tMax() const { return t_; }

  double at(std::size_t tau, std::size_t m, std::size_t t) const {
    return c_[(tau * (m_ + 1) + m) * (t_ + 1) + t];
  }
  double& cell(std::size_t tau, std::size_t m, std::size_t t) {
    return c_[(tau * (m_ + 1) + m) * (t_ + 1) + t];
  }

  // sum over m at fixed (tau, t); equals 1 when mMax covers every reachable
  // state (m <= t suffices)
  double rowSum(std::size_t tau, std::size_t t) const;

 private:
  std::size_t tau_, m_, t_;
  std::vector<double> c_;
};

AgedStateTensor agedStateProbabilities(const renewal::WaitingTimeModel& model,
                                       std::size_t tauMax, std::size_t mMax,
                                       std::size_t tMax);

// State polynomial of the aged count, g_v(tau, t) = E[v^{N_tau(t)}], summed
// state by state; exact because the count cannot exceed t.
series::BivariateSeries agedStatePolynomial(const renewal::WaitingTimeModel& model, double v,
                                            std::size_t tauMax, std::size_t tMax);

// Same quantity assembled from its closed bivariate transform
// 1/((1-w)(1-u)) - (1-v) fbar_E(w,u) / ((1-u)(1 - v psibar(u))).
series::BivariateSeries agedStatePolynomialGf(const renewal::WaitingTimeModel& model, double v,
                                              std::size_t tauMax, std::size_t tMax);

// Conditional table P[N_tau(t) = m | N(tau) = n]; summing over n recovers
// the aged state probabilities, summing over m the plain state
// probabilities at tau.
series::BivariateSeries conditionalAgedState(const renewal::WaitingTimeModel& model,
                                             std::size_t m, std::size_t n, std::size_t tauMax,
                                             std::size_t tMax);

// One-stop bundle used by the command-line tool.
struct AgedDistributionTable {
  std::size_t tauMax, mMax, tMax;
  series::BivariateSeries fE;
  std::vector<double> tailDeficit;
  AgedStateTensor states;

  AgedDistributionTable(std::size_t tauMaxIn, std::size_t mMaxIn, std::size_t tMaxIn,
                        series::BivariateSeries fe, std::vector<double> deficit,
                        AgedStateTensor st)
      : tauMax(tauMaxIn),
        mMax(mMaxIn),
        tMax(tMaxIn),
        fE(std::move(fe)),
        tailDeficit(std::move(deficit)),
        states(std::move(st)) {}

  // g_v rows summed from the stored tensor; memoized per v. Exact only when
  // mMax >= tMax, otherwise states above mMax are dropped.
  const series::BivariateSeries& statePolynomial(double v) const;

 private:
  mutable std::map<double, series::BivariateSeries> gvCache_;
};

AgedDistributionTable buildAgedTable(const renewal::WaitingTimeModel& model, std::size_t tauMax,
                                     std::size_t mMax, std::size_t tMax);

}  // namespace srw::dtarp
