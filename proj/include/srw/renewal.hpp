#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "srw/rng.hpp"
#include "srw/series.hpp"

namespace srw::renewal {

enum class Kind { Geometric, Sibuya, FractionalBernoulli, BroadPowerTail, Custom };

// Waiting-time distribution on t = 1, 2, ...; psi_0 = 0 always.
class WaitingTimeModel {
 public:
  static WaitingTimeModel geometric(double p);
  static WaitingTimeModel sibuya(double mu);
  static WaitingTimeModel fractionalBernoulli(double mu, double lambda);
  static WaitingTimeModel broadPowerTail(double lambda, std::size_t support = 1'000'000);
  static WaitingTimeModel custom(std::vector<double> pdf);  // pdf[t] for t >= 1, pdf[0] must be 0
  static WaitingTimeModel customFromFile(const std::string& path);  // TSV lines "t<TAB>psi_t"

  Kind kind() const { return kind_; }
  std::string describe() const;

  double paramMu() const { return mu_; }
  double paramLambda() const { return lambda_; }
  double paramP() const { return p_; }
  std::size_t support() const { return support_; }  // 0 means unbounded

  std::vector<double> pdfTable(std::size_t tMax) const;       // [0..tMax], [0] = 0
  std::vector<double> survivalTable(std::size_t tMax) const;  // S_t = P(tau > t), S_0 = 1
  series::RealSeries gfSeries(std::size_t order) const;       // coefficients of psiBar(u)

  // 1 - psiBar(1 - s): closed form where available, survival sum otherwise;
  // stable as s -> 0
  double oneMinusGfAt(double s) const;

  bool hasFiniteMean() const;
  double meanEstimate() const;

  // Exact draw censored at `bound`: returns tau if tau <= bound, bound + 1
  // otherwise. For tabulated kinds the inversion table covers mass up to the
  // stored support; draws past it count as censored and are tallied in
  // truncatedDraws().
  std::size_t sampleWaitingTime(rng::Stream& stream, std::size_t bound) const;

  // Build the inversion table covering waiting times up to `bound` so
  // concurrent sampling never mutates shared state.
  void prepareSampling(std::size_t bound) const;

  double truncatedSamplingMass() const;  // mass beyond the inversion table
  std::uint64_t truncatedDraws() const;

 private:
  WaitingTimeModel() = default;

  Kind kind_ = Kind::Geometric;
  double p_ = 0.0;       // Geometric
  double mu_ = 0.0;      // Sibuya, FractionalBernoulli
  double lambda_ = 0.0;  // FractionalBernoulli, BroadPowerTail
  std::size_t support_ = 0;
  double norm_ = 0.0;  // BroadPowerTail prefactor

  std::shared_ptr<std::vector<double>> customPdf_;  // Custom, index = t

  struct SamplingTable;
  mutable std::shared_ptr<SamplingTable> sampling_;  // built by prepareSampling()
  mutable std::shared_ptr<std::vector<double>> fracBernoulliPdf_;

  const std::vector<double>& fracBernoulliTable(std::size_t tMax) const;
};

// State probabilities Phi^(n)(t) = P(N(t) = n) for t = 0..tMax, from the
// generating function (1 - psiBar) psiBar^n / (1 - u).
std::vector<double> stateProbabilities(const WaitingTimeModel& model, std::size_t n,
                                       std::size_t tMax);

// E[(-1)^N(t)] for t = 0..tMax, from (1 - psiBar) / ((1 - u)(1 + psiBar)).
std::vector<double> statePolynomialAtMinusOne(const WaitingTimeModel& model, std::size_t tMax);

// Small-s expansion constants of 1 - psiBar(1-s) ~ a s^muLead - b s^lamSub.
struct TailConstants {
  double a = 0.0;
  double b = 0.0;
};
TailConstants fitTailConstants(const WaitingTimeModel& model, double muLead, double lamSub);

}  // namespace srw::renewal
