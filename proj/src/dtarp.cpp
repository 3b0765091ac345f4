#include "srw/dtarp.hpp"

#include <stdexcept>

namespace srw::dtarp {

namespace {

using series::BivariateSeries;
using series::RealSeries;

RealSeries oneMinusGf(const RealSeries& psi) {
  RealSeries out(psi.order());
  out.raw()[0] = 1.0 - psi[0];
  for (std::size_t k = 1; k <= psi.order(); ++k) out.raw()[k] = -psi[k];
  return out;
}

// [1, -1, 0, ...]: the series 1 - u
RealSeries oneMinusU(std::size_t order) {
  RealSeries out(order);
  out.raw()[0] = 1.0;
  if (order >= 1) out.raw()[1] = -1.0;
  return out;
}

RealSeries powSeries(const RealSeries& s, std::size_t k) {
  RealSeries out(s.order());
  out.raw()[0] = 1.0;
  for (std::size_t i = 0; i < k; ++i) out = series::mul(out, s);
  return out;
}

}  // namespace

series::BivariateSeries forwardRecurrenceDensity(const renewal::WaitingTimeModel& model,
                                                 std::size_t tauMax, std::size_t tMax) {
  // transform u [psibar(u) - psibar(w)] / [(u - w)(1 - psibar(w))]; the
  // divided-difference table keeps the u = w point removable by
  // construction
  const RealSeries psi = model.gfSeries(tauMax + tMax + 1);
  const BivariateSeries dd = series::dividedDifference(psi, tauMax, tMax);
  return dd.shiftU(1).divUnivariateW(oneMinusGf(model.gfSeries(tauMax)));
}

std::vector<double> rowTailDeficit(const series::BivariateSeries& fe) {
  std::vector<double> out(fe.orderW() + 1);
  for (std::size_t tau = 0; tau <= fe.orderW(); ++tau) {
    double acc = 0.0;
    for (std::size_t t = 0; t <= fe.orderU(); ++t) acc += fe.at(tau, t);
    out[tau] = 1.0 - acc;
  }
  return out;
}

double AgedStateTensor::rowSum(std::size_t tau, std::size_t t) const {
  double acc = 0.0;
  for (std::size_t m = 0; m <= m_; ++m) acc += at(tau, m, t);
  return acc;
}

AgedStateTensor agedStateProbabilities(const renewal::WaitingTimeModel& model,
                                       std::size_t tauMax, std::size_t mMax,
                                       std::size_t tMax) {
  const BivariateSeries fe = forwardRecurrenceDensity(model, tauMax, tMax);
  const std::vector<double> psi = model.pdfTable(tMax);
  const std::vector<double> phi0 = renewal::stateProbabilities(model, 0, tMax);
  AgedStateTensor out(tauMax, mMax, tMax);
  for (std::size_t tau = 0; tau <= tauMax; ++tau) {
    // m = 0: survival of the aged count
    double acc = 0.0;
    for (std::size_t t = 0; t <= tMax; ++t) {
      acc += fe.at(tau, t);
      out.cell(tau, 0, t) = 1.0 - acc;
    }
    // m = 1: first event at r, then an ordinary event-free stretch
    if (mMax >= 1) {
      for (std::size_t t = 0; t <= tMax; ++t) {
        double s = 0.0;
        for (std::size_t r = 1; r <= t; ++r) s += fe.at(tau, r) * phi0[t - r];
        out.cell(tau, 1, t) = s;
      }
    }
    // m >= 2: one more ordinary waiting time on top of the previous state
    for (std::size_t m = 2; m <= mMax; ++m) {
      for (std::size_t t = 0; t <= tMax; ++t) {
        double s = 0.0;
        for (std::size_t k = 1; k <= t; ++k) s += psi[k] * out.at(tau, m - 1, t - k);
        out.cell(tau, m, t) = s;
      }
    }
  }
  return out;
}

series::BivariateSeries agedStatePolynomial(const renewal::WaitingTimeModel& model, double v,
                                            std::size_t tauMax, std::size_t tMax) {
  if (!(v >= -1.0 && v <= 1.0))
    throw std::invalid_argument("agedStatePolynomial: v must lie in [-1, 1]");
  const BivariateSeries fe = forwardRecurrenceDensity(model, tauMax, tMax);
  const std::vector<double> psi = model.pdfTable(tMax);
  const std::vector<double> phi0 = renewal::stateProbabilities(model, 0, tMax);
  BivariateSeries g(tauMax, tMax);
  std::vector<double> cur(tMax + 1), next(tMax + 1);
  for (std::size_t tau = 0; tau <= tauMax; ++tau) {
    double acc = 0.0;
    for (std::size_t t = 0; t <= tMax; ++t) {
      acc += fe.at(tau, t);
      g.cell(tau, t) = 1.0 - acc;  // m = 0 term, v^0
    }
    for (std::size_t t = 0; t <= tMax; ++t) {
      double s = 0.0;
      for (std::size_t r = 1; r <= t; ++r) s += fe.at(tau, r) * phi0[t - r];
      cur[t] = s;
    }
    double vm = v;
    // states above m = t are empty, so the m loop is exact at tMax
    for (std::size_t m = 1; m <= tMax; ++m) {
      for (std::size_t t = 0; t <= tMax; ++t) g.cell(tau, t) += vm * cur[t];
      vm *= v;
      if (m == tMax) break;
      for (std::size_t t = 0; t <= tMax; ++t) {
        double s = 0.0;
        for (std::size_t k = 1; k <= t; ++k) s += psi[k] * cur[t - k];
        next[t] = s;
      }
      cur.swap(next);
    }
  }
  return g;
}

series::BivariateSeries agedStatePolynomialGf(const renewal::WaitingTimeModel& model, double v,
                                              std::size_t tauMax, std::size_t tMax) {
  if (!(v >= -1.0 && v <= 1.0))
    throw std::invalid_argument("agedStatePolynomialGf: v must lie in [-1, 1]");
  const BivariateSeries fe = forwardRecurrenceDensity(model, tauMax, tMax);
  const RealSeries psiU = model.gfSeries(tMax);
  RealSeries den(tMax);  // 1 - v psibar(u)
  den.raw()[0] = 1.0;
  for (std::size_t k = 1; k <= tMax; ++k) den.raw()[k] = -v * psiU[k];
  BivariateSeries h = BivariateSeries(tauMax, tMax).addScaled(fe, 0.0, 1.0 - v);
  h = h.divUnivariateU(oneMinusU(tMax)).divUnivariateU(den);
  BivariateSeries ones(tauMax, tMax);
  for (std::size_t tau = 0; tau <= tauMax; ++tau)
    for (std::size_t t = 0; t <= tMax; ++t) ones.cell(tau, t) = 1.0;
  return ones.addScaled(h, 1.0, -1.0);
}

series::BivariateSeries conditionalAgedState(const renewal::WaitingTimeModel& model,
                                             std::size_t m, std::size_t n, std::size_t tauMax,
                                             std::size_t tMax) {
  const RealSeries psiW = model.gfSeries(tauMax);
  const RealSeries psiWn = powSeries(psiW, n);
  const BivariateSeries uDD =
      series::dividedDifference(model.gfSeries(tauMax + tMax + 1), tauMax, tMax).shiftU(1);
  if (m >= 1) {
    const RealSeries psiU = model.gfSeries(tMax);
    const RealSeries uFac = series::mul(powSeries(psiU, m - 1), oneMinusGf(psiU));
    return uDD.mulUnivariateW(psiWn).mulUnivariateU(uFac).divUnivariateU(oneMinusU(tMax));
  }
  // m = 0: psibar(w)^n [ (1-psibar(w))/(1-w) - u DD ] / (1-u); the bracket's
  // first part is the survival transform in w, constant in u
  BivariateSeries out(tauMax, tMax);
  const std::vector<double> surv = model.survivalTable(tauMax);
  for (std::size_t tau = 0; tau <= tauMax; ++tau) out.cell(tau, 0) = surv[tau];
  out = out.addScaled(uDD, 1.0, -1.0);
  return out.mulUnivariateW(psiWn).divUnivariateU(oneMinusU(tMax));
}

const series::BivariateSeries& AgedDistributionTable::statePolynomial(double v) const {
  auto it = gvCache_.find(v);
  if (it != gvCache_.end()) return it->second;
  BivariateSeries g(tauMax, tMax);
  for (std::size_t tau = 0; tau <= tauMax; ++tau) {
    for (std::size_t t = 0; t <= tMax; ++t) {
      double acc = 0.0, vm = 1.0;
      for (std::size_t m = 0; m <= mMax; ++m) {
        acc += vm * states.at(tau, m, t);
        vm *= v;
      }
      g.cell(tau, t) = acc;
    }
  }
  return gvCache_.emplace(v, std::move(g)).first->second;
}

AgedDistributionTable buildAgedTable(const renewal::WaitingTimeModel& model, std::size_t tauMax,
                                     std::size_t mMax, std::size_t tMax) {
  BivariateSeries fe = forwardRecurrenceDensity(model, tauMax, tMax);
  std::vector<double> deficit = rowTailDeficit(fe);
  return AgedDistributionTable(tauMax, mMax, tMax, std::move(fe), std::move(deficit),
                               agedStateProbabilities(model, tauMax, mMax, tMax));
}

}  // namespace srw::dtarp
