#include "srw/series.hpp"

namespace srw::series {

RealSeries BivariateSeries::rowSeries(std::size_t tau) const {
  if (tau > ow_) throw std::invalid_argument("rowSeries: row beyond order");
  std::vector<double> v(ou_ + 1);
  for (std::size_t t = 0; t <= ou_; ++t) v[t] = at(tau, t);
  return RealSeries(std::move(v));
}

RealSeries BivariateSeries::columnSeries(std::size_t t) const {
  if (t > ou_) throw std::invalid_argument("columnSeries: column beyond order");
  std::vector<double> v(ow_ + 1);
  for (std::size_t tau = 0; tau <= ow_; ++tau) v[tau] = at(tau, t);
  return RealSeries(std::move(v));
}

double BivariateSeries::diagonalSum(std::size_t k) const {
  double acc = 0.0;
  for (std::size_t tau = 0; tau <= ow_ && tau <= k; ++tau) {
    const std::size_t t = k - tau;
    if (t <= ou_) acc += at(tau, t);
  }
  return acc;
}

BivariateSeries BivariateSeries::addScaled(const BivariateSeries& other, double alpha,
                                           double beta) const {
  if (ow_ != other.ow_ || ou_ != other.ou_)
    throw std::invalid_argument("addScaled: order mismatch");
  BivariateSeries out(ow_, ou_);
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] = alpha * c_[i] + beta * other.c_[i];
  return out;
}

BivariateSeries BivariateSeries::mulUnivariateU(const RealSeries& s) const {
  if (s.order() != ou_) throw std::invalid_argument("mulUnivariateU: order mismatch");
  BivariateSeries out(ow_, ou_);
  for (std::size_t tau = 0; tau <= ow_; ++tau)
    for (std::size_t i = 0; i <= ou_; ++i) {
      const double v = at(tau, i);
      if (v == 0.0) continue;
      for (std::size_t j = 0; i + j <= ou_; ++j) out.cell(tau, i + j) += v * s[j];
    }
  return out;
}

BivariateSeries BivariateSeries::mulUnivariateW(const RealSeries& s) const {
  if (s.order() != ow_) throw std::invalid_argument("mulUnivariateW: order mismatch");
  BivariateSeries out(ow_, ou_);
  for (std::size_t tau = 0; tau <= ow_; ++tau)
    for (std::size_t j = 0; j <= tau; ++j) {
      const double sj = s[j];
      if (sj == 0.0) continue;
      for (std::size_t t = 0; t <= ou_; ++t) out.cell(tau, t) += sj * at(tau - j, t);
    }
  return out;
}

BivariateSeries BivariateSeries::divUnivariateU(const RealSeries& s) const {
  if (s.order() != ou_) throw std::invalid_argument("divUnivariateU: order mismatch");
  if (s[0] == 0.0) throw std::invalid_argument("divUnivariateU: zero constant term");
  BivariateSeries out(ow_, ou_);
  for (std::size_t tau = 0; tau <= ow_; ++tau)
    for (std::size_t t = 0; t <= ou_; ++t) {
      double acc = at(tau, t);
      for (std::size_t j = 1; j <= t; ++j) acc -= s[j] * out.at(tau, t - j);
      out.cell(tau, t) = acc / s[0];
    }
  return out;
}

BivariateSeries BivariateSeries::divUnivariateW(const RealSeries& s) const {
  if (s.order() != ow_) throw std::invalid_argument("divUnivariateW: order mismatch");
  if (s[0] == 0.0) throw std::invalid_argument("divUnivariateW: zero constant term");
  BivariateSeries out(ow_, ou_);
  for (std::size_t tau = 0; tau <= ow_; ++tau)
    for (std::size_t t = 0; t <= ou_; ++t) {
      double acc = at(tau, t);
      for (std::size_t j = 1; j <= tau; ++j) acc -= s[j] * out.at(tau - j, t);
      out.cell(tau, t) = acc / s[0];
    }
  return out;
}

BivariateSeries BivariateSeries::shiftU(std::size_t k) const {
  BivariateSeries out(ow_, ou_);
  for (std::size_t tau = 0; tau <= ow_; ++tau)
    for (std::size_t t = k; t <= ou_; ++t) out.cell(tau, t) = at(tau, t - k);
  return out;
}

BivariateSeries dividedDifference(const RealSeries& psi, std::size_t orderW,
                                  std::size_t orderU) {
  if (psi[0] != 0.0)
    throw std::invalid_argument("dividedDifference: psi must have zero constant term");
  if (psi.order() < orderW + orderU + 1)
    throw std::invalid_argument("dividedDifference: psi order too small for requested table");
  BivariateSeries out(orderW, orderU);
  for (std::size_t tau = 0; tau <= orderW; ++tau)
    for (std::size_t t = 0; t <= orderU; ++t) out.cell(tau, t) = psi[tau + t + 1];
  return out;
}

}  // namespace srw::series
