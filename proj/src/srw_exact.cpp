#include "srw/srw_exact.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "srw/specfun.hpp"

namespace srw::exact {

namespace {

using series::Complex;
using series::ComplexSeries;
using series::RealSeries;

void requireSigma(int sigma0) {
  if (sigma0 != 1 && sigma0 != -1)
    throw std::invalid_argument("walk: sigma0 must be +1 or -1");
}

template <class T>
series::Series<T> oneMinus(const series::Series<T>& s) {
  series::Series<T> out(s.order());
  out.raw()[0] = T(1.0) - s[0];
  for (std::size_t k = 1; k <= s.order(); ++k) out.raw()[k] = -s[k];
  return out;
}

// The moment transforms below are carried in long double. They hide up to
// four orders of 1/(1-u); a denominator with roots on |u| = 1 turns forward
// substitution into a recurrence with polynomially growing error modes, and
// in double that costs ~6 digits by t ~ 10^2. Factoring
// 1 - psiBar = (1-u) W, with W the survival generating function (positive,
// nonincreasing coefficients, so no roots inside the closed disk), leaves
// only well-conditioned divisions; the explicit 1/(1-u)^k powers become
// compensated cumulative sums.
using LongSeq = std::vector<long double>;

LongSeq toLong(const std::vector<double>& v) { return LongSeq(v.begin(), v.end()); }

LongSeq mulLong(const LongSeq& a, const LongSeq& b) {
  LongSeq out(a.size(), 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0L) continue;
    for (std::size_t j = 0; i + j < out.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

LongSeq divLong(const LongSeq& num, const LongSeq& den) {
  LongSeq out(num.size(), 0.0L);
  for (std::size_t t = 0; t < num.size(); ++t) {
    long double acc = num[t];
    for (std::size_t k = 1; k <= t; ++k) acc -= den[k] * out[t - k];
    out[t] = acc / den[0];
  }
  return out;
}

// In-place division by (1-u): Neumaier cumulative sum.
void cumsumLong(LongSeq& v) {
  long double s = 0.0L, c = 0.0L;
  for (long double& x : v) {
    const long double t = s + x;
    c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
    x = s + c;
  }
}

LongSeq onePlusGf(const std::vector<double>& psi) {
  LongSeq out = toLong(psi);
  out[0] = 1.0L;  // pdf tables carry psi_0 = 0
  return out;
}

// (1 - psiBar) / ((1-u)^2 (1 + psiBar)) = W / ((1-u)(1 + psiBar)); the
// first-moment generating function equals sigma0 [this - 1/(1-u)]
std::vector<double> momentGfCore(const renewal::WaitingTimeModel& model, std::size_t tMax) {
  LongSeq core =
      divLong(toLong(model.survivalTable(tMax)), onePlusGf(model.pdfTable(tMax)));
  cumsumLong(core);
  return std::vector<double>(core.begin(), core.end());
}

}  // namespace

std::vector<double> expectedPosition(const renewal::WaitingTimeModel& model, int sigma0,
                                     std::size_t tMax) {
  requireSigma(sigma0);
  std::vector<double> q = momentGfCore(model, tMax);
  for (double& v : q) v -= 1.0;  // subtract 1/(1-u)
  for (double& v : q) v *= sigma0;
  return q;
}

std::vector<double> msdViaK(const renewal::WaitingTimeModel& model, std::size_t tMax) {
  const std::vector<double> psi = model.pdfTable(tMax);
  const LongSeq w = toLong(model.survivalTable(tMax));
  const LongSeq wp = mulLong(w, onePlusGf(psi));  // W (1 + psiBar)
  const LongSeq w2 = mulLong(w, w);
  // <X_t^2> = 2 K(t) - t combines, after pulling (1-u) W out of 1 - psiBar,
  // into num / ((1-u)^3 W (1 + psiBar)) with
  //   num = 2 W(1+psiBar) - 4 u psiBar' - 2 (1-u)^2 W^2 - u(1-u) W(1+psiBar).
  // Every intermediate stays O(1) per order, so the t = 0 and t = 1 values
  // come out exactly 0 and 1 in floating point.
  auto at = [](const LongSeq& s, std::size_t t, std::size_t back) {
    return t >= back ? s[t - back] : 0.0L;
  };
  LongSeq num(tMax + 1, 0.0L);
  for (std::size_t t = 0; t <= tMax; ++t) {
    num[t] = 2.0L * wp[t] - 4.0L * static_cast<long double>(t) * psi[t] -
             2.0L * (w2[t] - 2.0L * at(w2, t, 1) + at(w2, t, 2)) -
             (at(wp, t, 1) - at(wp, t, 2));
  }
  LongSeq g = divLong(num, wp);
  cumsumLong(g);
  cumsumLong(g);
  cumsumLong(g);
  return std::vector<double>(g.begin(), g.end());
}

MomentTrack momentTrack(const renewal::WaitingTimeModel& model, int sigma0, std::size_t tMax) {
  MomentTrack out;
  out.mean = expectedPosition(model, sigma0, tMax);
  out.msd = msdViaK(model, tMax);
  out.variance.resize(tMax + 1);
  for (std::size_t t = 0; t <= tMax; ++t)
    out.variance[t] = out.msd[t] - out.mean[t] * out.mean[t];
  return out;
}

MomentTrack bernoulliClosedForms(double p, int sigma0, std::size_t tMax) {
  requireSigma(sigma0);
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("bernoulliClosedForms: p must lie in (0, 1]");
  MomentTrack out;
  out.mean.resize(tMax + 1);
  out.msd.resize(tMax + 1);
  out.variance.resize(tMax + 1);
  const double r = 1.0 - 2.0 * p;
  const double s0 = static_cast<double>(sigma0);
  double rt = 1.0;  // r^t
  for (std::size_t t = 0; t <= tMax; ++t) {
    out.mean[t] = s0 * r / (2.0 * p) * (1.0 - rt);
    out.msd[t] = (1.0 - p) / p * static_cast<double>(t) - s0 / p * out.mean[t];
    out.variance[t] = out.msd[t] - out.mean[t] * out.mean[t];
    rt *= r;
  }
  return out;
}

MomentTrack sibuyaClosedForms(double mu, int sigma0, std::size_t tMax) {
  requireSigma(sigma0);
  if (!(mu > 0.0 && mu < 1.0))
    throw std::invalid_argument("sibuyaClosedForms: mu must lie in (0, 1)");
  const auto p2 = specfun::prabhakarKernel({mu, 2.0, 2.0}, tMax);
  const auto pa = specfun::prabhakarKernel({mu, mu + 3.0, 2.0}, tMax);
  const auto pb = specfun::prabhakarKernel({mu, mu + 2.0, 2.0}, tMax);
  const double s0 = static_cast<double>(sigma0);
  MomentTrack out;
  out.mean.resize(tMax + 1);
  out.msd.resize(tMax + 1);
  out.variance.resize(tMax + 1);
  for (std::size_t t = 0; t <= tMax; ++t) {
    const double td = static_cast<double>(t);
    out.mean[t] = -s0 * (p2[t] + 1.0);
    out.msd[t] =
        (td + 1.0) * (td + 1.0) + 1.0 + 4.0 * mu * (pa[t] - pb[t]) + 2.0 * p2[t];
    out.variance[t] = out.msd[t] - out.mean[t] * out.mean[t];
  }
  return out;
}

series::ComplexSeries segmentedGf(const renewal::WaitingTimeModel& model, Complex zeta1,
                                  Complex zeta2, std::size_t order) {
  if (std::abs(zeta1) > 1.0 + 1e-3 || std::abs(zeta2) > 1.0 + 1e-3)
    throw std::invalid_argument("segmentedGf: |zeta| must not exceed 1 + 1e-3");
  if (zeta1 == Complex(0.0, 0.0))
    throw std::invalid_argument("segmentedGf: zeta1 must be nonzero");
  const RealSeries psi = model.gfSeries(order);
  const ComplexSeries a1 = series::scaleArgument(psi, zeta1);
  const ComplexSeries a2 = series::scaleArgument(psi, zeta2);
  ComplexSeries lin1(order), lin2(order);
  lin1.raw()[0] = 1.0;
  lin2.raw()[0] = 1.0;
  if (order >= 1) {
    lin1.raw()[1] = -zeta1;
    lin2.raw()[1] = -zeta2;
  }
  const ComplexSeries term1 = series::div(oneMinus(a1), lin1);
  const ComplexSeries term2 = series::mul(series::div(oneMinus(a2), lin2), a1);
  const ComplexSeries num = series::linearCombine(term1, term2, Complex(1.0, 0.0), zeta2 / zeta1);
  return series::div(num, oneMinus(series::mul(a1, a2)));
}

double LatticeDistribution::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i)
    acc += static_cast<double>(xMin + static_cast<long long>(i)) * mass[i];
  return acc;
}

double LatticeDistribution::secondMoment() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double x = static_cast<double>(xMin + static_cast<long long>(i));
    acc += x * x * mass[i];
  }
  return acc;
}

namespace {

// Invert a characteristic vector ghat(kappa_j), j = 0..M-1, onto lattice
// points x = xMin..xMin+len-1; P(x) = (1/M) sum_j e^{i kappa_j x} ghat_j.
LatticeDistribution invertGrid(const std::vector<Complex>& ghat, long long xMin,
                               std::size_t len) {
  const std::size_t m = ghat.size();
  LatticeDistribution out;
  out.xMin = xMin;
  out.mass.resize(len);
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double x = static_cast<double>(xMin + static_cast<long long>(i));
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
      acc += std::polar(1.0, kappa * x) * ghat[j];
    }
    acc /= static_cast<double>(m);
    out.maxImagResidue = std::max(out.maxImagResidue, std::abs(acc.imag()));
    double p = acc.real();
    if (p < -1e-12)
      throw std::runtime_error("propagator: negative probability mass beyond roundoff budget");
    p = std::max(0.0, p);
    out.mass[i] = p;
    sum += p;
  }
  out.massDeficit = std::abs(1.0 - sum);
  return out;
}

}  // namespace

LatticeDistribution propagator(const renewal::WaitingTimeModel& model, int sigma0,
                               std::size_t t) {
  requireSigma(sigma0);
  const std::size_t m = 2 * t + 1;
  std::vector<Complex> ghat(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    const Complex z1 = std::polar(1.0, -kappa * sigma0);
    ghat[j] = segmentedGf(model, z1, std::conj(z1), t)[t];
  }
  return invertGrid(ghat, -static_cast<long long>(t), 2 * t + 1);
}

std::vector<LatticeDistribution> propagatorSweep(const renewal::WaitingTimeModel& model,
                                                 int sigma0, std::size_t tMax) {
  requireSigma(sigma0);
  const std::size_t m = 2 * tMax + 1;
  std::vector<ComplexSeries> ghat;
  ghat.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    const Complex z1 = std::polar(1.0, -kappa * sigma0);
    ghat.push_back(segmentedGf(model, z1, std::conj(z1), tMax));
  }
  std::vector<LatticeDistribution> out;
  out.reserve(tMax + 1);
  std::vector<Complex> slice(m);
  for (std::size_t t = 0; t <= tMax; ++t) {
    for (std::size_t j = 0; j < m; ++j) slice[j] = ghat[j][t];
    out.push_back(invertGrid(slice, -static_cast<long long>(t), 2 * t + 1));
  }
  return out;
}

LatticeDistribution occupationTimePropagator(const renewal::WaitingTimeModel& model,
                                             std::size_t t, State state) {
  const std::size_t m = t + 1;
  std::vector<Complex> ghat(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    const Complex zk = std::polar(1.0, -kappa);
    const Complex z1 = state == State::Plus ? zk : Complex(1.0, 0.0);
    const Complex z2 = state == State::Plus ? Complex(1.0, 0.0) : zk;
    ghat[j] = segmentedGf(model, z1, z2, t)[t];
  }
  return invertGrid(ghat, 0, t + 1);
}

double consistencyIdentity(const renewal::WaitingTimeModel& model, std::size_t order) {
  const double h = 1e-5;
  auto probe = [&](double d1, double d2) {
    const Complex z1(1.0 + d1, 0.0), z2(1.0 + d2, 0.0);
    ComplexSeries g = segmentedGf(model, z1, z2, order);
    for (Complex& c : g.raw()) c *= z1;  // zeta1 * g
    return g;
  };
  const ComplexSeries p1 = probe(h, 0.0), m1 = probe(-h, 0.0);
  const ComplexSeries p2 = probe(0.0, h), m2 = probe(0.0, -h);
  const std::vector<double> target = momentGfCore(model, order);
  double maxDev = 0.0;
  for (std::size_t t = 0; t <= order; ++t) {
    const Complex lhs = ((p1[t] - m1[t]) - (p2[t] - m2[t])) / (2.0 * h);
    maxDev = std::max(maxDev, std::abs(lhs - Complex(target[t], 0.0)));
  }
  return maxDev;
}

}  // namespace srw::exact
