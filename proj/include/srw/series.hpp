#pragma once

// Truncated power series over double or complex<double>, plus a bivariate
// (two-variable) truncated series used for the aging pipeline.  All ops are
// value-returning; operands must share the same truncation order.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace srw::series {

using Complex = std::complex<double>;

template <class T>
inline constexpr bool is_series_scalar =
    std::is_same_v<T, double> || std::is_same_v<T, Complex>;

template <class T>
class Series {
  static_assert(is_series_scalar<T>, "series scalar must be double or complex<double>");

 public:
  Series() : c_(1, T{}) {}
  explicit Series(std::size_t order) : c_(order + 1, T{}) {}
  explicit Series(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("series: empty coefficient vector");
  }

  std::size_t order() const { return c_.size() - 1; }
  std::size_t size() const { return c_.size(); }
  const T& operator[](std::size_t k) const { return c_[k]; }
  const std::vector<T>& coeffs() const { return c_; }

  // internal mutation is confined to the factory functions below
  std::vector<T>& raw() { return c_; }

 private:
  std::vector<T> c_;
};

using RealSeries = Series<double>;
using ComplexSeries = Series<Complex>;

inline void requireSameOrder(std::size_t a, std::size_t b, const char* op) {
  if (a != b)
    throw std::invalid_argument(std::string(op) + ": order mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

template <class T>
Series<T> padTo(const Series<T>& a, std::size_t order) {
  if (order < a.order()) throw std::invalid_argument("padTo: target order below input order");
  Series<T> out(order);
  for (std::size_t k = 0; k <= a.order(); ++k) out.raw()[k] = a[k];
  return out;
}

inline ComplexSeries promote(const RealSeries& a) {
  ComplexSeries out(a.order());
  for (std::size_t k = 0; k <= a.order(); ++k) out.raw()[k] = Complex(a[k], 0.0);
  return out;
}

template <class T>
Series<T> linearCombine(const Series<T>& a, const Series<T>& b, T alpha, T beta) {
  requireSameOrder(a.order(), b.order(), "linearCombine");
  Series<T> out(a.order());
  for (std::size_t k = 0; k <= a.order(); ++k) out.raw()[k] = alpha * a[k] + beta * b[k];
  return out;
}

// Cauchy product truncated at the shared order.
template <class T>
Series<T> mul(const Series<T>& a, const Series<T>& b) {
  requireSameOrder(a.order(), b.order(), "mul");
  const std::size_t n = a.order();
  Series<T> out(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const T ai = a[i];
    if (ai == T{}) continue;
    for (std::size_t j = 0; i + j <= n; ++j) out.raw()[i + j] += ai * b[j];
  }
  return out;
}

// Forward substitution; den[0] must be nonzero.
template <class T>
Series<T> div(const Series<T>& num, const Series<T>& den) {
  requireSameOrder(num.order(), den.order(), "div");
  if (den[0] == T{}) throw std::invalid_argument("div: denominator constant term is zero");
  const std::size_t n = num.order();
  Series<T> out(n);
  for (std::size_t k = 0; k <= n; ++k) {
    T acc = num[k];
    for (std::size_t j = 1; j <= k; ++j) acc -= den[j] * out.raw()[k - j];
    out.raw()[k] = acc / den[0];
  }
  return out;
}

// Coefficients of (1 - u)^mu for real mu: c_0 = 1, c_k = c_{k-1} (k-1-mu)/k.
inline RealSeries fracPowerOneMinusU(double mu, std::size_t order) {
  RealSeries out(order);
  out.raw()[0] = 1.0;
  for (std::size_t k = 1; k <= order; ++k)
    out.raw()[k] = out.raw()[k - 1] * ((static_cast<double>(k) - 1.0 - mu) / static_cast<double>(k));
  return out;
}

// a(u) -> a(u*zeta).  A unit-modulus zeta takes the polar path so that
// coefficient magnitudes are preserved exactly up to one rounding.
inline ComplexSeries scaleArgument(const ComplexSeries& a, Complex zeta) {
  ComplexSeries out(a.order());
  const double mod = std::abs(zeta);
  if (std::abs(mod - 1.0) < 1e-12 && std::abs(std::imag(zeta)) > 0.0) {
    const double theta = std::arg(zeta);
    for (std::size_t k = 0; k <= a.order(); ++k)
      out.raw()[k] = a[k] * std::polar(1.0, theta * static_cast<double>(k));
    return out;
  }
  Complex p(1.0, 0.0);
  for (std::size_t k = 0; k <= a.order(); ++k) {
    out.raw()[k] = a[k] * p;
    p *= zeta;
  }
  return out;
}

inline ComplexSeries scaleArgument(const RealSeries& a, Complex zeta) {
  return scaleArgument(promote(a), zeta);
}

inline RealSeries scaleArgument(const RealSeries& a, double zeta) {
  RealSeries out(a.order());
  double p = 1.0;
  for (std::size_t k = 0; k <= a.order(); ++k) {
    out.raw()[k] = a[k] * p;
    p *= zeta;
  }
  return out;
}

// Termwise derivative; output order is one lower, caller re-pads if needed.
template <class T>
Series<T> derivative(const Series<T>& a) {
  if (a.order() == 0) throw std::invalid_argument("derivative: order-zero series");
  Series<T> out(a.order() - 1);
  for (std::size_t k = 0; k + 1 <= a.order(); ++k)
    out.raw()[k] = static_cast<double>(k + 1) * a[k + 1];
  return out;
}

// Rectangular truncated series in (w, u): rows are powers of w, columns
// powers of u.  Real coefficients only; the aging pipeline needs no complex
// bivariate arithmetic.
class BivariateSeries {
 public:
  BivariateSeries(std::size_t orderW, std::size_t orderU)
      : ow_(orderW), ou_(orderU), c_((orderW + 1) * (orderU + 1), 0.0) {}

  std::size_t orderW() const { return ow_; }
  std::size_t orderU() const { return ou_; }
  double at(std::size_t tau, std::size_t t) const { return c_[tau * (ou_ + 1) + t]; }
  double& cell(std::size_t tau, std::size_t t) { return c_[tau * (ou_ + 1) + t]; }

  RealSeries rowSeries(std::size_t tau) const;    // fixed w-power, series in u
  RealSeries columnSeries(std::size_t t) const;   // fixed u-power, series in w
  double diagonalSum(std::size_t k) const;        // sum over tau + t == k

  BivariateSeries addScaled(const BivariateSeries& other, double alpha, double beta) const;
  BivariateSeries mulUnivariateU(const RealSeries& s) const;
  BivariateSeries mulUnivariateW(const RealSeries& s) const;
  BivariateSeries divUnivariateU(const RealSeries& s) const;
  BivariateSeries divUnivariateW(const RealSeries& s) const;
  BivariateSeries shiftU(std::size_t k) const;    // multiply by u^k

 private:
  std::size_t ow_, ou_;
  std::vector<double> c_;
};

// Divided-difference table of psi: entry (tau, t) is psi_{tau+t+1}.
// psi must have zero constant term and order at least orderW + orderU + 1.
BivariateSeries dividedDifference(const RealSeries& psi, std::size_t orderW, std::size_t orderU);

}  // namespace srw::series
