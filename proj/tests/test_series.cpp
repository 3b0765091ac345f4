#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "srw/series.hpp"

using namespace srw::series;

namespace {

RealSeries randomSeries(std::mt19937& gen, std::size_t order, bool unitLeading) {
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution coin(0.5);
  RealSeries s(order);
  for (std::size_t k = 0; k <= order; ++k)
    s.raw()[k] = (coin(gen) ? 1.0 : -1.0) * mag(gen);
  if (unitLeading && s[0] == 0.0) s.raw()[0] = 1.0;
  return s;
}

// denominator whose reciprocal series stays bounded: coefficients decay
// geometrically so forward substitution cannot amplify roundoff
RealSeries randomDenominator(std::mt19937& gen, std::size_t order) {
  std::uniform_real_distribution<double> mag(0.0, 0.4);
  std::bernoulli_distribution coin(0.5);
  RealSeries s(order);
  s.raw()[0] = (coin(gen) ? 1.0 : -1.0) * (0.8 + mag(gen));
  double scale = 0.6;
  for (std::size_t k = 1; k <= order; ++k) {
    s.raw()[k] = (coin(gen) ? 1.0 : -1.0) * mag(gen) * scale;
    scale *= 0.6;
  }
  return s;
}

}  // namespace

TEST_CASE("mul then div recovers the numerator") {
  std::mt19937 gen(12345);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = randomSeries(gen, 40, false);
    const auto b = randomDenominator(gen, 40);
    const auto back = div(mul(a, b), b);
    for (std::size_t k = 0; k <= 40; ++k)
      CHECK(std::abs(back[k] - a[k]) <= 1e-10 * std::max(1.0, std::abs(a[k])));
  }
}

TEST_CASE("division rejects a vanishing constant term") {
  RealSeries num(3), den(3);
  num.raw()[0] = 1.0;
  den.raw()[1] = 1.0;
  CHECK_THROWS(div(num, den));
}

TEST_CASE("fractional power of (1-u): sample coefficients") {
  const auto s = fracPowerOneMinusU(0.5, 3);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(s[2] == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(s[3] == doctest::Approx(-0.0625).epsilon(1e-15));
}

TEST_CASE("fractional powers multiply to identity") {
  for (double mu : {0.25, 0.5, 0.8}) {
    const auto prod = mul(fracPowerOneMinusU(mu, 50), fracPowerOneMinusU(-mu, 50));
    CHECK(std::abs(prod[0] - 1.0) < 1e-14);
    for (std::size_t k = 1; k <= 50; ++k) CHECK(std::abs(prod[k]) < 1e-13);
  }
}

TEST_CASE("integer exponent reproduces the binomial theorem") {
  const auto s = fracPowerOneMinusU(2.0, 5);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(-2.0));
  CHECK(s[2] == doctest::Approx(1.0));
  for (std::size_t k = 3; k <= 5; ++k) CHECK(std::abs(s[k]) < 1e-15);
}

TEST_CASE("argument scaling on the unit circle preserves magnitudes") {
  std::mt19937 gen(99);
  const auto a = randomSeries(gen, 300, false);
  const Complex zeta = std::polar(1.0, 0.7354);
  const auto scaled = scaleArgument(a, zeta);
  for (std::size_t k = 0; k <= 300; ++k) {
    CHECK(std::abs(std::abs(scaled[k]) - std::abs(a[k])) < 1e-12);
    const Complex expect = a[k] * std::polar(1.0, 0.7354 * static_cast<double>(k));
    CHECK(std::abs(scaled[k] - expect) < 1e-11);
  }
}

TEST_CASE("argument scaling with a real factor") {
  std::mt19937 gen(7);
  const auto a = randomSeries(gen, 30, false);
  const auto scaled = scaleArgument(a, 0.5);
  double pw = 1.0;
  for (std::size_t k = 0; k <= 30; ++k) {
    CHECK(scaled[k] == doctest::Approx(a[k] * pw).epsilon(1e-13));
    pw *= 0.5;
  }
}

TEST_CASE("derivative shifts and weights coefficients") {
  RealSeries a(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  const auto d = derivative(a);
  CHECK(d.order() == 2);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(6.0));
  CHECK(d[2] == doctest::Approx(12.0));
  RealSeries flat(0);
  CHECK_THROWS(derivative(flat));
}

TEST_CASE("padTo extends with zeros") {
  RealSeries a(std::vector<double>{1.0, 2.0});
  const auto p = padTo(a, 4);
  CHECK(p.order() == 4);
  CHECK(p[1] == doctest::Approx(2.0));
  CHECK(p[4] == 0.0);
  CHECK_THROWS(padTo(a, 0));
}

TEST_CASE("complex mul/div roundtrip") {
  std::mt19937 gen(5150);
  std::uniform_real_distribution<double> mag(-1.0, 1.0);
  ComplexSeries a(25), b(25);
  double scale = 1.0;
  for (std::size_t k = 0; k <= 25; ++k) {
    a.raw()[k] = Complex(mag(gen), mag(gen));
    scale *= 0.6;
    b.raw()[k] = Complex(mag(gen) * scale, mag(gen) * scale);
  }
  b.raw()[0] = Complex(1.2, -0.3);
  const auto back = div(mul(a, b), b);
  for (std::size_t k = 0; k <= 25; ++k) CHECK(std::abs(back[k] - a[k]) < 1e-11);
}

TEST_CASE("divided-difference table of a waiting-time sequence") {
  RealSeries psi(12);
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> mag(0.01, 1.0);
  for (std::size_t t = 1; t <= 12; ++t) psi.raw()[t] = mag(gen);

  const auto table = dividedDifference(psi, 5, 5);
  for (std::size_t tau = 0; tau <= 5; ++tau)
    for (std::size_t t = 0; t <= 5; ++t) {
      CHECK(table.at(tau, t) == doctest::Approx(psi[tau + t + 1]).epsilon(1e-15));
      CHECK(table.at(tau, t) == doctest::Approx(table.at(t, tau)).epsilon(1e-15));
    }
  for (std::size_t k = 0; k <= 5; ++k)
    CHECK(table.diagonalSum(k) ==
          doctest::Approx(static_cast<double>(k + 1) * psi[k + 1]).epsilon(1e-14));
}

TEST_CASE("bivariate slice products invert") {
  std::mt19937 gen(31415);
  std::uniform_real_distribution<double> mag(-1.0, 1.0);
  BivariateSeries f(6, 8);
  for (std::size_t tau = 0; tau <= 6; ++tau)
    for (std::size_t t = 0; t <= 8; ++t) f.cell(tau, t) = mag(gen);

  RealSeries su(8), sw(6);
  for (std::size_t k = 0; k <= 8; ++k) su.raw()[k] = mag(gen);
  for (std::size_t k = 0; k <= 6; ++k) sw.raw()[k] = mag(gen);
  su.raw()[0] = 1.4;
  sw.raw()[0] = -0.8;

  const auto backU = f.mulUnivariateU(su).divUnivariateU(su);
  const auto backW = f.mulUnivariateW(sw).divUnivariateW(sw);
  for (std::size_t tau = 0; tau <= 6; ++tau)
    for (std::size_t t = 0; t <= 8; ++t) {
      CHECK(std::abs(backU.at(tau, t) - f.at(tau, t)) < 1e-12);
      CHECK(std::abs(backW.at(tau, t) - f.at(tau, t)) < 1e-12);
    }
}

TEST_CASE("shiftU moves mass to higher u powers") {
  BivariateSeries f(2, 4);
  f.cell(1, 0) = 3.0;
  f.cell(2, 2) = -1.0;
  const auto g = f.shiftU(2);
  CHECK(g.at(1, 2) == doctest::Approx(3.0));
  CHECK(g.at(2, 4) == doctest::Approx(-1.0));
  CHECK(g.at(1, 0) == 0.0);
  CHECK(g.at(2, 2) == 0.0);
}

TEST_CASE("row and column slices agree with cells") {
  BivariateSeries f(3, 4);
  f.cell(2, 3) = 1.5;
  CHECK(f.rowSeries(2)[3] == doctest::Approx(1.5));
  CHECK(f.columnSeries(3)[2] == doctest::Approx(1.5));
}
