#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "srw/renewal.hpp"
#include "srw/rng.hpp"
#include "srw/series.hpp"

using srw::renewal::WaitingTimeModel;

TEST_CASE("geometric tables") {
  const auto m = WaitingTimeModel::geometric(0.3);
  const auto psi = m.pdfTable(50);
  const auto surv = m.survivalTable(50);
  CHECK(psi[0] == 0.0);
  double w = 0.3;
  for (std::size_t t = 1; t <= 50; ++t) {
    CHECK(psi[t] == doctest::Approx(w).epsilon(1e-14));
    CHECK(surv[t] == doctest::Approx(std::pow(0.7, static_cast<double>(t))).epsilon(1e-13));
    w *= 0.7;
  }
  CHECK(m.gfSeries(10)[7] == doctest::Approx(psi[7]));
}

TEST_CASE("sibuya tables match the fractional power expansion") {
  for (double mu : {0.25, 0.5, 0.8}) {
    const auto m = WaitingTimeModel::sibuya(mu);
    const auto psi = m.pdfTable(80);
    const auto frac = srw::series::fracPowerOneMinusU(mu, 80);
    CHECK(psi[1] == doctest::Approx(mu).epsilon(1e-15));
    CHECK(psi[2] == doctest::Approx(mu * (1.0 - mu) / 2.0).epsilon(1e-14));
    for (std::size_t t = 1; t <= 80; ++t)
      CHECK(psi[t] == doctest::Approx(-frac[t]).epsilon(1e-13));
    const auto surv = m.survivalTable(80);
    double run = 0.0;
    for (std::size_t t = 1; t <= 80; ++t) run += psi[t];
    CHECK(surv[80] == doctest::Approx(1.0 - run).epsilon(1e-12));
  }
}

TEST_CASE("fractional Bernoulli at mu = 1 degenerates to geometric") {
  const double p = 0.4;
  const auto fb = WaitingTimeModel::fractionalBernoulli(1.0, (1.0 - p) / p);
  const auto geo = WaitingTimeModel::geometric(p);
  const auto a = fb.pdfTable(200);
  const auto b = geo.pdfTable(200);
  for (std::size_t t = 0; t <= 200; ++t)
    CHECK(std::abs(a[t] - b[t]) < 1e-13);
}

TEST_CASE("fractional Bernoulli is a positive distribution") {
  const auto m = WaitingTimeModel::fractionalBernoulli(0.7, 1.5);
  const auto psi = m.pdfTable(2000);
  double sum = 0.0;
  for (std::size_t t = 1; t <= 2000; ++t) {
    CHECK(psi[t] > 0.0);
    sum += psi[t];
  }
  CHECK(sum < 1.0);
  CHECK(sum > 0.9);
}

TEST_CASE("broad power tail normalizes and decays like a power") {
  const auto m = WaitingTimeModel::broadPowerTail(1.5, 10'000);
  const auto psi = m.pdfTable(10'000);
  double sum = 0.0;
  for (std::size_t t = 1; t <= 10'000; ++t) sum += psi[t];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi[200] / psi[100] == doctest::Approx(std::pow(0.5, 2.5)).epsilon(1e-12));
  const auto surv = m.survivalTable(10'001);
  CHECK(surv[10'000] < 1e-14);
  CHECK(surv[10'001] < 1e-14);
}

TEST_CASE("custom model and file parsing") {
  const std::vector<double> pdf{0.0, 0.2, 0.5, 0.3};
  const auto m = WaitingTimeModel::custom(pdf);
  const auto table = m.pdfTable(6);
  CHECK(table[2] == doctest::Approx(0.5));
  CHECK(table[5] == 0.0);

  const char* path = "custom_model_test.tsv";
  {
    std::ofstream out(path);
    out << "# waiting-time table\n";
    out << "1\t0.2\n2\t0.5\n3\t0.3\n";
  }
  const auto f = WaitingTimeModel::customFromFile(path);
  std::remove(path);
  const auto ft = f.pdfTable(3);
  for (std::size_t t = 0; t <= 3; ++t) CHECK(ft[t] == doctest::Approx(table[t]));
}

TEST_CASE("model validation rejects bad parameters") {
  CHECK_THROWS(WaitingTimeModel::geometric(0.0));
  CHECK_THROWS(WaitingTimeModel::geometric(1.5));
  CHECK_THROWS(WaitingTimeModel::sibuya(1.0));
  CHECK_THROWS(WaitingTimeModel::sibuya(0.0));
  CHECK_THROWS(WaitingTimeModel::fractionalBernoulli(0.5, 0.0));
  CHECK_THROWS(WaitingTimeModel::broadPowerTail(1.0));
  CHECK_THROWS(WaitingTimeModel::custom({0.0, 0.2, 0.2}));
  CHECK_THROWS(WaitingTimeModel::custom({0.1, 0.9}));
}

TEST_CASE("state probabilities: survival at n = 0, unit mass overall") {
  const auto m = WaitingTimeModel::geometric(0.5);
  const auto phi0 = srw::renewal::stateProbabilities(m, 0, 24);
  const auto surv = m.survivalTable(24);
  for (std::size_t t = 0; t <= 24; ++t)
    CHECK(phi0[t] == doctest::Approx(surv[t]).epsilon(1e-13));

  for (std::size_t t : {5u, 12u, 20u}) {
    double sum = 0.0;
    for (std::size_t n = 0; n <= t; ++n) {
      const auto phi = srw::renewal::stateProbabilities(m, n, t);
      CHECK(phi[t] >= -1e-15);
      sum += phi[t];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("state parity series matches the alternating sum") {
  const auto m = WaitingTimeModel::sibuya(0.6);
  const std::size_t tMax = 30;
  const auto parity = srw::renewal::statePolynomialAtMinusOne(m, tMax);
  std::vector<double> direct(tMax + 1, 0.0);
  for (std::size_t n = 0; n <= tMax; ++n) {
    const auto phi = srw::renewal::stateProbabilities(m, n, tMax);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t t = 0; t <= tMax; ++t) direct[t] += sign * phi[t];
  }
  for (std::size_t t = 0; t <= tMax; ++t)
    CHECK(parity[t] == doctest::Approx(direct[t]).epsilon(1e-11));
}

TEST_CASE("geometric sampler: inversion law and censoring") {
  const auto m = WaitingTimeModel::geometric(0.3);
  srw::rng::Stream stream(2024);
  double mean = 0.0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const auto d = m.sampleWaitingTime(stream, 1'000'000);
    CHECK(d >= 1);
    mean += static_cast<double>(d);
  }
  mean /= n;
  // SE of the sample mean is ~0.0088
  CHECK(std::abs(mean - 1.0 / 0.3) < 0.06);

  const auto one = WaitingTimeModel::geometric(1.0);
  for (int i = 0; i < 10; ++i) CHECK(one.sampleWaitingTime(stream, 50) == 1);

  for (int i = 0; i < 1000; ++i) CHECK(m.sampleWaitingTime(stream, 5) <= 6);
}

TEST_CASE("sibuya sampler: hazard chain frequencies") {
  const double mu = 0.5;
  const auto m = WaitingTimeModel::sibuya(mu);
  srw::rng::Stream stream(777);
  const int n = 20'000;
  int ones = 0, censored = 0;
  for (int i = 0; i < n; ++i) {
    const auto d = m.sampleWaitingTime(stream, 1000);
    if (d == 1) ++ones;
    if (d == 1001) ++censored;
  }
  const double f1 = static_cast<double>(ones) / n;
  CHECK(std::abs(f1 - mu) < 0.015);  // ~4 sigma
  const double sTail = m.survivalTable(1000)[1000];
  const double fc = static_cast<double>(censored) / n;
  CHECK(std::abs(fc - sTail) < 5.0 * std::sqrt(sTail / n) + 1e-3);
}

TEST_CASE("tabulated sampler: custom frequencies and truncation counters") {
  const auto m = WaitingTimeModel::custom({0.0, 0.2, 0.5, 0.3});
  m.prepareSampling(10);
  srw::rng::Stream stream(31337);
  const int n = 100'000;
  int count[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const auto d = m.sampleWaitingTime(stream, 10);
    REQUIRE(d >= 1);
    REQUIRE(d <= 3);
    ++count[d];
  }
  CHECK(std::abs(count[1] / static_cast<double>(n) - 0.2) < 0.01);
  CHECK(std::abs(count[2] / static_cast<double>(n) - 0.5) < 0.01);
  CHECK(std::abs(count[3] / static_cast<double>(n) - 0.3) < 0.01);
  CHECK(m.truncatedDraws() == 0);
  CHECK(m.truncatedSamplingMass() < 1e-12);
}

TEST_CASE("fractional Bernoulli sampler censors against its table") {
  const auto m = WaitingTimeModel::fractionalBernoulli(0.5, 1.0);
  m.prepareSampling(200);
  srw::rng::Stream stream(99);
  int censored = 0;
  const int n = 50'000;
  for (int i = 0; i < n; ++i)
    if (m.sampleWaitingTime(stream, 200) == 201) ++censored;
  // survival near t = 200 for this heavy-tailed law is a few percent
  CHECK(censored > 0);
  CHECK(censored < n / 4);
}

TEST_CASE("tail constants: geometric") {
  const auto m = WaitingTimeModel::geometric(0.3);
  const auto fit = srw::renewal::fitTailConstants(m, 1.0, 2.0);
  CHECK(fit.a == doctest::Approx(1.0 / 0.3).epsilon(1e-7));
  CHECK(fit.b == doctest::Approx(0.7 / 0.09).epsilon(1e-3));
}

TEST_CASE("tail constants: sibuya") {
  const auto m = WaitingTimeModel::sibuya(0.5);
  const auto fit = srw::renewal::fitTailConstants(m, 0.5, 1.5);
  CHECK(fit.a == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(fit.b) < 1e-6);
}

TEST_CASE("tail constants: broad power tail amplitude") {
  const double lambda = 1.5;
  const auto m = WaitingTimeModel::broadPowerTail(lambda, 1'000'000);
  const auto fit = srw::renewal::fitTailConstants(m, 1.0, lambda);
  CHECK(fit.a == doctest::Approx(m.meanEstimate()).epsilon(1e-3));
  // b = C Gamma(-lambda) where C is the pdf amplitude
  const double c = m.pdfTable(2)[1];  // psi_1 = C
  CHECK(fit.b == doctest::Approx(c * std::tgamma(-lambda)).epsilon(0.02));
}

TEST_CASE("tail constants: fractional Bernoulli leading amplitude") {
  const auto m = WaitingTimeModel::fractionalBernoulli(0.7, 1.5);
  const auto fit = srw::renewal::fitTailConstants(m, 0.7, 1.0);
  CHECK(fit.a == doctest::Approx(1.5).epsilon(1e-2));
}

TEST_CASE("closed-form and table GF evaluations agree") {
  const auto m = WaitingTimeModel::broadPowerTail(2.5, 20'000);
  const double s = 0.05;
  const auto psi = m.pdfTable(20'000);
  double gf = 0.0;
  for (std::size_t t = 1; t <= 20'000; ++t)
    gf += psi[t] * std::pow(1.0 - s, static_cast<double>(t));
  CHECK(1.0 - gf == doctest::Approx(m.oneMinusGfAt(s)).epsilon(1e-10));

  const auto geo = WaitingTimeModel::geometric(0.25);
  CHECK(geo.oneMinusGfAt(0.1) == doctest::Approx(0.1 / (0.25 + 0.75 * 0.1)).epsilon(1e-14));
}

TEST_CASE("mean estimates") {
  CHECK(WaitingTimeModel::geometric(0.2).meanEstimate() == doctest::Approx(5.0));
  CHECK(WaitingTimeModel::fractionalBernoulli(1.0, 2.0).meanEstimate() == doctest::Approx(3.0));
  CHECK(std::isinf(WaitingTimeModel::sibuya(0.4).meanEstimate()));
  CHECK_FALSE(WaitingTimeModel::sibuya(0.4).hasFiniteMean());
  const auto c = WaitingTimeModel::custom({0.0, 0.5, 0.25, 0.25});
  CHECK(c.meanEstimate() == doctest::Approx(1.75));
}
