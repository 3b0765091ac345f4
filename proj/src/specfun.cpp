#include "srw/specfun.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srw/series.hpp"

namespace srw::specfun {
namespace {

constexpr double kMlWindow = 50.0;

class Mp {
 public:
  explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mp() { mpfr_clear(v_); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

class MpArray {
 public:
  MpArray(std::size_t n, mpfr_prec_t prec) : v_(n) {
    for (auto& x : v_) mpfr_init2(x, prec);
  }
  ~MpArray() {
    for (auto& x : v_) mpfr_clear(x);
  }
  MpArray(const MpArray&) = delete;
  MpArray& operator=(const MpArray&) = delete;
  mpfr_ptr operator[](std::size_t i) { return v_[i]; }

 private:
  std::vector<mpfr_t> v_;
};

struct SeriesShape {
  double maxLn;  // natural log of the peak term magnitude
  long terms;
};

// Scan term magnitudes |z|^m / Gamma(alpha m + beta) in double until they sit
// 60 nats below max(peak, 1); this sizes both the summation length and the
// working precision.
SeriesShape scanSeriesShape(double alpha, double beta, double absZ) {
  const double lnz = std::log(absZ);
  double maxLn = -std::numeric_limits<double>::infinity();
  long m = 0;
  for (;; ++m) {
    const double ln = static_cast<double>(m) * lnz - std::lgamma(alpha * m + beta);
    maxLn = std::max(maxLn, ln);
    if (m > 2 && ln < std::min(maxLn, 0.0) - 60.0) break;
    if (m > 50'000'000) throw std::runtime_error("mittagLeffler: series scan did not terminate");
  }
  return {maxLn, m + 1};
}

double mlSeriesDouble(double alpha, double beta, double z, long terms) {
  const double lnAbsZ = std::log(std::abs(z));
  double sum = 0.0, comp = 0.0;  // Neumaier compensation
  for (long m = 0; m < terms; ++m) {
    double t = std::exp(static_cast<double>(m) * lnAbsZ - std::lgamma(alpha * m + beta));
    if (z < 0.0 && (m & 1L)) t = -t;
    const double s = sum + t;
    comp += (std::abs(sum) >= std::abs(t)) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return sum + comp;
}

double mlSeriesBig(double alpha, double beta, double z, const SeriesShape& shape) {
  const auto prec =
      static_cast<mpfr_prec_t>(std::max(128.0, shape.maxLn * 1.4427 + 96.0));
  Mp sum(prec), term(prec), arg(prec), work(prec), lnz(prec), alphaM(prec), betaM(prec);
  mpfr_set_d(lnz.get(), std::abs(z), MPFR_RNDN);
  mpfr_log(lnz.get(), lnz.get(), MPFR_RNDN);
  mpfr_set_d(alphaM.get(), alpha, MPFR_RNDN);
  mpfr_set_d(betaM.get(), beta, MPFR_RNDN);
  mpfr_set_zero(sum.get(), 1);
  for (long m = 0; m < shape.terms; ++m) {
    mpfr_mul_si(arg.get(), alphaM.get(), m, MPFR_RNDN);
    mpfr_add(arg.get(), arg.get(), betaM.get(), MPFR_RNDN);
    int sgn = 0;
    mpfr_lgamma(work.get(), &sgn, arg.get(), MPFR_RNDN);
    mpfr_mul_si(term.get(), lnz.get(), m, MPFR_RNDN);
    mpfr_sub(term.get(), term.get(), work.get(), MPFR_RNDN);
    mpfr_exp(term.get(), term.get(), MPFR_RNDN);
    const bool negative = (z < 0.0 && (m & 1L)) != (sgn < 0);
    if (negative)
      mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    else
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
  }
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

}  // namespace

double reciprocalGamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x > 0.5) return 1.0 / std::tgamma(x);
  return std::sin(M_PI * x) * std::tgamma(1.0 - x) / M_PI;
}

double mittagLeffler(double alpha, double beta, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("mittagLeffler: alpha must lie in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("mittagLeffler: beta must be positive");
  if (z > kMlWindow)
    throw std::domain_error("mittagLeffler: argument above the series window (z <= 50)");
  if (z < -kMlWindow) return -reciprocalGamma(beta - alpha) / z;
  if (z == 0.0) return reciprocalGamma(beta);
  const SeriesShape shape = scanSeriesShape(alpha, beta, std::abs(z));
  if (z > 0.0 || shape.maxLn < 9.0) {
    if (shape.maxLn > 690.0) return std::numeric_limits<double>::infinity();
    return mlSeriesDouble(alpha, beta, z, shape.terms);
  }
  // Alternating series would cancel ~exp(maxLn) of the peak term; carry the
  // summation at a precision that keeps the survivors accurate.
  return mlSeriesBig(alpha, beta, z, shape);
}

void validate(const PrabhakarParams& p) {
  if (!(p.mu > 0.0 && p.mu <= 1.0))
    throw std::invalid_argument("prabhakar: mu must lie in (0, 1]");
  if (!(p.nu > 0.0)) throw std::invalid_argument("prabhakar: nu must be positive");
  if (!(p.lambda > 0.0)) throw std::invalid_argument("prabhakar: lambda must be positive");
  if (p.lambda == 1.0)
    throw std::invalid_argument("prabhakar: lambda == 1 makes the kernel divergent");
}

std::vector<double> prabhakarKernel(const PrabhakarParams& p, std::size_t tMax) {
  validate(p);
  auto num = series::fracPowerOneMinusU(p.mu - p.nu, tMax);
  auto den = series::fracPowerOneMinusU(p.mu, tMax);
  den.raw()[0] -= p.lambda;
  return series::div(num, den).coeffs();
}

std::vector<double> prabhakarKernelDirect(const PrabhakarParams& p, std::size_t tMax) {
  validate(p);
  const std::size_t n = tMax + 1;
  std::vector<double> res(n, 0.0), val(n);
  const bool upper = p.lambda > 1.0;
  const double step = upper ? 1.0 / p.lambda : p.lambda;
  double weight = upper ? -1.0 / p.lambda : 1.0;  // signed power of lambda
  int quiet = 0;
  for (long m = upper ? 1 : 0;; ++m) {
    const double a = upper ? (p.nu - m * p.mu) : (p.nu + m * p.mu);
    val[0] = weight;
    double maxRel = std::abs(val[0]) / std::max(1.0, std::abs(res[0]));
    for (std::size_t t = 1; t < n; ++t) {
      val[t] = val[t - 1] * ((a + static_cast<double>(t) - 1.0) / static_cast<double>(t));
      maxRel = std::max(maxRel, std::abs(val[t]) / std::max(1.0, std::abs(res[t])));
    }
    for (std::size_t t = 0; t < n; ++t) res[t] += val[t];
    // a near-zero Pochhammer start can blank a single m-row; require a run of
    // negligible rows before stopping
    quiet = (maxRel < 1e-15) ? quiet + 1 : 0;
    if (quiet >= 3) break;
    if (m > 2'000'000)
      throw std::runtime_error("prabhakarKernelDirect: series converging too slowly");
    weight *= step;
  }
  return res;
}

ScalingLimitReport prabhakarScalingLimit(double mu, double nu, double lambda0, double t,
                                         double hStart, int halvings) {
  if (!(mu > 0.0 && mu <= 1.0) || !(nu > 0.0))
    throw std::invalid_argument("prabhakarScalingLimit: bad kernel indices");
  if (!(lambda0 > 0.0)) throw std::invalid_argument("prabhakarScalingLimit: lambda0 must be positive");
  if (!(t > 0.0) || !(hStart > 0.0) || halvings < 1)
    throw std::invalid_argument("prabhakarScalingLimit: bad grid parameters");

  ScalingLimitReport report;
  report.target = std::pow(t, nu - 1.0) * mittagLeffler(mu, nu, lambda0 * std::pow(t, mu));
  report.monotone = true;
  double h = hStart;
  for (int k = 0; k <= halvings; ++k, h *= 0.5) {
    const double stepsReal = t / h;
    const long steps = std::lround(stepsReal);
    if (steps < 1 || std::abs(stepsReal - static_cast<double>(steps)) > 1e-9 * stepsReal)
      throw std::invalid_argument("prabhakarScalingLimit: t/h must land on integers");
    const double lam = lambda0 * std::pow(h, mu);
    if (lam >= 1.0)
      throw std::invalid_argument("prabhakarScalingLimit: lambda0 h^mu must stay below one");
    const double value =
        std::pow(h, nu - 1.0) *
        prabhakarKernel({mu, nu, lam}, static_cast<std::size_t>(steps)).back();
    const double deviation = std::abs(value - report.target);
    if (!report.steps.empty() && deviation >= report.steps.back().deviation)
      report.monotone = false;
    report.steps.push_back({h, value, deviation});
  }
  return report;
}

bool fractionalPoissonAdmissible(double alpha, double xi, double t) {
  const double x = xi * std::pow(t, alpha);
  return x <= 30.0 || std::pow(xi, 1.0 / alpha) * t <= 1500.0;
}

std::vector<double> fractionalPoissonStateProbs(double alpha, double xi, double t,
                                                std::size_t nMax) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("fractionalPoissonStateProbs: alpha must lie in (0, 1]");
  if (!(xi > 0.0)) throw std::invalid_argument("fractionalPoissonStateProbs: xi must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("fractionalPoissonStateProbs: t must be nonnegative");
  if (!fractionalPoissonAdmissible(alpha, xi, t))
    throw std::domain_error(
        "fractionalPoissonStateProbs: clock argument outside the series window; "
        "use Monte Carlo for larger times");

  std::vector<double> out(nMax + 1, 0.0);
  const double x = xi * std::pow(t, alpha);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }

  // Binomial weights inflate term magnitudes by at most 2^j; size the scan
  // and the precision against that envelope.
  const double ln2x = std::log(2.0 * x);
  double maxLnT = -std::numeric_limits<double>::infinity();
  long J = 0;
  for (long j = 0;; ++j) {
    const double ln = static_cast<double>(j) * ln2x - std::lgamma(alpha * j + 1.0);
    maxLnT = std::max(maxLnT, ln);
    if (j > 2 && ln < std::min(maxLnT, 0.0) - 60.0) {
      J = j;
      break;
    }
    if (j > 5'000'000)
      throw std::runtime_error("fractionalPoissonStateProbs: series scan did not terminate");
  }

  const auto prec = static_cast<mpfr_prec_t>(std::max(192.0, maxLnT * 1.4427 + 128.0));
  MpArray sj(static_cast<std::size_t>(J) + 1, prec);  // x^j / Gamma(alpha j + 1)
  {
    Mp lnx(prec), arg(prec), lg(prec), alphaM(prec);
    mpfr_set_d(lnx.get(), x, MPFR_RNDN);
    mpfr_log(lnx.get(), lnx.get(), MPFR_RNDN);
    mpfr_set_d(alphaM.get(), alpha, MPFR_RNDN);
    for (long j = 0; j <= J; ++j) {
      mpfr_mul_si(arg.get(), alphaM.get(), j, MPFR_RNDN);
      mpfr_add_ui(arg.get(), arg.get(), 1, MPFR_RNDN);
      int sgn = 0;
      mpfr_lgamma(lg.get(), &sgn, arg.get(), MPFR_RNDN);
      mpfr_mul_si(sj[static_cast<std::size_t>(j)], lnx.get(), j, MPFR_RNDN);
      mpfr_sub(sj[static_cast<std::size_t>(j)], sj[static_cast<std::size_t>(j)], lg.get(),
               MPFR_RNDN);
      mpfr_exp(sj[static_cast<std::size_t>(j)], sj[static_cast<std::size_t>(j)], MPFR_RNDN);
    }
  }

  Mp binom(prec), acc(prec), term(prec);
  for (std::size_t nIdx = 0; nIdx <= nMax; ++nIdx) {
    const long nn = static_cast<long>(nIdx);
    if (nn > J) break;  // beyond the scan everything is below the 60-nat floor
    mpfr_set_ui(binom.get(), 1, MPFR_RNDN);
    mpfr_set_zero(acc.get(), 1);
    bool negative = false;
    for (long j = nn; j <= J; ++j) {
      mpfr_mul(term.get(), binom.get(), sj[static_cast<std::size_t>(j)], MPFR_RNDN);
      if (negative)
        mpfr_sub(acc.get(), acc.get(), term.get(), MPFR_RNDN);
      else
        mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
      negative = !negative;
      mpfr_mul_si(binom.get(), binom.get(), j + 1, MPFR_RNDN);
      mpfr_div_si(binom.get(), binom.get(), j + 1 - nn, MPFR_RNDN);
    }
    double p = mpfr_get_d(acc.get(), MPFR_RNDN);
    if (p < 0.0) {
      if (p < -1e-12)
        throw std::runtime_error("fractionalPoissonStateProbs: summation precision fault");
      p = 0.0;
    }
    out[nIdx] = p;
  }
  return out;
}

}  // namespace srw::specfun
