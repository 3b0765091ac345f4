#include "srw/renewal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace srw::renewal {

namespace {

constexpr std::size_t kTableCap = 1u << 20;

double kahanSum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

struct WaitingTimeModel::SamplingTable {
  std::vector<double> cdf;  // cdf[t] = P(tau <= t), index 0..len
  double truncatedMass = 0.0;
  mutable std::atomic<std::uint64_t> truncatedDraws{0};
};

WaitingTimeModel WaitingTimeModel::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("geometric: p must lie in (0, 1]");
  WaitingTimeModel m;
  m.kind_ = Kind::Geometric;
  m.p_ = p;
  return m;
}

WaitingTimeModel WaitingTimeModel::sibuya(double mu) {
  if (!(mu > 0.0 && mu < 1.0))
    throw std::invalid_argument("sibuya: mu must lie in (0, 1)");
  WaitingTimeModel m;
  m.kind_ = Kind::Sibuya;
  m.mu_ = mu;
  return m;
}

WaitingTimeModel WaitingTimeModel::fractionalBernoulli(double mu, double lambda) {
  if (!(mu > 0.0 && mu <= 1.0))
    throw std::invalid_argument("fractionalBernoulli: mu must lie in (0, 1]");
  if (!(lambda > 0.0))
    throw std::invalid_argument("fractionalBernoulli: lambda must be positive");
  WaitingTimeModel m;
  m.kind_ = Kind::FractionalBernoulli;
  m.mu_ = mu;
  m.lambda_ = lambda;
  return m;
}

WaitingTimeModel WaitingTimeModel::broadPowerTail(double lambda, std::size_t support) {
  if (!(lambda > 1.0))
    throw std::invalid_argument("broadPowerTail: lambda must exceed one");
  if (support < 2 || support > 100'000'000)
    throw std::invalid_argument("broadPowerTail: unreasonable support");
  WaitingTimeModel m;
  m.kind_ = Kind::BroadPowerTail;
  m.lambda_ = lambda;
  m.support_ = support;
  double sum = 0.0, comp = 0.0;
  for (std::size_t t = 1; t <= support; ++t) {
    const double x = std::exp(-(lambda + 1.0) * std::log(static_cast<double>(t)));
    const double y = x - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  m.norm_ = 1.0 / sum;
  return m;
}

WaitingTimeModel WaitingTimeModel::custom(std::vector<double> pdf) {
  if (pdf.size() < 2 || pdf[0] != 0.0)
    throw std::invalid_argument("custom: need psi_0 = 0 and at least one positive-time entry");
  for (double x : pdf)
    if (!(x >= 0.0)) throw std::invalid_argument("custom: negative probability entry");
  const double sum = kahanSum(pdf);
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("custom: probabilities must sum to one");
  for (double& x : pdf) x /= sum;
  WaitingTimeModel m;
  m.kind_ = Kind::Custom;
  m.support_ = pdf.size() - 1;
  m.customPdf_ = std::make_shared<std::vector<double>>(std::move(pdf));
  return m;
}

WaitingTimeModel WaitingTimeModel::customFromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("customFromFile: cannot open " + path);
  std::vector<std::pair<std::size_t, double>> entries;
  std::string line;
  std::size_t maxT = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long long t = 0;
    double psi = 0.0;
    if (!(ls >> t >> psi))
      throw std::runtime_error("customFromFile: malformed line: " + line);
    if (t < 1) throw std::runtime_error("customFromFile: waiting times start at t = 1");
    entries.emplace_back(static_cast<std::size_t>(t), psi);
    maxT = std::max(maxT, static_cast<std::size_t>(t));
  }
  if (entries.empty()) throw std::runtime_error("customFromFile: no entries in " + path);
  std::vector<double> pdf(maxT + 1, 0.0);
  for (const auto& [t, psi] : entries) pdf[t] = psi;
  return custom(std::move(pdf));
}

std::string WaitingTimeModel::describe() const {
  std::ostringstream os;
  os.precision(10);
  switch (kind_) {
    case Kind::Geometric:
      os << "geometric(p=" << p_ << ")";
      break;
    case Kind::Sibuya:
      os << "sibuya(mu=" << mu_ << ")";
      break;
    case Kind::FractionalBernoulli:
      os << "fracbernoulli(mu=" << mu_ << ",lambda=" << lambda_ << ")";
      break;
    case Kind::BroadPowerTail:
      os << "broadpowertail(lambda=" << lambda_ << ",support=" << support_ << ")";
      break;
    case Kind::Custom:
      os << "custom(support=" << support_ << ")";
      break;
  }
  return os.str();
}

const std::vector<double>& WaitingTimeModel::fracBernoulliTable(std::size_t tMax) const {
  if (!fracBernoulliPdf_ || fracBernoulliPdf_->size() <= tMax) {
    const std::size_t order = std::max<std::size_t>(tMax, 16);
    series::RealSeries num(order);
    if (order >= 1) num.raw()[1] = 1.0;  // numerator u
    auto den = series::fracPowerOneMinusU(mu_, order);
    for (double& c : den.raw()) c *= lambda_;
    den.raw()[0] += 1.0;
    fracBernoulliPdf_ =
        std::make_shared<std::vector<double>>(series::div(num, den).coeffs());
  }
  return *fracBernoulliPdf_;
}

std::vector<double> WaitingTimeModel::pdfTable(std::size_t tMax) const {
  std::vector<double> psi(tMax + 1, 0.0);
  switch (kind_) {
    case Kind::Geometric: {
      double w = p_;
      for (std::size_t t = 1; t <= tMax; ++t) {
        psi[t] = w;
        w *= 1.0 - p_;
      }
      break;
    }
    case Kind::Sibuya: {
      double surv = 1.0;  // S_{t-1}
      for (std::size_t t = 1; t <= tMax; ++t) {
        const double h = mu_ / static_cast<double>(t);
        psi[t] = surv * h;
        surv *= 1.0 - h;
      }
      break;
    }
    case Kind::FractionalBernoulli: {
      const auto& tab = fracBernoulliTable(tMax);
      std::copy(tab.begin(), tab.begin() + static_cast<std::ptrdiff_t>(tMax + 1), psi.begin());
      break;
    }
    case Kind::BroadPowerTail: {
      const std::size_t top = std::min(tMax, support_);
      for (std::size_t t = 1; t <= top; ++t)
        psi[t] = norm_ * std::exp(-(lambda_ + 1.0) * std::log(static_cast<double>(t)));
      break;
    }
    case Kind::Custom: {
      const std::size_t top = std::min(tMax, support_);
      std::copy(customPdf_->begin(), customPdf_->begin() + static_cast<std::ptrdiff_t>(top + 1),
                psi.begin());
      break;
    }
  }
  return psi;
}

std::vector<double> WaitingTimeModel::survivalTable(std::size_t tMax) const {
  std::vector<double> s(tMax + 1, 0.0);
  s[0] = 1.0;
  switch (kind_) {
    case Kind::Geometric: {
      double w = 1.0;
      for (std::size_t t = 1; t <= tMax; ++t) {
        w *= 1.0 - p_;
        s[t] = w;
      }
      break;
    }
    case Kind::Sibuya: {
      double w = 1.0;
      for (std::size_t t = 1; t <= tMax; ++t) {
        w *= 1.0 - mu_ / static_cast<double>(t);
        s[t] = w;
      }
      break;
    }
    default: {
      const auto psi = pdfTable(tMax);
      double acc = 1.0, comp = 0.0;  // Neumaier running 1 - cdf
      for (std::size_t t = 1; t <= tMax; ++t) {
        const double y = -psi[t] - comp;
        const double next = acc + y;
        comp = (next - acc) - y;
        acc = next;
        s[t] = std::max(0.0, acc);
      }
      break;
    }
  }
  return s;
}

series::RealSeries WaitingTimeModel::gfSeries(std::size_t order) const {
  return series::RealSeries(pdfTable(order));
}

double WaitingTimeModel::oneMinusGfAt(double s) const {
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("oneMinusGfAt: s must lie in (0, 1]");
  switch (kind_) {
    case Kind::Geometric:
      return s / (p_ + (1.0 - p_) * s);
    case Kind::Sibuya:
      return std::pow(s, mu_);
    case Kind::FractionalBernoulli: {
      const double g = lambda_ * std::pow(s, mu_);
      return (g + s) / (g + 1.0);
    }
    default: {
      // 1 - psiBar(u) = (1-u) * sum_t S_t u^t; truncation decays like u^T
      const auto surv = survivalTable(support_);
      const double u = 1.0 - s;
      double acc = 0.0, comp = 0.0, up = 1.0;
      for (std::size_t t = 0; t <= support_; ++t) {
        const double y = surv[t] * up - comp;
        const double next = acc + y;
        comp = (next - acc) - y;
        acc = next;
        up *= u;
      }
      return s * acc;
    }
  }
}

bool WaitingTimeModel::hasFiniteMean() const {
  switch (kind_) {
    case Kind::Geometric:
    case Kind::BroadPowerTail:
    case Kind::Custom:
      return true;
    case Kind::Sibuya:
      return false;
    case Kind::FractionalBernoulli:
      return mu_ == 1.0;
  }
  return false;
}

double WaitingTimeModel::meanEstimate() const {
  switch (kind_) {
    case Kind::Geometric:
      return 1.0 / p_;
    case Kind::Sibuya:
      return std::numeric_limits<double>::infinity();
    case Kind::FractionalBernoulli:
      return mu_ == 1.0 ? 1.0 + lambda_ : std::numeric_limits<double>::infinity();
    default: {
      const auto psi = pdfTable(support_);
      double sum = 0.0, comp = 0.0;
      for (std::size_t t = 1; t <= support_; ++t) {
        const double y = static_cast<double>(t) * psi[t] - comp;
        const double next = sum + y;
        comp = (next - sum) - y;
        sum = next;
      }
      return sum;
    }
  }
}

void WaitingTimeModel::prepareSampling(std::size_t bound) const {
  if (kind_ == Kind::Geometric || kind_ == Kind::Sibuya) return;  // direct samplers
  const std::size_t want = std::min(std::max<std::size_t>(bound, 16),
                                    std::min(kTableCap, support_ ? support_ : kTableCap));
  if (sampling_ && sampling_->cdf.size() > want) return;
  auto table = std::make_shared<SamplingTable>();
  const auto psi = pdfTable(want);
  table->cdf.assign(want + 1, 0.0);
  double acc = 0.0, comp = 0.0;
  for (std::size_t t = 1; t <= want; ++t) {
    const double y = psi[t] - comp;
    const double next = acc + y;
    comp = (next - acc) - y;
    acc = next;
    table->cdf[t] = std::min(1.0, acc);
  }
  table->truncatedMass = std::max(0.0, 1.0 - table->cdf[want]);
  sampling_ = std::move(table);
}

std::size_t WaitingTimeModel::sampleWaitingTime(rng::Stream& stream, std::size_t bound) const {
  if (bound == 0) return 1;  // every waiting time exceeds zero
  switch (kind_) {
    case Kind::Geometric: {
      if (p_ == 1.0) return 1;
      const double u = stream.uniform();
      const double d = 1.0 + std::floor(std::log(u) / std::log(1.0 - p_));
      if (!(d <= static_cast<double>(bound))) return bound + 1;
      return static_cast<std::size_t>(d);
    }
    case Kind::Sibuya: {
      for (std::size_t t = 1; t <= bound; ++t)
        if (stream.uniform() < mu_ / static_cast<double>(t)) return t;
      return bound + 1;
    }
    default: {
      if (!sampling_ || sampling_->cdf.size() <= std::min(bound, kTableCap) / 2)
        prepareSampling(bound);
      const auto& tab = *sampling_;
      const std::size_t top = tab.cdf.size() - 1;
      const double u = stream.uniform();
      if (u > tab.cdf[top]) {
        if (top < bound) tab.truncatedDraws.fetch_add(1, std::memory_order_relaxed);
        return bound + 1;
      }
      const auto it = std::lower_bound(tab.cdf.begin() + 1, tab.cdf.end(), u);
      const auto t = static_cast<std::size_t>(std::distance(tab.cdf.begin(), it));
      return t > bound ? bound + 1 : t;
    }
  }
}

double WaitingTimeModel::truncatedSamplingMass() const {
  return sampling_ ? sampling_->truncatedMass : 0.0;
}

std::uint64_t WaitingTimeModel::truncatedDraws() const {
  return sampling_ ? sampling_->truncatedDraws.load(std::memory_order_relaxed) : 0;
}

std::vector<double> stateProbabilities(const WaitingTimeModel& model, std::size_t n,
                                       std::size_t tMax) {
  const auto psiBar = model.gfSeries(tMax);
  series::RealSeries num(tMax);
  num.raw()[0] = 1.0;
  for (std::size_t t = 1; t <= tMax; ++t) num.raw()[t] = -psiBar[t];
  for (std::size_t k = 0; k < n; ++k) num = series::mul(num, psiBar);
  std::vector<double> phi(num.coeffs());
  for (std::size_t t = 1; t <= tMax; ++t) phi[t] += phi[t - 1];  // divide by (1 - u)
  return phi;
}

std::vector<double> statePolynomialAtMinusOne(const WaitingTimeModel& model, std::size_t tMax) {
  const auto psiBar = model.gfSeries(tMax);
  series::RealSeries num(tMax), den(tMax);
  num.raw()[0] = 1.0;
  den.raw()[0] = 1.0;
  for (std::size_t t = 1; t <= tMax; ++t) {
    num.raw()[t] = -psiBar[t];
    den.raw()[t] = psiBar[t] - psiBar[t - 1] - (t == 1 ? 1.0 : 0.0);
  }
  return series::div(num, den).coeffs();
}

TailConstants fitTailConstants(const WaitingTimeModel& model, double muLead, double lamSub) {
  if (!(muLead > 0.0) || !(lamSub > muLead))
    throw std::invalid_argument("fitTailConstants: need 0 < muLead < lamSub");
  const double sFine = 4e-5;
  const double sCoarse = 4.0 * sFine;
  const double fFine = model.oneMinusGfAt(sFine);
  const double fCoarse = model.oneMinusGfAt(sCoarse);
  const double aFine = fFine / std::pow(sFine, muLead);
  const double aCoarse = fCoarse / std::pow(sCoarse, muLead);
  const double r = std::pow(4.0, lamSub - muLead);
  TailConstants out;
  out.a = (r * aFine - aCoarse) / (r - 1.0);
  out.b = (out.a * std::pow(sFine, muLead) - fFine) / std::pow(sFine, lamSub);
  return out;
}

}  // namespace srw::renewal
