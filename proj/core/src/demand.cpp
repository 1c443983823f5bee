#include "dualsrc/demand.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dualsrc/errors.hpp"

namespace dualsrc {
namespace {

// Tabulates log-pmf over k = 0, 1, ... and cuts each tail at half of the
// allowed truncation mass. Returns (support_min, pmf).
std::pair<int, std::vector<double>> tabulate(const std::function<double(int)>& log_pmf,
                                             double mode_hint, double tail_epsilon) {
  const double half = 0.5 * tail_epsilon;
  std::vector<double> full;
  double cum = 0.0;
  // Hard cap guards against pathological parameterizations.
  const int hard_cap = 10'000'000;
  for (int k = 0; k < hard_cap; ++k) {
    const double p = std::exp(log_pmf(k));
    full.push_back(p);
    cum += p;
    if (k > mode_hint && (1.0 - cum < half || p == 0.0)) break;
  }
  int lo = 0;
  double lower = 0.0;
  while (lo + 1 < static_cast<int>(full.size()) && lower + full[lo] < half) {
    lower += full[lo];
    ++lo;
  }
  std::vector<double> pmf(full.begin() + lo, full.end());
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  return {lo, std::move(pmf)};
}

std::pair<int, std::vector<double>> negative_binomial_table(double r, double q, double eps) {
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double lg_r = std::lgamma(r);
  auto log_pmf = [=](int k) {
    return std::lgamma(k + r) - lg_r - std::lgamma(k + 1.0) + r * log_q + k * log_1mq;
  };
  return tabulate(log_pmf, r * (1.0 - q) / q, eps);
}

std::pair<int, std::vector<double>> poisson_table(double lambda, double eps) {
  const double log_l = std::log(lambda);
  auto log_pmf = [=](int k) { return -lambda + k * log_l - std::lgamma(k + 1.0); };
  return tabulate(log_pmf, lambda, eps);
}

void trim(LatticePmf& p, double eps) {
  const double half = 0.5 * eps;
  std::size_t lo = 0;
  double cut = 0.0;
  while (lo + 1 < p.mass.size() && cut + p.mass[lo] < half) cut += p.mass[lo++];
  std::size_t hi = p.mass.size();
  cut = 0.0;
  while (hi > lo + 1 && cut + p.mass[hi - 1] < half) cut += p.mass[--hi];
  p.mass = std::vector<double>(p.mass.begin() + lo, p.mass.begin() + hi);
  p.offset += static_cast<int>(lo);
}

LatticePmf convolve_lattice(const LatticePmf& a, const LatticePmf& b) {
  LatticePmf out;
  out.offset = a.offset + b.offset;
  out.mass.assign(a.mass.size() + b.mass.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.mass.size(); ++i) {
    const double ai = a.mass[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.mass.size(); ++j) out.mass[i + j] += ai * b.mass[j];
  }
  return out;
}

}  // namespace

std::string to_string(DemandFamily family) {
  switch (family) {
    case DemandFamily::NegativeBinomial: return "negative-binomial";
    case DemandFamily::Poisson: return "poisson";
    case DemandFamily::Geometric: return "geometric";
    case DemandFamily::Deterministic: return "deterministic";
    case DemandFamily::Empirical: return "empirical";
  }
  return "unknown";
}

DemandFamily demand_family_from_string(const std::string& name) {
  if (name == "negative-binomial" || name == "nb") return DemandFamily::NegativeBinomial;
  if (name == "poisson") return DemandFamily::Poisson;
  if (name == "geometric") return DemandFamily::Geometric;
  if (name == "deterministic") return DemandFamily::Deterministic;
  if (name == "empirical") return DemandFamily::Empirical;
  throw ValidationError("unknown demand family '" + name + "'");
}

DemandModel DemandModel::make(DemandFamily family, double mean, std::optional<double> cov,
                              double tail_epsilon) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw ValidationError("demand mean must be positive");
  if (!(tail_epsilon > 0.0) || tail_epsilon >= 1.0)
    throw ValidationError("tail_epsilon must lie in (0, 1)");
  if (cov && *cov < 0.0) throw ValidationError("coefficient of variation must be nonnegative");

  DemandModel m;
  m.family_ = family;
  m.mean_ = mean;
  m.tail_epsilon_ = tail_epsilon;

  switch (family) {
    case DemandFamily::NegativeBinomial: {
      if (!cov) throw ValidationError("negative-binomial demand requires cov");
      const double var = (*cov * mean) * (*cov * mean);
      if (!(var > mean))
        throw ParameterizationError("negative-binomial needs variance > mean (cov^2 * mean > 1)");
      m.cov_ = *cov;
      m.nb_shape_ = mean * mean / (var - mean);
      m.nb_success_ = mean / var;
      std::tie(m.support_min_, m.pmf_) =
          negative_binomial_table(m.nb_shape_, m.nb_success_, tail_epsilon);
      break;
    }
    case DemandFamily::Poisson:
      m.cov_ = 1.0 / std::sqrt(mean);
      std::tie(m.support_min_, m.pmf_) = poisson_table(mean, tail_epsilon);
      break;
    case DemandFamily::Geometric: {
      // P(k) = (1 - theta)^k theta on {0, 1, ...}, i.e. NB with r = 1.
      const double theta = 1.0 / (1.0 + mean);
      m.cov_ = std::sqrt(mean * (1.0 + mean)) / mean;
      m.nb_shape_ = 1.0;
      m.nb_success_ = theta;
      std::tie(m.support_min_, m.pmf_) = negative_binomial_table(1.0, theta, tail_epsilon);
      break;
    }
    case DemandFamily::Deterministic: {
      const double rounded = std::round(mean);
      if (std::abs(rounded - mean) > 1e-9)
        throw ValidationError("deterministic demand must be integer-valued");
      m.cov_ = 0.0;
      m.support_min_ = static_cast<int>(rounded);
      m.pmf_ = {1.0};
      break;
    }
    case DemandFamily::Empirical:
      throw ValidationError("use DemandModel::empirical for an explicit pmf");
  }
  m.finalize();
  return m;
}

DemandModel DemandModel::empirical(std::vector<double> pmf, double tail_epsilon) {
  if (pmf.empty()) throw ValidationError("empirical pmf must not be empty");
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw ValidationError("empirical pmf entries must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tail_epsilon)
    throw ValidationError("empirical pmf must sum to 1 within tail_epsilon");

  DemandModel m;
  m.family_ = DemandFamily::Empirical;
  m.tail_epsilon_ = tail_epsilon;
  std::size_t lo = 0;
  while (pmf[lo] == 0.0) ++lo;
  std::size_t hi = pmf.size();
  while (pmf[hi - 1] == 0.0) --hi;
  m.support_min_ = static_cast<int>(lo);
  m.pmf_.assign(pmf.begin() + lo, pmf.begin() + hi);
  m.finalize();
  m.mean_ = m.pmf_mean();
  if (!(m.mean_ > 0.0)) throw ValidationError("empirical demand must have a positive mean");
  m.cov_ = std::sqrt(m.pmf_variance()) / m.mean_;
  return m;
}

void DemandModel::finalize() {
  cdf_.resize(pmf_.size());
  std::partial_sum(pmf_.begin(), pmf_.end(), cdf_.begin());
}

double DemandModel::pmf_at(int k) const {
  const int i = k - support_min_;
  if (i < 0 || i >= static_cast<int>(pmf_.size())) return 0.0;
  return pmf_[i];
}

double DemandModel::cdf(int k) const {
  const int i = k - support_min_;
  if (i < 0) return 0.0;
  if (i >= static_cast<int>(cdf_.size())) return cdf_.back();
  return cdf_[i];
}

double DemandModel::pmf_mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) s += (support_min_ + static_cast<double>(i)) * pmf_[i];
  return s;
}

double DemandModel::pmf_variance() const {
  const double mu = pmf_mean();
  double s = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    const double d = support_min_ + static_cast<double>(i) - mu;
    s += d * d * pmf_[i];
  }
  return s;
}

int DemandModel::sample(RandomStream& stream) const {
  const double u = stream.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return support_min_ + static_cast<int>(it - cdf_.begin());
}

AtomDistribution DemandModel::as_atoms() const {
  std::vector<Atom> atoms;
  atoms.reserve(pmf_.size());
  for (std::size_t i = 0; i < pmf_.size(); ++i)
    atoms.push_back({support_min_ + static_cast<double>(i), pmf_[i]});
  return AtomDistribution::from_atoms(std::move(atoms), AtomDistribution::kDefaultMergeTol,
                                      tail_epsilon_);
}

LatticePmf convolve_pmf(const DemandModel& model, int n) {
  if (n < 1) throw ValidationError("convolve_n requires n >= 1");
  const double eps = n * model.tail_epsilon();
  LatticePmf out;
  switch (model.family()) {
    case DemandFamily::NegativeBinomial:
    case DemandFamily::Geometric:
      // Sum of n i.i.d. NB(r, q) is NB(n r, q).
      std::tie(out.offset, out.mass) =
          negative_binomial_table(n * model.nb_shape(), model.nb_success(), eps);
      return out;
    case DemandFamily::Poisson:
      std::tie(out.offset, out.mass) = poisson_table(n * model.mean(), eps);
      return out;
    case DemandFamily::Deterministic:
      out.offset = n * model.support_min();
      out.mass = {1.0};
      return out;
    case DemandFamily::Empirical:
      break;
  }
  // Binary powering with tail trimming after every product.
  LatticePmf base{model.support_min(), {model.pmf().begin(), model.pmf().end()}};
  LatticePmf acc;
  bool have = false;
  int k = n;
  while (k > 0) {
    if (k & 1) {
      acc = have ? convolve_lattice(acc, base) : base;
      have = true;
      trim(acc, model.tail_epsilon());
    }
    k >>= 1;
    if (k > 0) {
      base = convolve_lattice(base, base);
      trim(base, model.tail_epsilon());
    }
  }
  return acc;
}

AtomDistribution convolve_n(const DemandModel& model, int n) {
  const LatticePmf p = convolve_pmf(model, n);
  std::vector<Atom> atoms;
  atoms.reserve(p.mass.size());
  for (std::size_t i = 0; i < p.mass.size(); ++i)
    atoms.push_back({p.offset + static_cast<double>(i), p.mass[i]});
  return AtomDistribution::from_atoms(std::move(atoms), AtomDistribution::kDefaultMergeTol,
                                      n * model.tail_epsilon());
}

}  // namespace dualsrc
