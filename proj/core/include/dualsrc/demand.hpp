#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dualsrc/atoms.hpp"
#include "dualsrc/rng.hpp"

namespace dualsrc {

enum class DemandFamily { NegativeBinomial, Poisson, Geometric, Deterministic, Empirical };

std::string to_string(DemandFamily family);
DemandFamily demand_family_from_string(const std::string& name);

/// One-period demand on the nonnegative integers, stored as a truncated pmf.
///
/// Immutable after construction. The pmf covers [support_min, support_max];
/// at most `tail_epsilon` of probability mass is cut from the two tails
/// combined and the remainder is not renormalized.
class DemandModel {
 public:
  static constexpr double kDefaultTailEpsilon = 1e-12;

  /// Moment-matched model. `cov` is required for negative-binomial and
  /// ignored for the other parametric families.
  static DemandModel make(DemandFamily family, double mean, std::optional<double> cov,
                          double tail_epsilon = kDefaultTailEpsilon);
  /// Explicit pmf over 0..pmf.size()-1. Must sum to 1 within tail_epsilon.
  static DemandModel empirical(std::vector<double> pmf,
                               double tail_epsilon = kDefaultTailEpsilon);

  DemandFamily family() const { return family_; }
  /// Declared mean (moment-matching target).
  double mean() const { return mean_; }
  /// Declared coefficient of variation.
  double cov() const { return cov_; }
  double tail_epsilon() const { return tail_epsilon_; }

  int support_min() const { return support_min_; }
  int support_max() const { return support_min_ + static_cast<int>(pmf_.size()) - 1; }
  std::span<const double> pmf() const { return pmf_; }
  double pmf_at(int k) const;
  /// P(D <= k) from the truncated pmf.
  double cdf(int k) const;
  double total_mass() const { return cdf_.back(); }

  double pmf_mean() const;
  double pmf_variance() const;

  /// Negative-binomial shape r and success probability q (NB family only).
  double nb_shape() const { return nb_shape_; }
  double nb_success() const { return nb_success_; }

  /// Inverse-CDF draw.
  int sample(RandomStream& stream) const;

  AtomDistribution as_atoms() const;

 private:
  DemandModel() = default;
  void finalize();

  DemandFamily family_ = DemandFamily::Deterministic;
  double mean_ = 0.0;
  double cov_ = 0.0;
  double tail_epsilon_ = kDefaultTailEpsilon;
  double nb_shape_ = 0.0;
  double nb_success_ = 0.0;
  int support_min_ = 0;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// Dense pmf of the n-fold sum, offset by n * support_min. Tails are cut
/// at a combined mass of n * tail_epsilon.
struct LatticePmf {
  int offset = 0;
  std::vector<double> mass;

  int max_value() const { return offset + static_cast<int>(mass.size()) - 1; }
};

LatticePmf convolve_pmf(const DemandModel& model, int n);

/// Law of the n-period cumulative demand. n must be positive.
AtomDistribution convolve_n(const DemandModel& model, int n);

}  // namespace dualsrc
