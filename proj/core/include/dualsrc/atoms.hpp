#pragma once

#include <span>
#include <vector>

namespace dualsrc {

struct Atom {
  double value;
  double mass;
};

/// Finite weighted point-mass distribution on the real line.
///
/// Atoms are kept sorted by value with strictly positive masses; values
/// closer than `merge_tol` are merged into one atom located at their
/// mass-weighted mean. Total mass may fall short of 1 by the truncation
/// error of whatever produced the distribution.
class AtomDistribution {
 public:
  static constexpr double kDefaultMergeTol = 1e-9;
  static constexpr double kDefaultTailEpsilon = 1e-12;

  AtomDistribution() = default;

  static AtomDistribution point_mass(double value);
  static AtomDistribution from_atoms(std::vector<Atom> atoms,
                                     double merge_tol = kDefaultMergeTol,
                                     double tail_epsilon = kDefaultTailEpsilon);
  /// Empirical law of `samples`, each weighted 1/n.
  static AtomDistribution from_samples(std::span<const double> samples,
                                       double merge_tol = kDefaultMergeTol);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double merge_tol() const { return merge_tol_; }
  double tail_epsilon() const { return tail_epsilon_; }

  double total_mass() const;
  double mean() const;
  double variance() const;
  double min_value() const;
  double max_value() const;
  /// P(X <= x), using unnormalized masses.
  double cdf(double x) const;
  double mass_at(double x) const;

  /// Law of X + Y for independent X ~ *this and Y ~ other.
  AtomDistribution convolve(const AtomDistribution& other) const;

  /// True when both have the same atoms up to `value_tol` / `mass_tol`.
  bool approx_equal(const AtomDistribution& other, double value_tol,
                    double mass_tol) const;

 private:
  std::vector<Atom> atoms_;
  double merge_tol_ = kDefaultMergeTol;
  double tail_epsilon_ = kDefaultTailEpsilon;
};

}  // namespace dualsrc
