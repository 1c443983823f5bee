#include "dualsrc/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualsrc/errors.hpp"

namespace dualsrc {

AtomDistribution AtomDistribution::point_mass(double value) {
  AtomDistribution d;
  d.atoms_.push_back({value, 1.0});
  return d;
}

AtomDistribution AtomDistribution::from_atoms(std::vector<Atom> atoms, double merge_tol,
                                              double tail_epsilon) {
  if (merge_tol < 0.0) throw ValidationError("merge_tol must be nonnegative");
  std::erase_if(atoms, [](const Atom& a) { return !(a.mass > 0.0); });
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });

  AtomDistribution d;
  d.merge_tol_ = merge_tol;
  d.tail_epsilon_ = tail_epsilon;
  d.atoms_.reserve(atoms.size());
  // Each cluster is anchored at its first value so a chain of close atoms
  // cannot drift arbitrarily far.
  double anchor = 0.0;
  double weighted = 0.0;
  bool uniform = true;  // keeps exact duplicates exact
  for (const Atom& a : atoms) {
    if (!d.atoms_.empty() && a.value - anchor <= merge_tol) {
      Atom& cur = d.atoms_.back();
      cur.mass += a.mass;
      weighted += a.value * a.mass;
      uniform = uniform && a.value == anchor;
      cur.value = uniform ? anchor : weighted / cur.mass;
    } else {
      d.atoms_.push_back(a);
      anchor = a.value;
      weighted = a.value * a.mass;
      uniform = true;
    }
  }
  return d;
}

AtomDistribution AtomDistribution::from_samples(std::span<const double> samples,
                                                double merge_tol) {
  if (samples.empty()) return {};
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double w = 1.0 / static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  for (double v : sorted) {
    if (!atoms.empty() && atoms.back().value == v) {
      atoms.back().mass += w;
    } else {
      atoms.push_back({v, w});
    }
  }
  return from_atoms(std::move(atoms), merge_tol);
}

double AtomDistribution::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.mass;
  return s;
}

double AtomDistribution::mean() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.value * a.mass;
  return s;
}

double AtomDistribution::variance() const {
  const double m = mean();
  double s = 0.0;
  for (const Atom& a : atoms_) s += (a.value - m) * (a.value - m) * a.mass;
  return s;
}

double AtomDistribution::min_value() const {
  return atoms_.empty() ? std::numeric_limits<double>::quiet_NaN() : atoms_.front().value;
}

double AtomDistribution::max_value() const {
  return atoms_.empty() ? std::numeric_limits<double>::quiet_NaN() : atoms_.back().value;
}

double AtomDistribution::cdf(double x) const {
  double s = 0.0;
  for (const Atom& a : atoms_) {
    if (a.value > x) break;
    s += a.mass;
  }
  return s;
}

double AtomDistribution::mass_at(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x - merge_tol_,
                             [](const Atom& a, double v) { return a.value < v; });
  double s = 0.0;
  for (; it != atoms_.end() && it->value <= x + merge_tol_; ++it) s += it->mass;
  return s;
}

AtomDistribution AtomDistribution::convolve(const AtomDistribution& other) const {
  std::vector<Atom> out;
  out.reserve(atoms_.size() * other.atoms_.size());
  for (const Atom& a : atoms_)
    for (const Atom& b : other.atoms_) out.push_back({a.value + b.value, a.mass * b.mass});
  return from_atoms(std::move(out), std::max(merge_tol_, other.merge_tol_),
                    tail_epsilon_ + other.tail_epsilon_);
}

bool AtomDistribution::approx_equal(const AtomDistribution& other, double value_tol,
                                    double mass_tol) const {
  if (atoms_.size() != other.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (std::abs(atoms_[i].value - other.atoms_[i].value) > value_tol) return false;
    if (std::abs(atoms_[i].mass - other.atoms_[i].mass) > mass_tol) return false;
  }
  return true;
}

}  // namespace dualsrc
