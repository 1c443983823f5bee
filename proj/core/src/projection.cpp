#include "dualsrc/projection.hpp"

#include <algorithm>
#include <cmath>

#include "dualsrc/errors.hpp"

namespace dualsrc {
namespace {

constexpr int kMaxBracketDoublings = 200;

// Smallest q with f(q) >= target, up to tol. f is nondecreasing and
// 1-Lipschitz, so stopping at hi - lo <= tol leaves |f(hi) - target| <= tol.
template <class Projection>
RegularOrderSolution bisect_order(Projection&& f, double target, double tol, double bracket) {
  RegularOrderSolution sol;
  const double at_zero = f(0.0);
  sol.evaluations = 1;
  if (at_zero > target + tol) {
    sol.attainable = false;
    sol.projected = at_zero;
    return sol;
  }
  if (at_zero >= target - tol) {
    sol.projected = at_zero;
    return sol;
  }
  double lo = 0.0;
  double hi = std::max(bracket, tol);
  double f_hi = f(hi);
  ++sol.evaluations;
  for (int k = 0; f_hi < target && k < kMaxBracketDoublings; ++k) {
    lo = hi;
    hi *= 2.0;
    f_hi = f(hi);
    ++sol.evaluations;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    ++sol.evaluations;
    if (f_mid < target) {
      lo = mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  sol.order = hi;
  sol.projected = f_hi;
  return sol;
}

void check_lead(const RegularDecisionState& rds, int l) {
  if (l < 1) throw ValidationError("lead time difference must be at least 1");
  if (rds.lead_time_difference() != l)
    throw ValidationError("regular decision state must carry l - 1 incoming orders");
}

}  // namespace

AtomDistribution lindley_step(const AtomDistribution& dist, double offset, const DemandModel& demand) {
  if (!(offset >= 0.0)) throw ValidationError("lindley_step offset must be nonnegative");
  std::vector<Atom> out;
  out.reserve(dist.size() * demand.pmf().size() + 1);
  double at_zero = 0.0;
  const auto pmf = demand.pmf();
  for (const Atom& a : dist.atoms()) {
    for (std::size_t j = 0; j < pmf.size(); ++j) {
      const double v = a.value + offset - (demand.support_min() + static_cast<double>(j));
      const double m = a.mass * pmf[j];
      if (v > 0.0) {
        out.push_back({v, m});
      } else {
        at_zero += m;
      }
    }
  }
  if (at_zero > 0.0) out.push_back({0.0, at_zero});
  return AtomDistribution::from_atoms(std::move(out), dist.merge_tol(),
                                      dist.tail_epsilon() + demand.tail_epsilon());
}

double project_overshoot(const RegularDecisionState& rds, double q_r, const DemandModel& demand,
                         int l) {
  check_lead(rds, l);
  if (!(q_r >= 0.0)) throw ValidationError("regular order must be nonnegative");
  AtomDistribution z = AtomDistribution::point_mass(rds.overshoot);
  for (double a : rds.incoming) z = lindley_step(z, a, demand);
  return lindley_step(z, q_r, demand).mean();
}

double default_order_tolerance(double target) { return 1e-6 * (1.0 + std::abs(target)); }

RegularOrderSolution solve_regular_order(const RegularDecisionState& rds, double target,
                                         const DemandModel& demand, int l,
                                         std::optional<double> tol) {
  check_lead(rds, l);
  if (!(target >= 0.0)) throw ValidationError("projected overshoot level must be nonnegative");
  const double t = tol.value_or(default_order_tolerance(target));
  // Everything but the last step is independent of q_r.
  AtomDistribution z = AtomDistribution::point_mass(rds.overshoot);
  for (double a : rds.incoming) z = lindley_step(z, a, demand);
  auto f = [&](double q) { return lindley_step(z, q, demand).mean(); };
  return bisect_order(f, target, t, std::max(target, demand.mean()));
}

// ---------------------------------------------------------------------------
// OvershootProjector

OvershootProjector::OvershootProjector(const DemandModel& demand, ProjectorOptions options)
    : options_(options), mean_demand_(demand.mean()) {
  width_ = options_.lattice_width;
  if (width_ <= 0) {
    const double sd = std::sqrt(demand.pmf_variance());
    width_ = std::max(1, static_cast<int>(std::floor(sd / options_.auto_width_divisor)));
  }
  const auto pmf = demand.pmf();
  if (width_ == 1) {
    base_ = demand.support_min();
    kernel_.assign(pmf.begin(), pmf.end());
  } else {
    // Mean-preserving split of each integer demand onto the two
    // neighbouring multiples of the lattice width.
    const int g_min = demand.support_min() / width_;
    const int g_max = demand.support_max() / width_ + 1;
    kernel_.assign(static_cast<std::size_t>(g_max - g_min + 1), 0.0);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      const int d = demand.support_min() + static_cast<int>(i);
      const int g = d / width_;
      const double frac = static_cast<double>(d - g * width_) / width_;
      kernel_[g - g_min] += (1.0 - frac) * pmf[i];
      kernel_[g - g_min + 1] += frac * pmf[i];
    }
    while (kernel_.size() > 1 && kernel_.back() == 0.0) kernel_.pop_back();
    base_ = static_cast<double>(g_min) * width_;
  }
  kernel_prefix_.assign(kernel_.size() + 1, 0.0);
  kernel_value_prefix_.assign(kernel_.size() + 1, 0.0);
  for (std::size_t j = 0; j < kernel_.size(); ++j) {
    kernel_prefix_[j + 1] = kernel_prefix_[j] + kernel_[j];
    kernel_value_prefix_[j + 1] =
        kernel_value_prefix_[j] + (base_ + static_cast<double>(j) * width_) * kernel_[j];
  }
  kernel_total_ = kernel_prefix_.back();
}

void OvershootProjector::lindley(double offset) {
  const double w = width_;
  const double tol = options_.merge_tol;
  const int m = static_cast<int>(kernel_.size());
  scratch_.clear();
  double zero = 0.0;

  for (const LatticeClass& c : classes_) {
    const int n = static_cast<int>(c.mass.size());
    // Outcome (i, j) sits at gamma + (i - j) w.
    const double gamma = c.anchor + offset - base_;
    const int t0 = static_cast<int>(std::floor((tol - gamma) / w)) + 1;
    if (t0 > n - 1) {
      double s = 0.0;
      for (double x : c.mass) s += x;
      zero += s * kernel_total_;
      continue;
    }
    const int t_start = std::max(t0, -(m - 1));
    const int len = n - t_start;
    LatticeClass out;
    out.anchor = gamma + t_start * w;
    out.mass.assign(static_cast<std::size_t>(len), 0.0);
    for (int t = t_start; t < n; ++t) {
      const int j_lo = std::max(0, -t);
      const int j_hi = std::min(m - 1, n - 1 - t);
      const double* mu = c.mass.data() + t;
      double acc0 = 0.0, acc1 = 0.0;
      int j = j_lo;
      for (; j + 1 <= j_hi; j += 2) {
        acc0 += mu[j] * kernel_[j];
        acc1 += mu[j + 1] * kernel_[j + 1];
      }
      if (j <= j_hi) acc0 += mu[j] * kernel_[j];
      out.mass[t - t_start] = acc0 + acc1;
    }
    // Mass of atom i lands at or below zero when j > i - t0.
    for (int i = 0; i < n; ++i) {
      const int keep = std::clamp(i - t0 + 1, 0, m);
      zero += c.mass[i] * (kernel_total_ - kernel_prefix_[keep]);
    }
    scratch_.push_back(std::move(out));
  }
  if (zero > 0.0) scratch_.push_back({0.0, {zero}});
  classes_.swap(scratch_);
  merge_classes();
}

void OvershootProjector::merge_classes() {
  const double w = width_;
  const double tol = options_.merge_tol;
  auto phase = [w](double anchor) {
    double p = std::fmod(anchor, w);
    if (p < 0.0) p += w;
    return p;
  };
  // Trim negligible tails before merging so merged ranges stay tight.
  const double half = 0.5 * options_.prune_epsilon;
  for (LatticeClass& c : classes_) {
    std::size_t lo = 0;
    double cut = 0.0;
    while (lo + 1 < c.mass.size() && cut + c.mass[lo] <= half) cut += c.mass[lo++];
    std::size_t hi = c.mass.size();
    cut = 0.0;
    while (hi > lo + 1 && cut + c.mass[hi - 1] <= half) cut += c.mass[--hi];
    if (lo > 0 || hi < c.mass.size()) {
      c.mass.erase(c.mass.begin() + static_cast<std::ptrdiff_t>(hi), c.mass.end());
      c.mass.erase(c.mass.begin(), c.mass.begin() + static_cast<std::ptrdiff_t>(lo));
      c.anchor += static_cast<double>(lo) * w;
    }
  }
  if (classes_.size() < 2) return;
  std::sort(classes_.begin(), classes_.end(), [&](const LatticeClass& a, const LatticeClass& b) {
    return phase(a.anchor) < phase(b.anchor);
  });
  std::vector<LatticeClass> merged;
  merged.reserve(classes_.size());
  for (LatticeClass& c : classes_) {
    bool joined = false;
    if (!merged.empty()) {
      LatticeClass& prev = merged.back();
      const double dp = std::abs(phase(c.anchor) - phase(prev.anchor));
      if (dp <= tol || dp >= w - tol) {
        const double new_anchor = std::min(prev.anchor, c.anchor);
        const long off_prev = std::lround((prev.anchor - new_anchor) / w);
        const long off_c = std::lround((c.anchor - new_anchor) / w);
        const long len = std::max(off_prev + static_cast<long>(prev.mass.size()),
                                  off_c + static_cast<long>(c.mass.size()));
        std::vector<double> mass(static_cast<std::size_t>(len), 0.0);
        for (std::size_t i = 0; i < prev.mass.size(); ++i) mass[off_prev + i] += prev.mass[i];
        for (std::size_t i = 0; i < c.mass.size(); ++i) mass[off_c + i] += c.mass[i];
        prev.anchor = new_anchor;
        prev.mass = std::move(mass);
        joined = true;
      }
    }
    if (!joined) merged.push_back(std::move(c));
  }
  // Phase 0 and phase w - tol can sit at opposite ends after sorting.
  if (merged.size() >= 2) {
    const double dp = std::abs(phase(merged.front().anchor) - phase(merged.back().anchor));
    if (dp <= tol || dp >= w - tol) {
      LatticeClass last = std::move(merged.back());
      merged.pop_back();
      LatticeClass& first = merged.front();
      const double new_anchor = std::min(first.anchor, last.anchor);
      const long off_a = std::lround((first.anchor - new_anchor) / w);
      const long off_b = std::lround((last.anchor - new_anchor) / w);
      const long len = std::max(off_a + static_cast<long>(first.mass.size()),
                                off_b + static_cast<long>(last.mass.size()));
      std::vector<double> mass(static_cast<std::size_t>(len), 0.0);
      for (std::size_t i = 0; i < first.mass.size(); ++i) mass[off_a + i] += first.mass[i];
      for (std::size_t i = 0; i < last.mass.size(); ++i) mass[off_b + i] += last.mass[i];
      first.anchor = new_anchor;
      first.mass = std::move(mass);
    }
  }
  classes_.swap(merged);
}

void OvershootProjector::propagate(const RegularDecisionState& rds) {
  classes_.clear();
  if (!(rds.overshoot >= 0.0)) throw ValidationError("overshoot must be nonnegative");
  if (options_.snap_offsets) {
    classes_.push_back({0.0, {1.0}});
    split_offset(rds.overshoot);
  } else {
    classes_.push_back({rds.overshoot, {1.0}});
  }
  for (double a : rds.incoming) {
    if (!(a >= 0.0)) throw ValidationError("incoming regular orders must be nonnegative");
    if (options_.snap_offsets) {
      split_offset(a);
      lindley(0.0);
    } else {
      lindley(a);
    }
  }
}

// Shifts the single phase-0 class by `offset`, splitting each atom between
// the two lattice points around its new position.
void OvershootProjector::split_offset(double offset) {
  const double w = width_;
  LatticeClass& c = classes_.front();
  const double steps = std::floor(offset / w);
  const double frac = offset / w - steps;
  c.anchor += steps * w;
  if (frac <= options_.merge_tol / w) return;
  c.mass.push_back(0.0);
  for (std::size_t i = c.mass.size() - 1; i > 0; --i)
    c.mass[i] = (1.0 - frac) * c.mass[i] + frac * c.mass[i - 1];
  c.mass[0] *= 1.0 - frac;
}

double OvershootProjector::expected_positive_part(double shift, double* left_slope) const {
  const double w = width_;
  const int m = static_cast<int>(kernel_.size());
  double total = 0.0;
  double slope = 0.0;
  for (const LatticeClass& c : classes_) {
    const double x0 = c.anchor + shift;
    // Kernel points strictly below x0. A point equal to x contributes
    // nothing to the value and is excluded from the left derivative.
    const int j0 = static_cast<int>(std::ceil((x0 - base_) / w - 1e-12));
    const int n = static_cast<int>(c.mass.size());
    double acc = 0.0;
    double der = 0.0;
    for (int i = 0; i < n; ++i) {
      const int J = std::clamp(j0 + i, 0, m);
      if (J == 0) continue;
      const double x = x0 + i * w;
      acc += c.mass[i] * (x * kernel_prefix_[J] - kernel_value_prefix_[J]);
      der += c.mass[i] * kernel_prefix_[J];
    }
    total += acc;
    slope += der;
  }
  if (left_slope) *left_slope = slope;
  return total;
}

double OvershootProjector::project(const RegularDecisionState& rds, double q_r) {
  if (!(q_r >= 0.0)) throw ValidationError("regular order must be nonnegative");
  propagate(rds);
  return expected_positive_part(q_r);
}

RegularOrderSolution OvershootProjector::solve(const RegularDecisionState& rds, double target,
                                               std::optional<double> tol) {
  if (!(target >= 0.0)) throw ValidationError("projected overshoot level must be nonnegative");
  propagate(rds);
  const double t = tol.value_or(default_order_tolerance(target));
  RegularOrderSolution sol;
  const double at_zero = expected_positive_part(0.0);
  sol.evaluations = 1;
  sol.projected = at_zero;
  if (at_zero > target + t) {
    sol.attainable = false;
    return sol;
  }
  if (at_zero >= target - t) return sol;

  double lo = 0.0;
  double hi = std::max(std::max(target, mean_demand_), t);
  double slope = 0.0;
  double f_hi = expected_positive_part(hi, &slope);
  ++sol.evaluations;
  for (int k = 0; f_hi < target && k < 200; ++k) {
    lo = hi;
    hi *= 2.0;
    f_hi = expected_positive_part(hi, &slope);
    ++sol.evaluations;
  }
  // Newton from above: every iterate stays >= the root.
  for (int k = 0; k < 100 && f_hi - target > t; ++k) {
    double next = slope > 0.0 ? hi - (f_hi - target) / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    double s = 0.0;
    const double f_next = expected_positive_part(next, &s);
    ++sol.evaluations;
    if (f_next < target) {
      lo = next;  // only reachable through rounding or the midpoint fallback
    } else {
      hi = next;
      f_hi = f_next;
      slope = s;
    }
    if (hi - lo <= t) break;
  }
  sol.order = hi;
  sol.projected = f_hi;
  return sol;
}

AtomDistribution OvershootProjector::distribution(const RegularDecisionState& rds, double q_r) {
  propagate(rds);
  lindley(q_r);
  std::vector<Atom> atoms;
  for (const LatticeClass& c : classes_)
    for (std::size_t i = 0; i < c.mass.size(); ++i)
      atoms.push_back({c.anchor + static_cast<double>(i) * width_, c.mass[i]});
  return AtomDistribution::from_atoms(std::move(atoms), options_.merge_tol);
}

}  // namespace dualsrc
