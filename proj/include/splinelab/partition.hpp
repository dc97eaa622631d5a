#ifndef SPLINELAB_PARTITION_HPP
#define SPLINELAB_PARTITION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "splinelab/measure.hpp"

namespace splinelab {

/// A finite partition of [0,1] into intervals of positive length. Atoms are
/// [b_i, b_{i+1}) except the last one, which is closed.
class IntervalPartition {
public:
  IntervalPartition() : breakpoints_{0.0, 1.0} {}

  explicit IntervalPartition(std::vector<double> breakpoints) : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2) throw std::invalid_argument("partition needs at least one atom");
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
      throw std::invalid_argument("partition must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
      if (!(breakpoints_[i] < breakpoints_[i + 1]))
        throw std::invalid_argument("partition breakpoints must be strictly increasing");
  }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  std::size_t atom_count() const { return breakpoints_.size() - 1; }
  std::pair<double, double> atom(std::size_t i) const { return {breakpoints_[i], breakpoints_[i + 1]}; }
  double atom_length(std::size_t i) const { return breakpoints_[i + 1] - breakpoints_[i]; }

  /// Index of the atom containing x.
  std::size_t locate(double x) const {
    if (x < 0.0 || x > 1.0) throw std::out_of_range("point outside [0,1]");
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, atom_count() - 1);
  }

  /// True if every breakpoint of `coarse` is a breakpoint of *this.
  bool refines(const IntervalPartition& coarse) const {
    return std::includes(breakpoints_.begin(), breakpoints_.end(), coarse.breakpoints_.begin(),
                         coarse.breakpoints_.end());
  }

  bool operator==(const IntervalPartition&) const = default;

  nlohmann::json to_json() const { return {{"breakpoints", breakpoints_}}; }
  static IntervalPartition from_json(const nlohmann::json& j) {
    return IntervalPartition(j.at("breakpoints").get<std::vector<double>>());
  }

private:
  std::vector<double> breakpoints_;
};

/// Nondecreasing knots t_0..t_n for splines of order k: 0 and 1 repeated k
/// times, interior breakpoints once.
class KnotSequence {
public:
  KnotSequence(int order, std::vector<double> knots) : order_(order), knots_(std::move(knots)) {
    if (order_ < 1) throw std::invalid_argument("spline order must be >= 1");
    if (knots_.size() < static_cast<std::size_t>(2 * order_))
      throw std::invalid_argument("knot sequence too short for its order");
    int run = 1;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (knots_[i] < knots_[i - 1]) throw std::invalid_argument("knots must be nondecreasing");
      run = knots_[i] == knots_[i - 1] ? run + 1 : 1;
      if (run > order_) throw std::invalid_argument("knot multiplicity exceeds the order");
    }
  }

  int order() const { return order_; }
  const std::vector<double>& knots() const { return knots_; }
  double operator[](std::size_t i) const { return knots_[i]; }
  /// Largest knot index n.
  std::size_t last_index() const { return knots_.size() - 1; }
  /// Number of B-splines, n - k + 1.
  std::size_t basis_count() const { return knots_.size() - static_cast<std::size_t>(order_); }

  std::vector<double> distinct() const {
    std::vector<double> d(knots_);
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
  }

private:
  int order_;
  std::vector<double> knots_;
};

inline IntervalPartition uniform_partition(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_partition: n must be >= 1");
  std::vector<double> b(n + 1);
  for (std::size_t i = 0; i <= n; ++i) b[i] = static_cast<double>(i) / static_cast<double>(n);
  b.back() = 1.0;
  return IntervalPartition(std::move(b));
}

/// Uniform double in [0,1) from the top 53 bits; stable across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exponential raw atom lengths, clipped from below at max/grading and then
/// normalized, so the longest/shortest ratio never exceeds `grading`.
inline IntervalPartition random_partition(std::size_t n, std::uint64_t seed, double grading) {
  if (n == 0) throw std::invalid_argument("random_partition: n must be >= 1");
  if (!(grading >= 1.0)) throw std::invalid_argument("random_partition: grading must be >= 1");
  if (grading == 1.0) return uniform_partition(n);
  std::mt19937_64 rng(seed);
  std::vector<double> len(n);
  for (auto& l : len) l = -std::log1p(-uniform01(rng));
  const double longest = *std::max_element(len.begin(), len.end());
  double total = 0.0;
  for (auto& l : len) {
    l = std::max(l, longest / grading);
    total += l;
  }
  std::vector<double> b(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i + 1] = b[i] + len[i] / total;
  b.back() = 1.0;
  return IntervalPartition(std::move(b));
}

/// |F|_mu: the largest mu-measure of an atom.
inline double mesh_norm(const IntervalPartition& p, const Measure& mu) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.atom_count(); ++i) {
    auto [a, b] = p.atom(i);
    m = std::max(m, mu.mass(a, b));
  }
  return m;
}

/// Refinement F of G with |F|_mu <= eps that leaves every atom of measure
/// <= eps untouched and cuts each larger atom into ceil(mu(A)/eps) pieces of
/// equal mu-mass (each of mass in [eps/2, eps]).
inline IntervalPartition refine_to_mesh(const IntervalPartition& g, const Measure& mu, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("refine_to_mesh: eps must lie in (0,1]");
  std::vector<double> out{0.0};
  for (std::size_t i = 0; i < g.atom_count(); ++i) {
    auto [a, b] = g.atom(i);
    const double m = mu.mass(a, b);
    if (m > eps * (1.0 + 1e-12)) {
      const int pieces = static_cast<int>(std::ceil(m / eps - 1e-12));
      double left = a;
      for (int p = 1; p < pieces; ++p) {
        const double x = mu.quantile(left, b, m / pieces);
        if (!(x > left && x < b)) throw std::runtime_error("refine_to_mesh: measure has an atom");
        out.push_back(x);
        left = x;
      }
    }
    out.push_back(b);
  }
  return IntervalPartition(std::move(out));
}

inline KnotSequence knot_sequence(const IntervalPartition& p, int k) {
  if (k < 1) throw std::invalid_argument("knot_sequence: order must be >= 1");
  std::vector<double> t;
  t.reserve(p.atom_count() - 1 + 2 * static_cast<std::size_t>(k));
  t.insert(t.end(), static_cast<std::size_t>(k), 0.0);
  const auto& b = p.breakpoints();
  t.insert(t.end(), b.begin() + 1, b.end() - 1);
  t.insert(t.end(), static_cast<std::size_t>(k), 1.0);
  return KnotSequence(k, std::move(t));
}

} // namespace splinelab

#endif // SPLINELAB_PARTITION_HPP
