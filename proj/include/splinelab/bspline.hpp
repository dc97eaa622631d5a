#ifndef SPLINELAB_BSPLINE_HPP
#define SPLINELAB_BSPLINE_HPP

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "splinelab/measure.hpp"
#include "splinelab/partition.hpp"

namespace splinelab {

enum class BasisKind { classical, chebyshev, perturbed };

inline std::string to_string(BasisKind k) {
  switch (k) {
  case BasisKind::classical: return "classical";
  case BasisKind::chebyshev: return "chebyshev";
  case BasisKind::perturbed: return "perturbed";
  }
  return "?";
}

struct BasisValue {
  std::size_t index;
  double m; // L1-normalized value
  double n; // renormalized value
};

/// Evaluates the L1-normalized functions of one locally supported family.
class BasisEvaluator {
public:
  virtual ~BasisEvaluator() = default;
  /// Appends (i, M_i(x)) for every index whose support contains x, using
  /// right-continuity (left-continuity at x = 1).
  virtual void active(double x, std::vector<std::pair<std::size_t, double>>& out) const = 0;
};

/// Locates the knot interval: the largest mu with t_mu <= x < t_{mu+1}, and at
/// x = 1 the last nondegenerate interval.
inline std::size_t knot_span(const KnotSequence& t, double x) {
  const auto& kn = t.knots();
  const std::size_t k = static_cast<std::size_t>(t.order());
  const std::size_t last = t.last_index() - k; // n - k, last nondegenerate span
  if (x >= kn[last + 1]) return last;
  auto it = std::upper_bound(kn.begin(), kn.end(), x);
  std::size_t mu = static_cast<std::size_t>(it - kn.begin()) - 1;
  return std::clamp(mu, k - 1, last);
}

/// Cox-de Boor recurrence for the normalized B-splines B_i = N_i.
class ClassicalEvaluator final : public BasisEvaluator {
public:
  explicit ClassicalEvaluator(KnotSequence knots) : knots_(std::move(knots)) {}

  void active(double x, std::vector<std::pair<std::size_t, double>>& out) const override {
    const auto& t = knots_.knots();
    const int k = knots_.order();
    const std::size_t mu = knot_span(knots_, x);
    std::vector<double> b(static_cast<std::size_t>(k), 0.0), left(k + 1), right(k + 1);
    b[0] = 1.0;
    for (int j = 1; j < k; ++j) {
      left[j] = x - t[mu + 1 - j];
      right[j] = t[mu + j] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double temp = b[r] / (right[r + 1] + left[j - r]);
        b[r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      b[j] = saved;
    }
    for (int r = 0; r < k; ++r) {
      const std::size_t i = mu + 1 - k + r;
      const double len = t[i + k] - t[i];
      out.emplace_back(i, b[r] * k / len);
    }
  }

private:
  KnotSequence knots_;
};

/// A locally supported basis (M_i) with index range 0..n-k, M_i supported on
/// [t_i, t_{i+k}], and its renormalization N_i = n_scale_i * M_i.
class SplineBasis {
public:
  SplineBasis(BasisKind kind, KnotSequence knots, std::shared_ptr<const BasisEvaluator> evaluator)
      : kind_(kind), knots_(std::move(knots)), evaluator_(std::move(evaluator)) {
    const std::size_t count = knots_.basis_count();
    const int k = knots_.order();
    m_scale_.assign(count, 1.0);
    n_scale_.resize(count);
    supports_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      supports_[i] = {knots_[i], knots_[i + k]};
      n_scale_[i] = (supports_[i].second - supports_[i].first) / k;
    }
  }

  BasisKind kind() const { return kind_; }
  int order() const { return knots_.order(); }
  const KnotSequence& knots() const { return knots_; }
  std::size_t count() const { return supports_.size(); }

  /// [t_i, t_{i+k}].
  std::pair<double, double> support(std::size_t i) const { return supports_.at(i); }
  /// The union-of-atoms cover of supp M_i; the knot hull for every family
  /// implemented here.
  std::pair<double, double> f_support(std::size_t i) const { return supports_.at(i); }
  double support_length(std::size_t i) const { return supports_[i].second - supports_[i].first; }

  double m_scale(std::size_t i) const { return m_scale_[i]; }
  double n_scale(std::size_t i) const { return n_scale_[i]; }

  /// Distinct knots: the points where basis functions lose smoothness.
  std::vector<double> breakpoints() const { return knots_.distinct(); }

  std::vector<BasisValue> evaluate_all(double x) const {
    if (x < 0.0 || x > 1.0) throw std::out_of_range("evaluate_all: x outside [0,1]");
    std::vector<std::pair<std::size_t, double>> raw;
    raw.reserve(static_cast<std::size_t>(order()) + 1);
    evaluator_->active(x, raw);
    std::vector<BasisValue> out;
    out.reserve(raw.size());
    for (auto [i, v] : raw) {
      const double m = v * m_scale_[i];
      out.push_back({i, m, m * n_scale_[i]});
    }
    return out;
  }

  double M(std::size_t i, double x) const {
    for (const auto& v : evaluate_all(x))
      if (v.index == i) return v.m;
    return 0.0;
  }
  double N(std::size_t i, double x) const { return n_scale_.at(i) * M(i, x); }

  PiecewiseFunction M_function(std::size_t i) const {
    return {breakpoints(), [basis = *this, i](double x) { return basis.M(i, x); }};
  }
  PiecewiseFunction N_function(std::size_t i) const {
    return {breakpoints(), [basis = *this, i](double x) { return basis.N(i, x); }};
  }

  /// Copy with M_i multiplied by factors[i] (support bookkeeping unchanged).
  SplineBasis scaled(BasisKind kind, std::span<const double> factors) const {
    if (factors.size() != count()) throw std::invalid_argument("scaled: factor count mismatch");
    SplineBasis b = *this;
    b.kind_ = kind;
    for (std::size_t i = 0; i < count(); ++i) b.m_scale_[i] *= factors[i];
    return b;
  }

  /// Copy whose renormalization is N_i = (mu(supp_F M_i)/k) M_i.
  SplineBasis renormalized(const Measure& mu) const {
    SplineBasis b = *this;
    for (std::size_t i = 0; i < count(); ++i) {
      auto [a, c] = f_support(i);
      b.n_scale_[i] = mu.mass(a, c) / order();
    }
    return b;
  }

private:
  BasisKind kind_;
  KnotSequence knots_;
  std::shared_ptr<const BasisEvaluator> evaluator_;
  std::vector<double> m_scale_;
  std::vector<double> n_scale_;
  std::vector<std::pair<double, double>> supports_;
};

inline SplineBasis build_classical_basis(const KnotSequence& knots) {
  return SplineBasis(BasisKind::classical, knots, std::make_shared<ClassicalEvaluator>(knots));
}

inline std::vector<BasisValue> evaluate_all(const SplineBasis& basis, double x) {
  return basis.evaluate_all(x);
}

} // namespace splinelab

#endif // SPLINELAB_BSPLINE_HPP
