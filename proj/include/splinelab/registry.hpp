#ifndef SPLINELAB_REGISTRY_HPP
#define SPLINELAB_REGISTRY_HPP

// Named analytic function families. Measures, weight systems and test
// functions are all referenced by registry name plus numeric parameters, so a
// configuration never carries executable code.

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace splinelab {

/// A function on [0,1] from a registered family, with analytic derivatives.
class AnalyticFunction {
public:
  AnalyticFunction() : AnalyticFunction("constant", {{"value", 1.0}}) {}

  AnalyticFunction(std::string name, std::map<std::string, double> params)
      : name_(std::move(name)), params_(std::move(params)) {
    resolve();
  }

  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }

  double operator()(double x) const { return derivative(x, 0); }

  /// d-th derivative at x. Families with jumps report the one-sided
  /// derivative away from the jump and zero for d >= 1.
  double derivative(double x, int d) const {
    switch (family_) {
    case Family::constant:
      return d == 0 ? a_ : 0.0;
    case Family::sine: {
      // a + b sin(omega x + phi)
      if (d == 0) return a_ + b_ * std::sin(omega_ * x + phi_);
      return b_ * std::pow(omega_, d) *
             std::sin(omega_ * x + phi_ + d * std::numbers::pi / 2);
    }
    case Family::linear:
      if (d == 0) return a_ + b_ * x;
      return d == 1 ? b_ : 0.0;
    case Family::exponential:
      return a_ * std::pow(b_, d) * std::exp(b_ * x);
    case Family::step:
      if (d > 0) return 0.0;
      return x < c_ ? a_ : b_;
    case Family::monomial:
      if (d > static_cast<int>(a_)) return 0.0;
      {
        double coeff = 1.0;
        for (int m = 0; m < d; ++m) coeff *= (a_ - m);
        return coeff * std::pow(x, a_ - d);
      }
    case Family::sign:
      if (d > 0) return 0.0;
      return x < c_ ? -1.0 : 1.0;
    }
    return 0.0;
  }

  /// Points in (0,1) where the function or its derivatives jump.
  std::vector<double> breakpoints() const {
    if ((family_ == Family::step || family_ == Family::sign) && c_ > 0.0 &&
        c_ < 1.0)
      return {c_};
    return {};
  }

  bool smooth() const { return breakpoints().empty(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["name"] = name_;
    j["params"] = params_;
    return j;
  }

  static AnalyticFunction from_json(const nlohmann::json& j) {
    if (j.is_number()) return constant(j.get<double>());
    std::map<std::string, double> params;
    if (j.contains("params")) {
      params = j.at("params").get<std::map<std::string, double>>();
    }
    // Flat form: {"name": "...", "eps": 0.1, "freq": 1}
    for (const auto& [key, value] : j.items()) {
      if (key == "name" || key == "params" || key == "kind") continue;
      if (value.is_number()) params[key] = value.get<double>();
    }
    return AnalyticFunction(j.at("name").get<std::string>(), std::move(params));
  }

  static AnalyticFunction constant(double value) {
    return AnalyticFunction("constant", {{"value", value}});
  }
  static AnalyticFunction one_plus_eps_sin(double eps, double freq = 1.0,
                                           double phase = 0.0) {
    return AnalyticFunction("one_plus_eps_sin",
                            {{"eps", eps}, {"freq", freq}, {"phase", phase}});
  }

  static const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names{
        "constant", "one_plus_eps_sin", "sine",    "linear", "exponential",
        "step",     "monomial",         "sign"};
    return names;
  }

private:
  enum class Family { constant, sine, linear, exponential, step, monomial, sign };

  double param(const std::string& key, double fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  void resolve() {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (name_ == "constant") {
      family_ = Family::constant;
      a_ = param("value", 1.0);
    } else if (name_ == "one_plus_eps_sin") {
      family_ = Family::sine;
      a_ = 1.0;
      b_ = param("eps", 0.1);
      omega_ = two_pi * param("freq", 1.0);
      phi_ = param("phase", 0.0);
    } else if (name_ == "sine") {
      family_ = Family::sine;
      a_ = param("offset", 0.0);
      b_ = param("amplitude", 1.0);
      omega_ = two_pi * param("freq", 1.0);
      phi_ = param("phase", 0.0);
    } else if (name_ == "linear") {
      family_ = Family::linear;
      a_ = param("intercept", 1.0);
      b_ = param("slope", 0.0);
    } else if (name_ == "exponential") {
      family_ = Family::exponential;
      a_ = param("scale", 1.0);
      b_ = param("rate", 1.0);
    } else if (name_ == "step") {
      family_ = Family::step;
      a_ = param("left", 1.0);
      b_ = param("right", 2.0);
      c_ = param("at", 0.5);
    } else if (name_ == "monomial") {
      family_ = Family::monomial;
      a_ = param("degree", 1.0);
      if (a_ < 0 || a_ != std::floor(a_))
        throw std::invalid_argument("monomial degree must be a nonnegative integer");
    } else if (name_ == "sign") {
      family_ = Family::sign;
      c_ = param("at", 0.5);
    } else {
      throw std::invalid_argument("unknown function family '" + name_ + "'");
    }
  }

  std::string name_;
  std::map<std::string, double> params_;
  Family family_ = Family::constant;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0, omega_ = 0.0, phi_ = 0.0;
};

} // namespace splinelab

#endif // SPLINELAB_REGISTRY_HPP
