#ifndef LACUNA_TRIGPOLY_HPP
#define LACUNA_TRIGPOLY_HPP

#include "lacuna/core.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace lacuna {

/// Real, even, centered trigonometric polynomial
///   f(x) = sum_{d=-D}^{D} c_d e^{2 pi i d x},  c_d = c_{-d},  c_0 = 0,
/// stored as the exact coefficients c_1..c_D.
class TrigPoly {
 public:
  /// Keys may be positive or negative frequencies; the mirror is implied.
  explicit TrigPoly(const std::map<int, Rational>& coeffs) {
    std::map<int, Rational> pos;
    for (const auto& [d, c] : coeffs) {
      if (d == 0) {
        if (c != 0) throw ConfigError("c_0 must be zero (f is centered)");
        continue;
      }
      int key = d < 0 ? -d : d;
      auto it = pos.find(key);
      if (it != pos.end() && it->second != c) {
        throw ConfigError("coefficients of frequencies " + std::to_string(key) + " and " + std::to_string(-key) +
                          " differ (f must be even)");
      }
      pos[key] = c;
    }
    int degree = 0;
    for (const auto& [d, c] : pos) {
      if (c != 0) degree = std::max(degree, d);
    }
    if (degree == 0) throw ConfigError("trigonometric polynomial is identically zero");
    positive_.assign(static_cast<std::size_t>(degree), Rational(0));
    for (const auto& [d, c] : pos) {
      if (d <= degree) positive_[static_cast<std::size_t>(d - 1)] = c;
    }
    for (const auto& c : positive_) cached_.push_back(to_double(c));
  }

  static TrigPoly cosine() { return TrigPoly({{1, Rational(1, 2)}}); }
  /// cos(2 pi x) - cos(4 pi x); telescopes along a_n = 2^n.
  static TrigPoly telescope() { return TrigPoly({{1, Rational(1, 2)}, {2, Rational(-1, 2)}}); }

  int degree() const { return static_cast<int>(positive_.size()); }

  Rational coeff(int d) const {
    if (d == 0) return 0;
    int a = d < 0 ? -d : d;
    if (a > degree()) return 0;
    return positive_[static_cast<std::size_t>(a - 1)];
  }

  /// c_1..c_D.
  const std::vector<Rational>& positive_coeffs() const { return positive_; }

  double coeff_double(int d) const { return to_double(coeff(d)); }

  /// 2 sum_{d>=1} c_d cos(2 pi d x); 1-periodic.
  double eval(double x) const {
    double frac = x - std::floor(x);
    return eval_unit(frac);
  }

  /// Evaluation for an argument already reduced to [0,1).
  double eval_unit(double u) const {
    double acc = 0;
    const double w = 2.0 * std::numbers::pi * u;
    for (std::size_t i = 0; i < positive_.size(); ++i) acc += cached_[i] * std::cos(w * static_cast<double>(i + 1));
    return 2.0 * acc;
  }

  /// A = sum_d |c_d|, so |f| <= A everywhere.
  Rational sup_bound() const {
    Rational s = 0;
    for (const auto& c : positive_) s += abs(c);
    return 2 * s;
  }

  /// Exact sum_d |c_d| |d|; the Lipschitz constant is 2 pi times this.
  Rational lipschitz_factor() const {
    Rational s = 0;
    for (std::size_t i = 0; i < positive_.size(); ++i) s += abs(positive_[i]) * static_cast<int>(i + 1);
    return 2 * s;
  }

  /// Float upper bound of 2 pi sum_d |c_d| |d|; x -> f(a x) is (a L)-Lipschitz.
  double lipschitz_constant() const {
    return std::nextafter(2.0 * std::numbers::pi * to_double(lipschitz_factor()), INFINITY);
  }

  /// E X_1^2 = sum_{d=-D}^{D} c_d^2.
  Rational second_moment() const {
    Rational s = 0;
    for (const auto& c : positive_) s += c * c;
    return 2 * s;
  }

  /// Least common denominator of the c_d.
  BigInt common_denominator() const {
    BigInt l = 1;
    for (const auto& c : positive_) l = boost::multiprecision::lcm(l, denominator(c));
    return l;
  }

  std::string describe() const {
    std::string s = "{";
    for (std::size_t i = 0; i < positive_.size(); ++i) {
      if (positive_[i] == 0) continue;
      if (s.size() > 1) s += ",";
      s += "\"" + std::to_string(i + 1) + "\":\"" + to_string(positive_[i]) + "\"";
    }
    return s + "}";
  }

 private:
  std::vector<Rational> positive_;
  std::vector<double> cached_;
};

}  // namespace lacuna

#endif  // LACUNA_TRIGPOLY_HPP
