#ifndef LACUNA_SPARSE_SERIES_HPP
#define LACUNA_SPARSE_SERIES_HPP

#include "lacuna/core.hpp"
#include "lacuna/diophantine.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <type_traits>
#include <unordered_map>
#include <vector>

namespace lacuna {

/// Polynomial in theta truncated after degree `order`, exact rational coefficients.
class ThetaSeries {
 public:
  ThetaSeries() = default;
  explicit ThetaSeries(unsigned order) : c_(order + 1, Rational(0)) {}
  ThetaSeries(unsigned order, const Rational& constant) : c_(order + 1, Rational(0)) { c_[0] = constant; }

  unsigned order() const { return c_.empty() ? 0 : static_cast<unsigned>(c_.size() - 1); }
  const Rational& operator[](unsigned k) const { return c_.at(k); }
  Rational& operator[](unsigned k) { return c_.at(k); }
  const std::vector<Rational>& coeffs() const { return c_; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& x) { return x == 0; });
  }

  ThetaSeries& operator+=(const ThetaSeries& o) {
    if (c_.empty()) c_.assign(o.c_.size(), Rational(0));
    for (std::size_t k = 0; k < std::min(c_.size(), o.c_.size()); ++k) c_[k] += o.c_[k];
    return *this;
  }

  friend ThetaSeries operator*(const ThetaSeries& a, const ThetaSeries& b) {
    unsigned order = std::min(a.order(), b.order());
    ThetaSeries out(order);
    for (unsigned i = 0; i <= order; ++i) {
      if (a.c_[i] == 0) continue;
      for (unsigned j = 0; i + j <= order; ++j) {
        if (b.c_[j] != 0) out.c_[i + j] += a.c_[i] * b.c_[j];
      }
    }
    return out;
  }

  friend bool operator==(const ThetaSeries&, const ThetaSeries&) = default;

 private:
  std::vector<Rational> c_;
};

namespace detail {

template <class C>
bool coeff_is_zero(const C& c) {
  if constexpr (std::is_same_v<C, ThetaSeries>) {
    return c.is_zero();
  } else {
    return c == C{};
  }
}

template <class F>
F abs_freq(const F& v) {
  return v < 0 ? F(-v) : v;
}

}  // namespace detail

/// Finite Fourier series sum_nu coeff(nu) e^{2 pi i nu x} with exact integer
/// frequencies. Frequencies are never folded, so distinct sums of the form
/// sum_j d_j a_j collide only through a genuine linear relation.
///
/// `sup` bounds the sup-norm of the exact function being approximated and `error`
/// bounds the sup-norm of the approximation error; products compose them as
///   sup = sa sb,  error = (sa + ea)(sb + eb) - sa sb.
template <class Coeff, class Freq = BigInt>
class SparseTrigSeries {
 public:
  using map_type = std::unordered_map<Freq, Coeff>;

  SparseTrigSeries() = default;

  static SparseTrigSeries constant(Coeff c) {
    SparseTrigSeries s;
    s.terms_.emplace(Freq(0), std::move(c));
    s.sup_ = 1;
    return s;
  }

  void add(const Freq& nu, const Coeff& c) {
    if (detail::coeff_is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(nu, c);
    if (!inserted) it->second += c;
  }

  const map_type& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  Coeff coeff(const Freq& nu) const {
    auto it = terms_.find(nu);
    return it == terms_.end() ? zero_like() : it->second;
  }

  /// Mean over one period.
  Coeff constant_term() const { return coeff(Freq(0)); }

  long double sup() const { return sup_; }
  long double error() const { return error_; }
  void set_bounds(long double sup, long double error) {
    sup_ = sup;
    error_ = error;
  }

  /// Product restricted to |nu| <= window (all frequencies when window is empty).
  /// Dropped frequencies cannot reach zero once the remaining factors are bounded by
  /// the window, so the constant term of a pruned product chain is exact.
  SparseTrigSeries multiply(const SparseTrigSeries& other, const std::optional<Freq>& window = std::nullopt,
                            NodeBudget* budget = nullptr) const {
    SparseTrigSeries out;
    if (budget) budget->charge(static_cast<std::uint64_t>(terms_.size()) * other.terms_.size());
    out.terms_.reserve(terms_.size() + other.terms_.size());
    for (const auto& [nu1, c1] : terms_) {
      for (const auto& [nu2, c2] : other.terms_) {
        Freq nu = nu1 + nu2;
        if (window && detail::abs_freq(nu) > *window) continue;
        Coeff prod = c1 * c2;
        auto [it, inserted] = out.terms_.try_emplace(std::move(nu), prod);
        if (!inserted) it->second += prod;
      }
    }
    out.sup_ = sup_ * other.sup_;
    out.error_ = (sup_ + error_) * (other.sup_ + other.error_) - sup_ * other.sup_;
    return out;
  }

  SparseTrigSeries pruned(const Freq& window) const {
    SparseTrigSeries out;
    for (const auto& [nu, c] : terms_) {
      if (detail::abs_freq(nu) <= window) out.terms_.emplace(nu, c);
    }
    out.sup_ = sup_;
    out.error_ = error_;
    return out;
  }

  /// coeff(-nu) == conj(coeff(nu)) within tol, for complex coefficients.
  bool is_hermitian(long double tol) const
    requires std::is_same_v<Coeff, std::complex<long double>> || std::is_same_v<Coeff, std::complex<double>>
  {
    for (const auto& [nu, c] : terms_) {
      Coeff mirror = coeff(Freq(-nu));
      if (std::abs(mirror - std::conj(c)) > tol * std::max<long double>(1, std::abs(c))) return false;
    }
    return true;
  }

 private:
  static Coeff zero_like() { return Coeff{}; }

  map_type terms_;
  long double sup_ = 1;
  long double error_ = 0;
};

}  // namespace lacuna

#endif  // LACUNA_SPARSE_SERIES_HPP
