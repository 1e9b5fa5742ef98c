#ifndef LACUNA_MOMENTS_HPP
#define LACUNA_MOMENTS_HPP

#include "lacuna/core.hpp"
#include "lacuna/diophantine.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/trigpoly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lacuna {

enum class MomentKind { dependent, iid };

inline std::string to_string(MomentKind k) { return k == MomentKind::dependent ? "dependent" : "iid"; }

/// E Z^m for m = 1..M, Z = S_n^f (dependent) or T_n^f (iid).
struct MomentTable {
  std::size_t n = 0;
  MomentKind kind = MomentKind::dependent;
  std::vector<Rational> values;  // values[m-1] = E Z^m

  const Rational& operator[](std::size_t m) const { return values.at(m - 1); }
  std::size_t max_order() const { return values.size(); }
};

/// E (S_n^f)^m, exact.
///
/// The n^m index tuples are grouped by index multiset: every ordering of a multiset
/// contributes the same weighted zero-sum count, so each multiset is evaluated once
/// and weighted by its multinomial coefficient m! / prod(mult!).
inline Rational sum_moment(const TrigPoly& f, const LacunarySequence& seq, std::size_t n, unsigned m,
                           std::uint64_t budget_nodes = kDefaultNodeBudget) {
  if (m == 0) throw ConfigError("moment order must be at least 1");
  if (n == 0 || n > seq.size()) throw ConfigError("n out of range for sum_moment");

  const BigInt m_fact = factorial(m);
  std::vector<std::size_t> idx(m, 0);  // non-decreasing 0-based indices
  std::vector<BigInt> terms(m);
  Rational total = 0;
  std::uint64_t used = 0;
  while (true) {
    BigInt denom = 1;
    std::size_t run = 1;
    for (unsigned j = 0; j < m; ++j) {
      terms[j] = seq[idx[j]];
      if (j > 0 && idx[j] == idx[j - 1]) {
        ++run;
        denom *= run;
      } else {
        run = 1;
      }
    }
    if (used >= budget_nodes) throw ResourceError("sum_moment budget of " + std::to_string(budget_nodes) + " nodes exceeded");
    auto wc = weighted_zero_sum(terms, f, budget_nodes - used);
    used += wc.nodes;
    if (wc.value != 0) total += wc.value * Rational(m_fact / denom);

    // next multiset
    int j = static_cast<int>(m) - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - 1) --j;
    if (j < 0) break;
    std::size_t v = idx[static_cast<std::size_t>(j)] + 1;
    for (std::size_t k = static_cast<std::size_t>(j); k < m; ++k) idx[k] = v;
  }
  return total;
}

/// E X_1^k for k = 0..max_order, with X_1 = f(U).
inline std::vector<Rational> single_moments(const TrigPoly& f, unsigned max_order) {
  std::vector<Rational> mu(max_order + 1, Rational(0));
  mu[0] = 1;
  for (unsigned k = 1; k <= max_order; ++k) {
    std::vector<BigInt> ones(k, BigInt(1));
    mu[k] = weighted_zero_sum(ones, f).value;
  }
  return mu;
}

namespace detail {

// Truncated product of exponential generating functions: coefficients of t^k / k!.
inline std::vector<Rational> egf_power(const std::vector<Rational>& moments, std::size_t n, unsigned order) {
  std::vector<Rational> base(order + 1), result(order + 1, Rational(0));
  for (unsigned k = 0; k <= order; ++k) base[k] = moments[k] / Rational(factorial(k));
  result[0] = 1;
  auto mul = [order](const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> c(order + 1, Rational(0));
    for (unsigned i = 0; i <= order; ++i) {
      if (a[i] == 0) continue;
      for (unsigned j = 0; i + j <= order; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  for (std::size_t e = n; e > 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    if (e > 1) base = mul(base, base);
  }
  for (unsigned k = 0; k <= order; ++k) result[k] *= Rational(factorial(k));
  return result;
}

}  // namespace detail

/// E (T_n^f)^m for the i.i.d. analogue, via E e^{tT} = (E e^{tX_1})^n.
inline Rational iid_moment(const TrigPoly& f, std::size_t n, unsigned m) {
  if (m == 0) throw ConfigError("moment order must be at least 1");
  if (n == 0) throw ConfigError("n must be at least 1");
  return detail::egf_power(single_moments(f, m), n, m)[m];
}

inline MomentTable moment_table(const TrigPoly& f, const LacunarySequence& seq, std::size_t n, unsigned max_order,
                                MomentKind kind, std::uint64_t budget_nodes = kDefaultNodeBudget) {
  MomentTable t{n, kind, {}};
  if (kind == MomentKind::iid) {
    auto all = detail::egf_power(single_moments(f, max_order), n, max_order);
    t.values.assign(all.begin() + 1, all.end());
  } else {
    for (unsigned m = 1; m <= max_order; ++m) t.values.push_back(sum_moment(f, seq, n, m, budget_nodes));
  }
  return t;
}

struct VarianceReport {
  Rational variance;     // E S_n^2
  Rational upper_bound;  // 4 n sum_{d=0}^{D} c_d^2
  Rational ratio;        // E S_n^2 / n, prefix proxy for c(f,a)
  bool within_upper = false;
};

inline VarianceReport variance_report(const TrigPoly& f, const LacunarySequence& seq, std::size_t n) {
  VarianceReport r;
  r.variance = sum_moment(f, seq, n, 2);
  Rational half_sum = 0;
  for (const auto& c : f.positive_coeffs()) half_sum += c * c;
  r.upper_bound = 4 * Rational(static_cast<unsigned long>(n)) * half_sum;
  r.ratio = r.variance / Rational(static_cast<unsigned long>(n));
  r.within_upper = r.variance <= r.upper_bound;
  return r;
}

struct VarianceConditions {
  bool a_nonnegative_coeffs = false;
  PairCollision b_collisions;
  Rational b_ratio;                // collisions / n
  std::optional<std::size_t> c_k0;  // minimal k0 with a_{k+1}/a_k > D for k0 <= k < n
};

inline VarianceConditions check_variance_conditions(const TrigPoly& f, const LacunarySequence& seq, std::size_t n) {
  if (n == 0 || n > seq.size()) throw ConfigError("n out of range for check_variance_conditions");
  VarianceConditions out;
  out.a_nonnegative_coeffs = true;
  for (const auto& c : f.positive_coeffs()) out.a_nonnegative_coeffs = out.a_nonnegative_coeffs && c >= 0;
  out.b_collisions = pair_collision_count(seq, f, n);
  out.b_ratio = Rational(static_cast<unsigned long>(out.b_collisions.count), static_cast<unsigned long>(n));
  if (n == 1) {
    out.c_k0 = 1;
    return out;
  }
  std::size_t k0 = n;  // sentinel: no admissible start
  for (std::size_t k = n - 1; k >= 1; --k) {
    if (seq[k] > f.degree() * seq[k - 1]) {
      k0 = k;
    } else {
      break;
    }
  }
  if (k0 < n) out.c_k0 = k0;
  return out;
}

}  // namespace lacuna

#endif  // LACUNA_MOMENTS_HPP
