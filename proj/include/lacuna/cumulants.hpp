#ifndef LACUNA_CUMULANTS_HPP
#define LACUNA_CUMULANTS_HPP

#include "lacuna/core.hpp"
#include "lacuna/moments.hpp"
#include "lacuna/trigpoly.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace lacuna {

struct CumulantTable {
  std::vector<Rational> values;  // values[m-1] = gamma_m
  Rational sigma2 = 0;           // gamma_2
  std::optional<unsigned> rho;
  std::optional<Rational> gamma_rho;

  const Rational& operator[](std::size_t m) const { return values.at(m - 1); }
  std::size_t max_order() const { return values.size(); }
};

/// Cumulants from raw moments mu_1..mu_M:
///   gamma_m = mu_m - sum_{j=1}^{m-1} C(m-1, j-1) gamma_j mu_{m-j}.
inline CumulantTable cumulants_from_moments(const std::vector<Rational>& moments) {
  const std::size_t M = moments.size();
  auto mu = [&](std::size_t k) -> Rational { return k == 0 ? Rational(1) : moments[k - 1]; };
  CumulantTable t;
  t.values.resize(M);
  for (std::size_t m = 1; m <= M; ++m) {
    Rational g = mu(m);
    for (std::size_t j = 1; j < m; ++j) {
      g -= Rational(binomial(static_cast<unsigned>(m - 1), static_cast<unsigned>(j - 1))) * t.values[j - 1] * mu(m - j);
    }
    t.values[m - 1] = g;
  }
  if (M >= 2) t.sigma2 = t.values[1];
  return t;
}

/// Inverse recursion: mu_m = sum_{j=1}^{m} C(m-1, j-1) gamma_j mu_{m-j}.
inline std::vector<Rational> moments_from_cumulants(const std::vector<Rational>& cumulants) {
  const std::size_t M = cumulants.size();
  std::vector<Rational> mu(M + 1, Rational(0));
  mu[0] = 1;
  for (std::size_t m = 1; m <= M; ++m) {
    Rational s = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      s += Rational(binomial(static_cast<unsigned>(m - 1), static_cast<unsigned>(j - 1))) * cumulants[j - 1] * mu[m - j];
    }
    mu[m] = s;
  }
  return {mu.begin() + 1, mu.end()};
}

inline CumulantTable cumulants_of(const MomentTable& moments) { return cumulants_from_moments(moments.values); }

struct SingleCumulantBound {
  double bound;           // (A e)^m m!
  Rational intermediate;  // A^m m^m, exact for rational A; never exceeds `bound`
};

/// Bound on |gamma_m(X)| for |X| <= A: A^m m^m <= (A e)^m m!.
inline SingleCumulantBound single_variable_cumulant_bound(const Rational& A, unsigned m) {
  if (m < 1) throw ConfigError("cumulant order must be at least 1");
  if (A <= 0) throw ConfigError("A must be positive");
  double a = to_double(A);
  double bound = std::pow(a * std::numbers::e, static_cast<double>(m)) * std::tgamma(static_cast<double>(m) + 1.0);
  return {bound, pow(A, m) * Rational(boost::multiprecision::pow(BigInt(m), m))};
}

/// 2 (2m)^{m-2} n (deg+1)^{m-1} A^m, the cumulant bound for a sum over n vertices of a
/// correlation graph of maximal degree deg.
inline Rational graph_cumulant_bound(std::size_t n, std::size_t deg, const Rational& A, unsigned m) {
  if (m < 2) throw ConfigError("graph cumulant bound needs m >= 2");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (A <= 0) throw ConfigError("A must be positive");
  BigInt v = 2 * boost::multiprecision::pow(BigInt(2 * m), m - 2) * BigInt(n) *
             boost::multiprecision::pow(BigInt(deg + 1), m - 1);
  return Rational(v) * pow(A, m);
}

struct DeRow {
  unsigned m;
  double lhs;          // |gamma_m(S_n)|
  double rhs;          // m^{m-2} (log m)^{gamma m} sigma^m / Delta^{m-2}
  bool pass;
  double max_delta;    // largest Delta_n for which this row passes (inf if gamma_m = 0)
};

/// Per-order check of |gamma_m| <= m^{m-2} (log m)^{gamma m} sigma_n^m / Delta_n^{m-2}.
inline std::vector<DeRow> check_de_condition(const CumulantTable& cumulants, double sigma_n, double delta_n, double gamma,
                                             unsigned m_lo, unsigned m_hi) {
  if (!(delta_n > 0)) throw ConfigError("Delta_n must be positive");
  if (m_lo < 3) throw ConfigError("cond-DE starts at m = 3");
  if (gamma < 0) throw ConfigError("gamma must be nonnegative");
  if (m_hi > cumulants.max_order()) throw ConfigError("cumulant table too short for requested m range");
  std::vector<DeRow> rows;
  for (unsigned m = m_lo; m <= m_hi; ++m) {
    double lhs = std::fabs(to_double(cumulants[m]));
    double md = static_cast<double>(m);
    double log_k = (md - 2) * std::log(md) + gamma * md * std::log(std::log(md)) + md * std::log(sigma_n);
    double rhs = std::exp(log_k - (md - 2) * std::log(delta_n));
    double max_delta = lhs == 0 ? std::numeric_limits<double>::infinity() : std::exp((log_k - std::log(lhs)) / (md - 2));
    rows.push_back({m, lhs, rhs, lhs <= rhs, max_delta});
  }
  return rows;
}

/// Smallest C with 2(2m)^{m-2} (2k+1)^{m-1} A^m <= m^{m-2} C^{m-2} (log m)^m for all m in
/// [m_lo, m_hi], where k = ceil(log2(mD)) is the correlation-graph window for range m.
inline double graph_bound_constant(double A, int D, unsigned m_lo, unsigned m_hi) {
  double C = 1;
  for (unsigned m = std::max(m_lo, 3u); m <= m_hi; ++m) {
    unsigned k = 0;
    while ((1ULL << k) < static_cast<unsigned long long>(m) * static_cast<unsigned long long>(D)) ++k;
    double md = m;
    double lhs = std::log(2.0) + (md - 2) * std::log(2 * md) + (md - 1) * std::log(2.0 * k + 1) + md * std::log(A);
    double rhs_wo_c = (md - 2) * std::log(md) + md * std::log(std::log(md));
    C = std::max(C, std::exp((lhs - rhs_wo_c) / (md - 2)));
  }
  return C;
}

struct RhoResult {
  unsigned rho;
  Rational gamma_rho;
  CumulantTable cumulants;  // cumulants of X_1 up to the search cap
};

/// Smallest rho >= 3 with gamma_rho(X_1) != 0, searching up to max_order.
inline RhoResult rho_of(const TrigPoly& f, unsigned max_order = 12) {
  if (max_order < 3) throw ConfigError("rho search cap must be at least 3");
  auto mu = single_moments(f, max_order);
  auto table = cumulants_from_moments({mu.begin() + 1, mu.end()});
  for (unsigned m = 3; m <= max_order; ++m) {
    if (table[m] != 0) {
      table.rho = m;
      table.gamma_rho = table[m];
      return {m, table[m], table};
    }
  }
  throw ConfigError("rho undetermined up to M_max = " + std::to_string(max_order));
}

}  // namespace lacuna

#endif  // LACUNA_CUMULANTS_HPP
