#ifndef LACUNA_MGF_HPP
#define LACUNA_MGF_HPP

#include "lacuna/core.hpp"
#include "lacuna/cumulants.hpp"
#include "lacuna/moments.hpp"
#include "lacuna/sampling.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/sparse_series.hpp"
#include "lacuna/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace lacuna {

using Complex = std::complex<long double>;

struct TruncationOrder {
  unsigned order;           // M
  long double error_bound;  // sup over |x| <= A of |e^x - sum_{m<=M} x^m/m!|
};

/// M = ceil(2 e A) suffices for a remainder of at most 2^{-A} on the disk |x| <= A.
inline TruncationOrder exp_truncation_order(long double A) {
  if (!(A >= 1)) throw ConfigError("exp_truncation_order needs A >= 1");
  auto M = static_cast<unsigned>(std::ceil(2.0L * std::numbers::e_v<long double> * A));
  return {M, std::exp2(-A)};
}

/// Geometric-majorant bound on sum_{k>M} A^k / k!; infinite when A >= M + 2.
inline long double exp_tail_bound(long double A, unsigned M) {
  if (A <= 0) return 0;
  const long double next = static_cast<long double>(M) + 2;
  if (A >= next) return std::numeric_limits<long double>::infinity();
  long double log_term = (M + 1) * std::log(A) - std::lgamma(static_cast<long double>(M) + 2);
  return std::exp(log_term) / (1 - A / next);
}

/// Remainder |e^x - sum_{m<=M} x^m/m!| evaluated as the tail series, so no cancellation.
inline long double exp_remainder(Complex x, unsigned M) {
  Complex term = 1;
  for (unsigned k = 1; k <= M; ++k) term *= x / static_cast<long double>(k);
  Complex tail = 0;
  for (unsigned k = M + 1; k < M + 200; ++k) {
    term *= x / static_cast<long double>(k);
    tail += term;
    if (std::abs(term) < 1e-30L * std::max<long double>(1, std::abs(tail))) break;
  }
  return std::abs(tail);
}

/// Largest remainder over `samples` points drawn uniformly from the disk |x| <= A,
/// with the truncation order of exp_truncation_order(A).
inline long double empirical_truncation_error(long double A, std::size_t samples, std::uint64_t seed) {
  auto [M, bound] = exp_truncation_order(A);
  (void)bound;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<long double> unit(0, 1);
  long double worst = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    long double r = A * std::sqrt(unit(rng));
    long double phi = 2 * std::numbers::pi_v<long double> * unit(rng);
    worst = std::max(worst, exp_remainder(std::polar(r, phi), M));
  }
  return worst;
}

struct MgfOptions {
  long double a_budget = 64;      // cap on |theta| sup|f| n
  unsigned precision_bits = 40;   // per-factor truncation target 2^{-bits}
  std::uint64_t max_frequencies = budget_or_env(10'000'000ULL);
};

struct MgfResult {
  Complex value;
  long double error = 0;       // certified bound on |value - E e^{theta S_n}|
  unsigned order = 0;          // per-factor truncation order
  std::size_t peak_terms = 0;  // largest intermediate series
  std::string method = "exact";
};

namespace detail {

// Dense exact powers f^0..f^M; row m is indexed by frequency k + M D.
inline std::vector<std::vector<Rational>> poly_powers(const TrigPoly& f, unsigned M) {
  const int D = f.degree();
  const int off = static_cast<int>(M) * D;
  const auto width = static_cast<std::size_t>(2 * off + 1);
  std::vector<std::vector<Rational>> pw(M + 1, std::vector<Rational>(width, Rational(0)));
  pw[0][static_cast<std::size_t>(off)] = 1;
  for (unsigned m = 1; m <= M; ++m) {
    const int reach = static_cast<int>(m - 1) * D;
    for (int k = -reach; k <= reach; ++k) {
      const Rational& a = pw[m - 1][static_cast<std::size_t>(k + off)];
      if (a == 0) continue;
      for (int d = -D; d <= D; ++d) {
        Rational c = f.coeff(d);
        if (c != 0) pw[m][static_cast<std::size_t>(k + d + off)] += a * c;
      }
    }
  }
  return pw;
}

template <class Freq>
Freq to_freq(const BigInt& v) {
  if constexpr (std::is_same_v<Freq, BigInt>) {
    return v;
  } else {
    return v.template convert_to<Freq>();
  }
}

// Constant term of prod_j sum_k unit[k] e^{2 pi i k a_j x}, with the a_j processed in
// descending order and each partial product pruned to what the remaining factors
// can still bring back to zero.
template <class Coeff, class Freq>
Coeff chain_constant(const std::vector<std::pair<int, Coeff>>& unit, const Coeff& one, std::vector<BigInt> terms,
                     int reach_units, std::uint64_t max_frequencies, std::size_t& peak) {
  std::sort(terms.begin(), terms.end(), std::greater<>());
  BigInt remaining = 0;
  for (const auto& a : terms) remaining += a;
  auto acc = SparseTrigSeries<Coeff, Freq>::constant(one);
  peak = 1;
  for (const auto& a : terms) {
    remaining -= a;
    SparseTrigSeries<Coeff, Freq> factor;
    const Freq step = to_freq<Freq>(a);
    for (const auto& [k, c] : unit) factor.add(Freq(k) * step, c);
    acc = acc.multiply(factor, to_freq<Freq>(remaining * reach_units));
    peak = std::max(peak, acc.size());
    if (acc.size() > max_frequencies) {
      throw ResourceError("exact MGF product exceeded " + std::to_string(max_frequencies) +
                          " frequencies; use the Monte Carlo estimator (mc_mgf)");
    }
  }
  return acc.constant_term();
}

inline bool fits_int64(const std::vector<BigInt>& terms, int reach_units) {
  BigInt total = 0;
  for (const auto& a : terms) total += a;
  return total * reach_units < (BigInt(1) << 62);
}

}  // namespace detail

/// E e^{theta S_n} from the product of per-factor truncated exponentials, with the
/// truncation and floating-point rounding folded into a certified error bound.
inline MgfResult exact_mgf(const TrigPoly& f, const LacunarySequence& seq, std::size_t n, Complex theta,
                           const MgfOptions& opt = {}) {
  if (n == 0 || n > seq.size()) throw ConfigError("n out of range for exact_mgf");
  const long double sup = to_long_double(f.sup_bound());
  const long double A = std::abs(theta) * sup;
  if (A * static_cast<long double>(n) > opt.a_budget) {
    throw ConfigError("|theta| sup|f| n exceeds the A budget; raise --a-budget or use Monte Carlo");
  }
  MgfResult out;
  if (theta == Complex(0)) {
    out.value = 1;
    return out;
  }

  const long double target = std::exp2(-static_cast<long double>(opt.precision_bits));
  const long double A_lemma = std::max<long double>(1, A);
  unsigned M = exp_truncation_order(A_lemma).order;
  while (exp_tail_bound(A, M) > target) ++M;
  out.order = M;

  const auto pw = detail::poly_powers(f, M);
  const int off = static_cast<int>(M) * f.degree();
  std::vector<std::pair<int, Complex>> unit;
  for (int k = -off; k <= off; ++k) {
    Complex c = 0;
    Complex scale = 1;
    for (unsigned m = 0; m <= M; ++m) {
      if (m > 0) scale *= theta / static_cast<long double>(m);
      const Rational& p = pw[m][static_cast<std::size_t>(k + off)];
      if (p != 0) c += scale * to_long_double(p);
    }
    if (c != Complex(0)) unit.emplace_back(k, c);
  }

  std::vector<BigInt> terms(seq.terms().begin(), seq.terms().begin() + static_cast<std::ptrdiff_t>(n));
  if (detail::fits_int64(terms, off)) {
    out.value = detail::chain_constant<Complex, std::int64_t>(unit, Complex(1), terms, off, opt.max_frequencies, out.peak_terms);
  } else {
    out.value = detail::chain_constant<Complex, BigInt>(unit, Complex(1), terms, off, opt.max_frequencies, out.peak_terms);
  }

  const long double nd = static_cast<long double>(n);
  const long double per_factor = std::min(std::exp2(-A_lemma), exp_tail_bound(A, M));
  const long double scale = std::exp(nd * A);
  const long double truncation = scale * std::expm1(nd * std::log1p(per_factor * std::exp(-A)));
  // Each product of n factors and its accumulation into a sum of at most `peak` terms
  // costs O(n + log peak) roundings, against a coefficient mass of at most e^{nA}.
  const long double ops = 4 * (nd + std::log2(static_cast<long double>(out.peak_terms) + 2) + M);
  const long double rounding = ops * std::numeric_limits<long double>::epsilon() * scale * (1 + per_factor);
  out.error = truncation + rounding;
  return out;
}

/// E S_n^m for m = 0..order, exactly, from the theta-series of prod_j e^{theta f(a_j x)}.
inline std::vector<Rational> mgf_taylor(const TrigPoly& f, const LacunarySequence& seq, std::size_t n, unsigned order,
                                        std::uint64_t max_frequencies = budget_or_env(10'000'000ULL)) {
  if (n == 0 || n > seq.size()) throw ConfigError("n out of range for mgf_taylor");
  const auto pw = detail::poly_powers(f, order);
  const int off = static_cast<int>(order) * f.degree();
  std::vector<std::pair<int, ThetaSeries>> unit;
  for (int k = -off; k <= off; ++k) {
    ThetaSeries c(order);
    for (unsigned m = 0; m <= order; ++m) c[m] = pw[m][static_cast<std::size_t>(k + off)] / Rational(factorial(m));
    if (!c.is_zero()) unit.emplace_back(k, c);
  }
  std::vector<BigInt> terms(seq.terms().begin(), seq.terms().begin() + static_cast<std::ptrdiff_t>(n));
  std::size_t peak = 0;
  ThetaSeries constant = detail::fits_int64(terms, off)
                             ? detail::chain_constant<ThetaSeries, std::int64_t>(unit, ThetaSeries(order, 1), terms, off, max_frequencies, peak)
                             : detail::chain_constant<ThetaSeries, BigInt>(unit, ThetaSeries(order, 1), terms, off, max_frequencies, peak);
  std::vector<Rational> out(order + 1, Rational(0));
  if (constant.coeffs().empty()) return out;
  for (unsigned m = 0; m <= order; ++m) out[m] = constant[m] * Rational(factorial(m));
  return out;
}

struct McEstimate {
  Complex estimate;
  long double stderr_ = 0;  // standard error of the complex mean
  std::uint64_t samples = 0;
};

/// Plain Monte Carlo mean of e^{theta S_n(U)}. With `antithetic`, each draw averages
/// u and 1 - u; for even f the two values coincide.
inline McEstimate mc_mgf(const TrigPoly& f, const LacunarySequence& seq, std::size_t n, Complex theta,
                         const McConfig& cfg, bool antithetic = false) {
  if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
  McEstimate out;
  out.samples = cfg.samples;
  if (theta == Complex(0)) {
    out.estimate = 1;
    return out;
  }
  PhaseSampler sampler(seq, n);
  struct Acc {
    long double re = 0, im = 0, re2 = 0, im2 = 0;
  };
  const std::complex<double> th(static_cast<double>(theta.real()), static_cast<double>(theta.imag()));
  auto shards = run_sharded<Acc>(cfg.samples, cfg.seed, cfg.shards, cfg.jobs, [&](ShardRng& rng, std::uint64_t count, Acc& acc) {
    std::vector<double> phases, mirror;
    for (std::uint64_t i = 0; i < count; ++i) {
      sampler.draw(rng, phases);
      std::complex<double> v = std::exp(th * sum_of_phases(f, phases));
      if (antithetic) {
        mirror.resize(phases.size());
        for (std::size_t j = 0; j < phases.size(); ++j) mirror[j] = phases[j] == 0 ? 0 : 1 - phases[j];
        v = 0.5 * (v + std::exp(th * sum_of_phases(f, mirror)));
      }
      acc.re += v.real();
      acc.im += v.imag();
      acc.re2 += static_cast<long double>(v.real()) * v.real();
      acc.im2 += static_cast<long double>(v.imag()) * v.imag();
    }
  });
  Acc total;
  for (const auto& s : shards) {
    total.re += s.re;
    total.im += s.im;
    total.re2 += s.re2;
    total.im2 += s.im2;
  }
  const long double N = static_cast<long double>(cfg.samples);
  out.estimate = Complex(total.re / N, total.im / N);
  if (cfg.samples > 1) {
    long double var = (total.re2 - total.re * total.re / N + total.im2 - total.im * total.im / N) / (N - 1);
    out.stderr_ = std::sqrt(std::max<long double>(0, var) / N);
  }
  return out;
}

struct GeResult {
  long double value = 0;   // (1/(n z_n)) log E e^{theta sqrt(z_n) S_n}
  long double target = 0;  // theta^2 E X_1^2 / 2
  long double gap = 0;
  std::string method = "exact";
};

inline GeResult ge_scaled_log_mgf(const TrigPoly& f, const LacunarySequence& seq, std::size_t n, long double z_n,
                                  long double theta, const MgfOptions& opt = {}, const McConfig& mc = {}) {
  if (!(z_n > 0)) throw ConfigError("z_n must be positive");
  GeResult out;
  out.target = theta * theta * to_long_double(f.second_moment()) / 2;
  if (theta == 0) {
    out.gap = out.target;
    return out;
  }
  const Complex arg(theta * std::sqrt(z_n), 0);
  long double mgf;
  try {
    mgf = exact_mgf(f, seq, n, arg, opt).value.real();
  } catch (const ResourceError&) {
    mgf = mc_mgf(f, seq, n, arg, mc).estimate.real();
    out.method = "monte-carlo";
  }
  if (!(mgf > 0)) throw ResourceError("MGF estimate is not positive; increase samples");
  out.value = std::log(mgf) / (static_cast<long double>(n) * z_n);
  out.gap = std::fabs(out.value - out.target);
  return out;
}

/// psi(theta) = exp(theta^rho gamma_rho / rho!).
struct ModGaussianTarget {
  unsigned rho;
  Rational gamma_rho;

  Complex psi(Complex theta) const {
    return std::exp(std::pow(theta, static_cast<int>(rho)) * to_long_double(gamma_rho / Rational(factorial(rho))));
  }

  static ModGaussianTarget of(const TrigPoly& f, unsigned max_order = 12) {
    auto r = rho_of(f, max_order);
    return {r.rho, r.gamma_rho};
  }
};

enum class Normalization { per_term_variance, exact_variance };

inline std::string to_string(Normalization k) {
  return k == Normalization::per_term_variance ? "per-term-variance" : "exact-variance";
}

struct ModGaussianResult {
  Complex residual;
  Complex target;
  long double distance = 0;
  long double error = 0;  // certified error on the residual
  std::string warning;    // set when neither Condition 1 nor 2 is certified on the prefix
};

/// exp(-theta^2 t_n / 2) E exp(theta S_n / n^{1/rho}) with t_n = n^{1-2/rho} E X_1^2
/// (per-term) or sigma_n^2 / n^{2/rho} (exact).
inline ModGaussianResult mod_gaussian_residual(const TrigPoly& f, const LacunarySequence& seq, std::size_t n,
                                               const ModGaussianTarget& target, Complex theta, Normalization norm,
                                               const MgfOptions& opt = {}) {
  if (n == 0 || n > seq.size()) throw ConfigError("n out of range for mod_gaussian_residual");
  ModGaussianResult out;
  out.target = target.psi(theta);
  if (theta == Complex(0)) {
    out.residual = 1;
    out.distance = std::abs(out.residual - out.target);
    return out;
  }
  if (seq.size() >= 3) {
    auto c1 = check_growth_condition(seq, target.rho, 1);
    auto c2 = check_growth_condition(seq, target.rho, 2);
    if (!c1.ok() && !c2.ok()) out.warning = "neither Condition 1 nor Condition 2 holds on the prefix";
  }
  const long double nd = static_cast<long double>(n);
  const long double root = std::pow(nd, 1.0L / target.rho);
  long double t_n;
  if (norm == Normalization::per_term_variance) {
    t_n = std::pow(nd, 1.0L - 2.0L / target.rho) * to_long_double(f.second_moment());
  } else {
    t_n = to_long_double(sum_moment(f, seq, n, 2)) / (root * root);
  }
  auto mgf = exact_mgf(f, seq, n, theta / root, opt);
  const Complex damp = std::exp(-theta * theta * t_n / 2.0L);
  out.residual = damp * mgf.value;
  out.error = std::abs(damp) * mgf.error;
  out.distance = std::abs(out.residual - out.target);
  return out;
}

}  // namespace lacuna

#endif  // LACUNA_MGF_HPP
