#ifndef LACUNA_DEVIATION_HPP
#define LACUNA_DEVIATION_HPP

#include "lacuna/core.hpp"
#include "lacuna/sampling.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/trigpoly.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace lacuna {

enum class VarianceSource { exact, per_term };

inline std::string to_string(VarianceSource v) { return v == VarianceSource::exact ? "exact" : "per-term"; }

struct ScheduleRow {
  std::size_t n;
  long double z;         // z_n
  long double variance;  // E S_n^2, or n E X_1^2 for the per-term source
  long double x;         // z_n var   (speed)
  long double y;         // sqrt(z_n) var   (scaling)
  long double b;         // sqrt(z_n var)
};

enum class ScheduleKind { power, log_power };

/// z_n = n^{-p} (log n)^{-q}; `power` ignores q.
struct ScheduleParams {
  ScheduleKind kind = ScheduleKind::power;
  long double p = 0.5L;
  long double q = 0;
};

struct ScheduleAdmissibility {
  bool zn_n_increasing = false;      // z_n n -> infinity, as a strict increase over n_list
  bool zn_log2_decreasing = false;   // z_n (log n)^2 -> 0, as a strict decrease over n_list
  bool integer_ratio_theorem = false;
  bool large_gap_theorem = false;
};

struct ScalingSchedule {
  ScheduleParams params;
  VarianceSource source = VarianceSource::exact;
  std::vector<ScheduleRow> rows;
  ScheduleAdmissibility admissibility;

  const ScheduleRow& at(std::size_t n) const {
    for (const auto& r : rows) {
      if (r.n == n) return r;
    }
    throw ConfigError("schedule has no row for n = " + std::to_string(n));
  }
};

inline long double schedule_z(const ScheduleParams& p, std::size_t n) {
  const long double nd = static_cast<long double>(n);
  long double z = std::pow(nd, -p.p);
  if (p.kind == ScheduleKind::log_power) {
    if (n < 2) throw ConfigError("log-power schedule needs n >= 2");
    z *= std::pow(std::log(nd), -p.q);
  }
  return z;
}

inline ScheduleRow schedule_row(std::size_t n, long double z, long double variance) {
  if (!(z > 0)) throw ConfigError("z_n must be positive");
  if (!(variance > 0)) throw ConfigError("variance must be positive");
  return {n, z, variance, z * variance, std::sqrt(z) * variance, std::sqrt(z * variance)};
}

inline ScalingSchedule make_schedule(const ScheduleParams& params, const std::vector<std::size_t>& n_list,
                                     const std::function<long double(std::size_t)>& variance_fn,
                                     VarianceSource source = VarianceSource::exact) {
  if (n_list.empty()) throw ConfigError("n_list is empty");
  ScalingSchedule s{params, source, {}, {}};
  for (auto n : n_list) {
    if (n < 1) throw ConfigError("n must be positive");
    s.rows.push_back(schedule_row(n, schedule_z(params, n), variance_fn(n)));
  }
  // Trends need a tolerance: z_n (log n)^2 == 1 identically must not read as decreasing.
  constexpr long double rel = 1e-12L;
  bool inc = s.rows.size() >= 2, dec = s.rows.size() >= 2;
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const auto& a = s.rows[i - 1];
    const auto& b = s.rows[i];
    if (b.n <= a.n) throw ConfigError("n_list must be strictly increasing");
    long double ua = a.z * a.n, ub = b.z * b.n;
    if (!(ub > ua * (1 + rel))) inc = false;
    if (a.n < 2) continue;
    long double la = a.z * std::pow(std::log(static_cast<long double>(a.n)), 2);
    long double lb = b.z * std::pow(std::log(static_cast<long double>(b.n)), 2);
    if (!(lb < la * (1 - rel))) dec = false;
  }
  s.admissibility = {inc, dec, inc && dec, inc};
  return s;
}

struct GaussianTail {
  long double lower;
  long double upper;
};

/// Mills-ratio bracket phi(x) x / (x^2 + 1) <= P(G > x) <= phi(x) / x.
inline GaussianTail gaussian_tail(long double x) {
  if (!(x >= 0)) throw ConfigError("gaussian_tail needs x >= 0");
  if (x == 0) return {0.5L, 0.5L};
  const long double phi = std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi_v<long double>);
  return {phi * x / (x * x + 1), phi / x};
}

inline long double normal_sf(long double x) { return 0.5L * std::erfc(x / std::numbers::sqrt2_v<long double>); }

struct WilsonInterval {
  long double lo;
  long double hi;
};

inline constexpr long double kZ95 = 1.959963984540054L;

inline WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t trials, long double z = kZ95) {
  if (trials == 0) throw ConfigError("wilson interval needs trials > 0");
  const long double n = static_cast<long double>(trials);
  const long double p = static_cast<long double>(hits) / n;
  const long double z2 = z * z;
  const long double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const long double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max<long double>(0, centre - half), std::min<long double>(1, centre + half)};
}

struct MdpEstimate {
  std::size_t n = 0;
  long double t = 0;
  long double x_n = 0;
  long double y_n = 0;
  std::optional<long double> estimate;  // (1/x_n) log P(Z / y_n > t); empty on zero hits
  long double target = 0;               // -t^2/2
  long double lo = 0;                   // band from the Wilson interval
  long double hi = 0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;

  long double midpoint() const { return (lo + hi) / 2; }
};

/// Normal-approximation hit count: S_n / y_n > t means S_n / sigma_n > t b_n.
inline long double expected_hits(long double t, long double b_n, std::uint64_t samples) {
  return static_cast<long double>(samples) * normal_sf(t * b_n);
}

inline constexpr long double kMinExpectedHits = 50;

/// Monte Carlo estimate of (1/x_n) log P(Z/y_n > t) for Z = S_n (or T_n with `iid`).
inline MdpEstimate empirical_mdp_rate(const TrigPoly& f, const LacunarySequence& seq, const ScheduleRow& row, long double t,
                                      const McConfig& cfg, bool iid = false) {
  if (!(t >= 0)) throw ConfigError("t must be nonnegative");
  if (row.n == 0 || row.n > seq.size()) throw ConfigError("n out of range for empirical_mdp_rate");
  if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
  const long double expect = expected_hits(t, row.b, cfg.samples);
  if (expect < kMinExpectedHits) {
    throw ConfigError("infeasible at desk scale: about " + detail::fmt_real(expect) + " expected hits at t = " +
                      detail::fmt_real(t) + ", need " + detail::fmt_real(kMinExpectedHits));
  }
  const double threshold = static_cast<double>(t * row.y);
  const std::size_t n = row.n;
  std::optional<PhaseSampler> sampler;
  if (!iid) sampler.emplace(seq, n);
  auto shards = run_sharded<std::uint64_t>(cfg.samples, cfg.seed, cfg.shards, cfg.jobs,
                                           [&](ShardRng& rng, std::uint64_t count, std::uint64_t& hits) {
                                             std::vector<double> phases;
                                             for (std::uint64_t i = 0; i < count; ++i) {
                                               double s;
                                               if (iid) {
                                                 s = draw_iid_sum(f, n, rng);
                                               } else {
                                                 sampler->draw(rng, phases);
                                                 s = sum_of_phases(f, phases);
                                               }
                                               hits += s > threshold;
                                             }
                                           });
  MdpEstimate out{n, t, row.x, row.y, std::nullopt, -t * t / 2};
  for (auto h : shards) out.hits += h;
  out.samples = cfg.samples;
  auto w = wilson_interval(out.hits, out.samples);
  out.hi = std::log(w.hi) / row.x;
  if (out.hits == 0) {
    out.lo = -std::numeric_limits<long double>::infinity();
    return out;
  }
  out.lo = std::log(w.lo) / row.x;
  out.estimate = std::log(static_cast<long double>(out.hits) / out.samples) / row.x;
  return out;
}

struct TailRatio {
  long double x;
  long double p_hat;   // P(Z > x)
  long double ratio;   // p_hat / P(G > x)
  long double stderr_;
};

/// P(S_n / sigma > x) / P(G > x) at each x, from one shared set of draws.
inline std::vector<TailRatio> mc_tail_ratio(const TrigPoly& f, const LacunarySequence& seq, std::size_t n,
                                            long double sigma, const std::vector<long double>& xs, const McConfig& cfg) {
  if (!(sigma > 0)) throw ConfigError("sigma must be positive");
  PhaseSampler sampler(seq, n);
  auto shards = run_sharded<std::vector<std::uint64_t>>(
      cfg.samples, cfg.seed, cfg.shards, cfg.jobs, [&](ShardRng& rng, std::uint64_t count, std::vector<std::uint64_t>& hits) {
        hits.assign(xs.size(), 0);
        std::vector<double> phases;
        for (std::uint64_t i = 0; i < count; ++i) {
          sampler.draw(rng, phases);
          long double z = sum_of_phases(f, phases) / sigma;
          for (std::size_t k = 0; k < xs.size(); ++k) hits[k] += z > xs[k];
        }
      });
  std::vector<TailRatio> out;
  const long double N = static_cast<long double>(cfg.samples);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    std::uint64_t h = 0;
    for (const auto& s : shards) h += s.empty() ? 0 : s[k];
    long double p = h / N;
    long double g = normal_sf(xs[k]);
    out.push_back({xs[k], p, p / g, std::sqrt(p * (1 - p) / N) / g});
  }
  return out;
}

struct RssParams {
  long double theta;  // Theta
  long double s;
  long double x;
};

struct RssEnvelope {
  long double lower;
  long double upper;
  long double f_bar;  // bound on the correction function at x
};

/// Multiplicative envelope for P(Z > x) / P(G > x) built only from the stated bounds
///   |L(x)| <= 5 x^3 / (4 Theta),
///   f(x) <= (117 + 96 s exp(-s^{1/4} (1 - 3 sqrt(e) x / sqrt(s)) / 2)) / (1 - 3 sqrt(e) x / sqrt(s)).
inline RssEnvelope rss_envelope(const RssParams& p) {
  if (!(p.theta > 0)) throw ConfigError("Theta must be positive");
  if (!(p.s >= 1 && p.s <= 2 * p.theta * p.theta)) throw ConfigError("need 1 <= s <= 2 Theta^2");
  const long double root_e = std::sqrt(std::numbers::e_v<long double>);
  const long double root_s = std::sqrt(p.s);
  if (!(p.x >= 0 && p.x < root_s / (3 * root_e))) throw ConfigError("x outside [0, sqrt(s)/(3 sqrt(e)))");
  if (!(p.x < std::numbers::sqrt2_v<long double> * p.theta / (3 * root_e))) {
    throw ConfigError("x outside the range of the L(x) bound");
  }
  const long double gap = 1 - 3 * root_e * p.x / root_s;
  const long double f_bar = (117 + 96 * p.s * std::exp(-0.5L * std::pow(p.s, 0.25L) * gap)) / gap;
  const long double l_bar = 5 * p.x * p.x * p.x / (4 * p.theta);
  const long double corr = f_bar * (p.x + 1) / root_s;
  return {std::max<long double>(0, std::exp(-l_bar) * (1 - corr)), std::exp(l_bar) * (1 + corr), f_bar};
}

}  // namespace lacuna

#endif  // LACUNA_DEVIATION_HPP
