#ifndef LACUNA_SAMPLING_HPP
#define LACUNA_SAMPLING_HPP

#include "lacuna/core.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/trigpoly.hpp"

#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <thread>
#include <vector>

namespace lacuna {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-shard random source. Uniforms are 53-bit dyadic doubles in [0,1).
class ShardRng {
 public:
  ShardRng(std::uint64_t seed, std::uint64_t shard) : eng_(splitmix64(seed ^ splitmix64(shard + 1))) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::uint64_t bits() { return eng_(); }
  std::uint64_t below(std::uint64_t bound) { return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(eng_); }

 private:
  std::mt19937_64 eng_;
};

/// Draws the phase vector (frac(a_1 U), ..., frac(a_n U)) for a single uniform U.
///
/// Integer-ratio sequences use the mixed-radix expansion of U: with r_j = a_{j+1}/a_j,
/// x_n is uniform and x_j = (delta_j + x_{j+1}) / r_j with independent digits
/// delta_j uniform on {0..r_j-1}. The backward recursion is contracting, so no
/// precision is lost however large a_n grows. Other sequences fall back to an exact
/// fixed-point U with enough bits that every frac(a_j U) keeps 64 significant bits.
class PhaseSampler {
 public:
  PhaseSampler(const LacunarySequence& seq, std::size_t n) : n_(n) {
    if (n == 0 || n > seq.size()) throw ConfigError("n out of range for sampler");
    bool integer = true;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (seq[j + 1] % seq[j] != 0) integer = false;
    }
    if (integer) {
      for (std::size_t j = 0; j + 1 < n; ++j) {
        BigInt r = seq[j + 1] / seq[j];
        if (r > (BigInt(1) << 53)) {
          radix_.push_back(0);  // digit resolution below double precision
          shift_.push_back(0);
        } else {
          auto v = r.convert_to<std::uint64_t>();
          radix_.push_back(v);
          shift_.push_back(std::has_single_bit(v) ? static_cast<unsigned>(std::countr_zero(v)) : 0);
        }
      }
    } else {
      mixed_ = false;
      terms_.assign(seq.terms().begin(), seq.terms().begin() + static_cast<std::ptrdiff_t>(n));
      bits_ = boost::multiprecision::msb(terms_.back()) + 1 + 64;
    }
  }

  bool mixed_radix() const { return mixed_; }

  void draw(ShardRng& rng, std::vector<double>& phases) const {
    phases.resize(n_);
    if (mixed_) {
      double x = rng.uniform();
      phases[n_ - 1] = x;
      std::uint64_t pool = 0;
      unsigned avail = 0;
      for (std::size_t j = n_ - 1; j-- > 0;) {
        std::uint64_t r = radix_[j];
        std::uint64_t digit;
        if (r == 0) {
          x = rng.uniform();
          phases[j] = x;
          continue;
        }
        if (unsigned b = shift_[j]; b > 0) {
          // power-of-two radix: take b bits from a buffered 64-bit draw
          if (avail < b) {
            pool = rng.bits();
            avail = 64;
          }
          digit = pool & ((std::uint64_t{1} << b) - 1);
          pool >>= b;
          avail -= b;
        } else {
          digit = rng.below(r);
        }
        x = (static_cast<double>(digit) + x) / static_cast<double>(r);
        phases[j] = x;
      }
      return;
    }
    BigInt u = 0;
    for (unsigned filled = 0; filled < bits_; filled += 64) u = (u << 64) | BigInt(rng.bits());
    const BigInt mask = (BigInt(1) << bits_) - 1;
    u &= mask;
    for (std::size_t j = 0; j < n_; ++j) {
      BigInt frac = (terms_[j] * u) & mask;
      BigInt top = frac >> (bits_ - 64);
      phases[j] = static_cast<double>(top.convert_to<std::uint64_t>() >> 11) * 0x1.0p-53;
    }
  }

 private:
  std::size_t n_;
  bool mixed_ = true;
  std::vector<std::uint64_t> radix_;
  std::vector<unsigned> shift_;
  std::vector<BigInt> terms_;
  unsigned bits_ = 0;
};

inline double sum_of_phases(const TrigPoly& f, const std::vector<double>& phases) {
  double s = 0;
  for (double x : phases) s += f.eval_unit(x);
  return s;
}

/// T_n^f = sum_j f(U_j) with independent uniforms.
inline double draw_iid_sum(const TrigPoly& f, std::size_t n, ShardRng& rng) {
  double s = 0;
  for (std::size_t j = 0; j < n; ++j) s += f.eval_unit(rng.uniform());
  return s;
}

/// Splits `samples` over `shards` deterministic streams and runs them on up to `jobs`
/// threads. The shard count, not the thread count, fixes the random streams, so
/// results depend only on (seed, shards).
template <class Acc>
std::vector<Acc> run_sharded(std::uint64_t samples, std::uint64_t seed, unsigned shards, unsigned jobs,
                             const std::function<void(ShardRng&, std::uint64_t, Acc&)>& body) {
  if (shards == 0) shards = 1;
  std::vector<Acc> acc(shards);
  auto work = [&](unsigned shard) {
    std::uint64_t count = samples / shards + (shard < samples % shards ? 1 : 0);
    ShardRng rng(seed, shard);
    body(rng, count, acc[shard]);
  };
  jobs = std::max(1u, std::min(jobs, shards));
  if (jobs == 1) {
    for (unsigned s = 0; s < shards; ++s) work(s);
    return acc;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      for (unsigned s = t; s < shards; s += jobs) work(s);
    });
  }
  for (auto& th : pool) th.join();
  return acc;
}

struct McConfig {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned shards = 16;
  unsigned jobs = 1;
};

}  // namespace lacuna

#endif  // LACUNA_SAMPLING_HPP
