#ifndef LACUNA_CORRGRAPH_HPP
#define LACUNA_CORRGRAPH_HPP

#include "lacuna/core.hpp"
#include "lacuna/diophantine.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/trigpoly.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace lacuna {

/// Path-power graph on the naturals: i ~ j iff |i - j| <= k, with k the smallest
/// integer such that 2^k >= M D. For integer-ratio sequences this is a correlation
/// graph of range M for X_n = f(a_n U).
struct CorrelationGraph {
  unsigned range = 2;  // M
  int degree_f = 1;    // D
  unsigned window = 1; // k

  bool adjacent(std::size_t i, std::size_t j) const {
    std::size_t gap = i > j ? i - j : j - i;
    return gap <= window;
  }

  /// Maximal degree realized on {1..n}.
  std::size_t max_degree(std::size_t n) const {
    std::size_t best = 0;
    for (std::size_t v = 1; v <= n; ++v) {
      std::size_t lo = v > window ? v - window : 1;
      std::size_t hi = std::min(n, v + window);
      best = std::max(best, hi - lo);
    }
    return best;
  }

  /// No edge between any element of a and any element of b.
  bool separated(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    for (auto x : a) {
      for (auto y : b) {
        if (adjacent(x, y)) return false;
      }
    }
    return true;
  }
};

inline CorrelationGraph build_graph(unsigned M, int D) {
  if (M < 2) throw ConfigError("correlation graph range M must be at least 2");
  if (D < 1) throw ConfigError("degree D must be at least 1");
  unsigned k = 0;
  const unsigned long long target = static_cast<unsigned long long>(M) * static_cast<unsigned long long>(D);
  while ((1ULL << k) < target) ++k;
  return {M, D, k};
}

struct UncorrelationCounterexample {
  std::vector<std::size_t> v_picks;  // v_1..v_r (1-based)
  std::vector<std::size_t> w_picks;  // w_1..w_s
  Rational joint;                    // E prod X_v prod X_w
  Rational product;                  // E prod X_v * E prod X_w
};

struct UncorrelationReport {
  bool pass = true;
  std::uint64_t set_pairs = 0;  // ordered pairs (V1, V2) of disjoint, nonempty, separated sets
  std::uint64_t tested = 0;     // distinct (v-multiset, w-multiset) instances checked
  std::optional<UncorrelationCounterexample> counterexample;
};

namespace detail {

// Multisets (as sorted vectors) of size 1..max_size drawn from `support`, each using
// every support element at least once.
inline void multisets_covering(const std::vector<std::size_t>& support, std::size_t max_size,
                               std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> mult(support.size(), 1);
  if (support.size() > max_size) return;
  // distribute the extra picks over the support
  std::size_t extra_max = max_size - support.size();
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos == support.size()) {
      std::vector<std::size_t> ms;
      for (std::size_t i = 0; i < support.size(); ++i) ms.insert(ms.end(), mult[i], support[i]);
      out.push_back(std::move(ms));
      return;
    }
    for (std::size_t add = 0; add <= left; ++add) {
      mult[pos] = 1 + add;
      rec(pos + 1, left - add);
    }
    mult[pos] = 1;
  };
  rec(0, extra_max);
}

class MixedMomentCache {
 public:
  MixedMomentCache(const LacunarySequence& seq, const TrigPoly& f) : seq_(seq), f_(f) {}

  const Rational& get(const std::vector<std::size_t>& picks) {
    auto it = cache_.find(picks);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(picks, mixed_moment(seq_, picks, f_)).first->second;
  }

 private:
  const LacunarySequence& seq_;
  const TrigPoly& f_;
  std::map<std::vector<std::size_t>, Rational> cache_;
};

inline bool check_instance(MixedMomentCache& cache, const std::vector<std::size_t>& v, const std::vector<std::size_t>& w,
                           UncorrelationReport& rep) {
  std::vector<std::size_t> joint = v;
  joint.insert(joint.end(), w.begin(), w.end());
  std::sort(joint.begin(), joint.end());
  Rational lhs = cache.get(joint);
  Rational rhs = cache.get(v) * cache.get(w);
  ++rep.tested;
  if (lhs == rhs) return true;
  rep.pass = false;
  rep.counterexample = UncorrelationCounterexample{v, w, lhs, rhs};
  return false;
}

inline void require_graph_hypotheses(const LacunarySequence& seq, std::size_t n) {
  if (n == 0 || n > seq.size()) throw ConfigError("n out of range for verify_uncorrelation");
  if (n >= 2 && !check_integer_ratios(seq.prefix(n)).ok()) {
    throw ConfigError("verify_uncorrelation requires integer ratios a_{n+1}/a_n >= 2; the divisibility estimate "
                      "does not hold for general lacunary sequences");
  }
}

}  // namespace detail

/// Exhaustive check of the uncorrelation identity
///   E prod X_{v_i} prod X_{w_j} = E prod X_{v_i} * E prod X_{w_j}
/// for every pair of separated vertex sets in {1..n} and every choice of picks with
/// r + s <= M. A pick multiset pair is covered by some (V1, V2) exactly when the two
/// supports are disjoint and separated, so each distinct instance is checked once.
inline UncorrelationReport verify_uncorrelation(const TrigPoly& f, const LacunarySequence& seq,
                                                const CorrelationGraph& graph, unsigned M, std::size_t n) {
  detail::require_graph_hypotheses(seq, n);
  if (n > 12 || M > 6) throw ConfigError("exhaustive verification is capped at n <= 12, M <= 6; use the sampled mode");
  if (M < 2) throw ConfigError("M must be at least 2");

  UncorrelationReport rep;
  // Count ordered separated set pairs: assign each vertex to none / V1 / V2.
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<std::size_t> a, b;
    std::uint64_t c = code;
    for (std::size_t v = 1; v <= n; ++v, c /= 3) {
      if (c % 3 == 1) a.push_back(v);
      if (c % 3 == 2) b.push_back(v);
    }
    if (!a.empty() && !b.empty() && graph.separated(a, b)) ++rep.set_pairs;
  }

  // Supports of size <= M - 1 for either side.
  std::vector<std::vector<std::size_t>> supports;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<unsigned>(__builtin_popcount(mask)) > M - 1) continue;
    std::vector<std::size_t> s;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1u << v)) s.push_back(v + 1);
    }
    supports.push_back(std::move(s));
  }

  detail::MixedMomentCache cache(seq, f);
  for (const auto& sa : supports) {
    std::vector<std::vector<std::size_t>> va;
    detail::multisets_covering(sa, M - 1, va);
    for (const auto& sb : supports) {
      if (sa.size() + sb.size() > M) continue;
      bool disjoint = std::none_of(sa.begin(), sa.end(), [&](auto x) { return std::binary_search(sb.begin(), sb.end(), x); });
      if (!disjoint || !graph.separated(sa, sb)) continue;
      std::vector<std::vector<std::size_t>> wb;
      detail::multisets_covering(sb, M - 1, wb);
      for (const auto& v : va) {
        for (const auto& w : wb) {
          if (v.size() + w.size() > M) continue;
          if (!detail::check_instance(cache, v, w, rep)) return rep;
        }
      }
    }
  }
  return rep;
}

/// Randomized variant for prefixes beyond the exhaustive cap. Draws `samples` instances:
/// a random separated pair of supports and random picks with r + s <= M.
inline UncorrelationReport verify_uncorrelation_sampled(const TrigPoly& f, const LacunarySequence& seq,
                                                        const CorrelationGraph& graph, unsigned M, std::size_t n,
                                                        std::uint64_t samples, std::uint64_t seed) {
  detail::require_graph_hypotheses(seq, n);
  if (M < 2) throw ConfigError("M must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> vertex(1, n);
  UncorrelationReport rep;
  detail::MixedMomentCache cache(seq, f);
  std::uint64_t attempts = 0;
  while (rep.tested < samples && attempts < 1000 * samples) {
    ++attempts;
    std::uniform_int_distribution<unsigned> total_picks(2, M);
    unsigned t = total_picks(rng);
    std::uniform_int_distribution<unsigned> split(1, t - 1);
    unsigned r = split(rng);
    std::vector<std::size_t> v(r), w(t - r);
    for (auto& x : v) x = vertex(rng);
    for (auto& x : w) x = vertex(rng);
    std::sort(v.begin(), v.end());
    std::sort(w.begin(), w.end());
    bool disjoint = std::none_of(v.begin(), v.end(), [&](auto x) { return std::binary_search(w.begin(), w.end(), x); });
    if (!disjoint || !graph.separated(v, w)) continue;
    ++rep.set_pairs;
    if (!detail::check_instance(cache, v, w, rep)) return rep;
  }
  return rep;
}

}  // namespace lacuna

#endif  // LACUNA_CORRGRAPH_HPP
