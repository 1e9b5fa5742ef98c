#ifndef LACUNA_DIOPHANTINE_HPP
#define LACUNA_DIOPHANTINE_HPP

#include "lacuna/core.hpp"
#include "lacuna/sequences.hpp"
#include "lacuna/trigpoly.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lacuna {

/// Result of sum_{d_1..d_r} c_{d_1} ... c_{d_r} 1{sum_j d_j a_{t_j} = 0}.
struct WeightedCount {
  Rational value = 0;
  std::uint64_t solutions_enumerated = 0;  // digit tuples with nonzero weight hitting zero
  std::uint64_t nodes = 0;                 // search nodes visited
};

/// Counts search nodes against a budget and throws once it is exhausted.
class NodeBudget {
 public:
  explicit NodeBudget(std::uint64_t limit) : limit_(limit) {}

  void charge(std::uint64_t n = 1) {
    used_ += n;
    if (used_ > limit_) {
      throw ResourceError("enumeration budget of " + std::to_string(limit_) +
                          " nodes exceeded; raise --budget or LACUNA_BUDGET");
    }
  }
  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000'000ULL;

namespace detail {

// Digits with nonzero coefficient, their integer numerators over the common denominator.
struct DigitTable {
  std::vector<int> digits;
  std::vector<BigInt> weights;
  BigInt denominator;
  int degree;

  explicit DigitTable(const TrigPoly& f) : denominator(f.common_denominator()), degree(f.degree()) {
    for (int d = -f.degree(); d <= f.degree(); ++d) {
      Rational c = f.coeff(d);
      if (c == 0) continue;
      digits.push_back(d);
      Rational scaled = c * denominator;
      weights.push_back(numerator(scaled));
    }
  }
};

struct Bucket {
  BigInt weight = 0;
  std::uint64_t count = 0;
};

using BucketMap = std::unordered_map<BigInt, Bucket>;

// Depth-first enumeration of positions [begin, end) with triangle-inequality pruning:
// a partial sum is dropped when |s| exceeds `slack` plus the reach of the remaining
// positions of this half.
inline void enumerate_half(std::span<const BigInt> terms, std::size_t begin, std::size_t end, const DigitTable& table,
                           const std::vector<BigInt>& reach_after, const BigInt& slack, BucketMap& out,
                           NodeBudget& budget) {
  struct Frame {
    std::size_t pos;
    BigInt sum;
    BigInt weight;
  };
  std::vector<Frame> stack;
  stack.push_back({begin, BigInt(0), BigInt(1)});
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    budget.charge();
    if (fr.pos == end) {
      auto& b = out[fr.sum];
      b.weight += fr.weight;
      ++b.count;
      continue;
    }
    for (std::size_t i = 0; i < table.digits.size(); ++i) {
      BigInt s = fr.sum + table.digits[i] * terms[fr.pos];
      BigInt limit = slack + (reach_after[fr.pos + 1] - reach_after[end]);
      if (boost::multiprecision::abs(s) > limit) continue;
      stack.push_back({fr.pos + 1, std::move(s), fr.weight * table.weights[i]});
    }
  }
}

}  // namespace detail

/// E prod_j X_{t_j} for the given frequencies a_{t_1}..a_{t_r}, by meet-in-the-middle
/// over the split ceil(r/2) with big-integer keyed partial sums.
inline WeightedCount weighted_zero_sum(std::span<const BigInt> terms, const TrigPoly& f,
                                       std::uint64_t budget_nodes = kDefaultNodeBudget) {
  if (terms.empty()) throw ConfigError("weighted_zero_sum needs at least one term");
  for (const auto& t : terms) {
    if (t <= 0) throw ConfigError("weighted_zero_sum terms must be positive");
  }
  const std::size_t r = terms.size();
  const std::size_t split = (r + 1) / 2;
  detail::DigitTable table(f);
  NodeBudget budget(budget_nodes);

  // reach_after[i] = D * sum_{j >= i} t_j
  std::vector<BigInt> reach_after(r + 1, BigInt(0));
  for (std::size_t i = r; i-- > 0;) reach_after[i] = reach_after[i + 1] + table.degree * terms[i];

  detail::BucketMap left;
  detail::BucketMap right;
  detail::enumerate_half(terms, 0, split, table, reach_after, reach_after[split], left, budget);
  if (split < r) {
    // A right sum must cancel a surviving left sum; those are bounded both by the
    // left reach and by the right reach.
    BigInt slack = std::min(BigInt(reach_after[0] - reach_after[split]), reach_after[split]);
    detail::enumerate_half(terms, split, r, table, reach_after, slack, right, budget);
  } else {
    right[BigInt(0)] = {BigInt(1), 1};
  }

  WeightedCount out;
  out.nodes = budget.used();
  BigInt total = 0;
  const auto& small = left.size() <= right.size() ? left : right;
  const auto& large = left.size() <= right.size() ? right : left;
  for (const auto& [s, b] : small) {
    auto it = large.find(-s);
    if (it == large.end()) continue;
    total += b.weight * it->second.weight;
    out.solutions_enumerated += b.count * it->second.count;
  }
  out.value = Rational(total, boost::multiprecision::pow(table.denominator, static_cast<unsigned>(r)));
  return out;
}

inline WeightedCount weighted_zero_sum(const std::vector<BigInt>& terms, const TrigPoly& f,
                                       std::uint64_t budget_nodes = kDefaultNodeBudget) {
  return weighted_zero_sum(std::span<const BigInt>(terms), f, budget_nodes);
}

/// E prod_j X_{l_j} for 1-based indices into the sequence.
inline Rational mixed_moment(const LacunarySequence& seq, std::span<const std::size_t> indices, const TrigPoly& f) {
  std::vector<BigInt> terms;
  terms.reserve(indices.size());
  for (auto i : indices) terms.push_back(seq.term(i));
  return weighted_zero_sum(terms, f).value;
}

struct PairCollision {
  std::size_t count = 0;
  int d = 1;
  int d_prime = 1;
};

/// max over d, d' in {1..D} of #{(l, l') in {1..n}^2 : d a_l = d' a_l', l != l'}.
inline PairCollision pair_collision_count(const LacunarySequence& seq, const TrigPoly& f, std::size_t n) {
  if (n == 0 || n > seq.size()) throw ConfigError("n out of range for pair_collision_count");
  PairCollision best{0, f.degree(), 1};
  bool first = true;
  for (int d = f.degree(); d >= 1; --d) {
    for (int dp = 1; dp <= f.degree(); ++dp) {
      std::unordered_map<BigInt, std::vector<std::size_t>> rhs;
      for (std::size_t l = 0; l < n; ++l) rhs[dp * seq[l]].push_back(l);
      std::size_t count = 0;
      for (std::size_t l = 0; l < n; ++l) {
        auto it = rhs.find(d * seq[l]);
        if (it == rhs.end()) continue;
        for (auto lp : it->second) count += (lp != l);
      }
      if (first || count > best.count) {
        best = {count, d, dp};
        first = false;
      }
    }
  }
  return best;
}

}  // namespace lacuna

#endif  // LACUNA_DIOPHANTINE_HPP
