// Acceptance suite: one PASS/FAIL line per criterion, with wall time against its limit.
// Exit status is nonzero if any criterion fails.

#include "lacuna/corrgraph.hpp"
#include "lacuna/cumulants.hpp"
#include "lacuna/deviation.hpp"
#include "lacuna/mgf.hpp"
#include "lacuna/moments.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

using namespace lacuna;

namespace {

// Tolerances and sample sizes.
constexpr long double kStencilStep = 1e-3L;
constexpr double kStencilRelTol = 1e-5;
constexpr double kMcSigmas = 3;
constexpr std::uint64_t kMgfSamples = 1'000'000;
constexpr std::uint64_t kMdpSamples = 1'000'000;
constexpr long double kMdpT = 0.5L;
constexpr long double kMdpZPower = 2.0L / 3;
constexpr double kMinHits = 100;
constexpr std::uint64_t kRssSamples = 1'000'000;
constexpr int kOracleInstances = 200;

struct Outcome {
  bool pass;
  std::string detail;
};

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

LacunarySequence geo2(std::size_t n) { return build_sequence(GeometricSpec{2, 2}, n); }

Outcome crit1() {
  auto s = geo2(12);
  for (std::size_t n = 1; n <= 12; ++n) {
    auto v = sum_moment(TrigPoly::cosine(), s, n, 2);
    if (v != Rational(n, 2)) return {false, "n=" + std::to_string(n) + " gives " + to_string(v)};
  }
  return {true, "E S_n^2 = n/2 for n = 1..12"};
}

Outcome crit2() {
  auto s = geo2(12);
  for (std::size_t n = 2; n <= 12; ++n) {
    auto v = sum_moment(TrigPoly::telescope(), s, n, 2);
    if (v != 1) return {false, "n=" + std::to_string(n) + " gives " + to_string(v)};
  }
  return {true, "E S_n^2 = 1 for n = 2..12"};
}

Outcome crit3() {
  auto mu = single_moments(TrigPoly::cosine(), 4);
  auto t = cumulants_from_moments({mu.begin() + 1, mu.end()});
  auto r = rho_of(TrigPoly::cosine());
  bool ok = t[2] == Rational(1, 2) && t[4] == Rational(-3, 8) && r.rho == 4 && r.gamma_rho == Rational(-3, 8);
  return {ok, "gamma_2 = " + to_string(t[2]) + ", gamma_4 = " + to_string(t[4]) + ", rho = " + std::to_string(r.rho)};
}

Outcome crit4() {
  auto rep = verify_uncorrelation(TrigPoly::cosine(), geo2(8), build_graph(4, 1), 4, 8);
  return {rep.pass, std::to_string(rep.tested) + " instances over " + std::to_string(rep.set_pairs) + " separated set pairs"};
}

Outcome crit5() {
  auto s = geo2(10);
  const unsigned k = build_graph(6, 1).window;
  std::size_t checked = 0;
  for (std::size_t n = 2; n <= 10; ++n) {
    auto mu = mgf_taylor(TrigPoly::cosine(), s, n, 6);
    auto t = cumulants_from_moments({mu.begin() + 1, mu.end()});
    for (unsigned m = 2; m <= 6; ++m, ++checked) {
      auto bound = graph_cumulant_bound(n, 2 * k, Rational(1), m);
      if (abs(t[m]) > bound) {
        return {false, "n=" + std::to_string(n) + " m=" + std::to_string(m) + ": |" + to_string(t[m]) + "| > " + to_string(bound)};
      }
    }
  }
  return {true, std::to_string(checked) + " (n, m) pairs, k = " + std::to_string(k)};
}

Outcome crit6() {
  std::string detail;
  bool ok = true;
  for (long double A : {1.0L, 2.0L, 4.0L}) {
    long double worst = empirical_truncation_error(A, 1000, 2024);
    long double bound = exp_truncation_order(A).error_bound;
    ok = ok && worst <= bound;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%sA=%g: %.3Le <= %.3Lg", detail.empty() ? "" : "; ", static_cast<double>(A), worst, bound);
    detail += buf;
  }
  return {ok, detail};
}

Outcome crit7() {
  auto s = geo2(4);
  MgfOptions opt;
  opt.precision_bits = 60;
  auto g = [&](long double h) { return exact_mgf(TrigPoly::cosine(), s, 4, Complex(h, 0), opt).value.real(); };
  long double d2 = oracle::stencil_derivative(g, 2, 2, kStencilStep);
  double rel = static_cast<double>(std::fabs(d2 - 2) / 2);
  auto ex = exact_mgf(TrigPoly::cosine(), s, 4, Complex(0.5L, 0));
  auto mc = mc_mgf(TrigPoly::cosine(), s, 4, Complex(0.5L, 0), McConfig{kMgfSamples, 1, 16, jobs()});
  long double z = std::abs(mc.estimate - ex.value) / mc.stderr_;
  char buf[160];
  std::snprintf(buf, sizeof buf, "stencil rel err %.2e; |mc - exact| = %.2Lf SE", rel, z);
  return {rel <= kStencilRelTol && z <= kMcSigmas, buf};
}

Outcome crit8() {
  auto s = build_sequence(ScheduleSpec{2, 4}, 6);
  auto target = ModGaussianTarget::of(TrigPoly::cosine());
  std::string detail;
  bool ok = target.rho == 4;
  long double prev_hi = std::numeric_limits<long double>::infinity();
  for (std::size_t n = 3; n <= 6; ++n) {
    auto r = mod_gaussian_residual(TrigPoly::cosine(), s, n, target, Complex(1), Normalization::per_term_variance);
    // strict decrease must survive the certified error on both ends
    ok = ok && r.distance + r.error < prev_hi;
    prev_hi = r.distance - r.error;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%sn=%zu: %.3Le", detail.empty() ? "" : ", ", n, r.distance);
    detail += buf;
  }
  return {ok, detail};
}

Outcome crit9() {
  const std::vector<std::size_t> ns{256, 512, 1024};
  auto s = geo2(ns.back());
  auto sched = make_schedule({ScheduleKind::power, kMdpZPower, 0}, ns, [](std::size_t n) { return n / 2.0L; });
  McConfig cfg{kMdpSamples, 1, 16, jobs()};
  const long double target = -kMdpT * kMdpT / 2;
  bool ok = sched.admissibility.integer_ratio_theorem;
  long double prev_s = std::numeric_limits<long double>::infinity(), prev_t = prev_s;
  std::string detail;
  for (auto n : ns) {
    const auto& row = sched.at(n);
    ok = ok && expected_hits(kMdpT, row.b, kMdpSamples) >= kMinHits;
    auto dep = empirical_mdp_rate(TrigPoly::cosine(), s, row, kMdpT, cfg);
    auto iid = empirical_mdp_rate(TrigPoly::cosine(), s, row, kMdpT, cfg, true);
    bool overlap = dep.lo <= iid.hi && iid.lo <= dep.hi;
    long double ds = std::fabs(dep.midpoint() - target), dt = std::fabs(iid.midpoint() - target);
    ok = ok && overlap && ds < prev_s && dt < prev_t;
    prev_s = ds;
    prev_t = dt;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%sn=%zu S[%.4Lf,%.4Lf] T[%.4Lf,%.4Lf]", detail.empty() ? "" : "; ", n, dep.lo, dep.hi, iid.lo,
                  iid.hi);
    detail += buf;
  }
  return {ok, detail + " (target " + std::to_string(static_cast<double>(target)) + ")"};
}

Outcome crit10() {
  const std::vector<long double> xs{0, 0.5L, 1};
  auto s = geo2(10);
  long double sigma = std::sqrt(to_long_double(sum_moment(TrigPoly::cosine(), s, 10, 2)));
  auto ratios = mc_tail_ratio(TrigPoly::cosine(), s, 10, sigma, xs, McConfig{kRssSamples, 1, 16, jobs()});
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto e = rss_envelope({100, 2e4L, xs[i]});
    ok = ok && e.lower <= ratios[i].ratio && ratios[i].ratio <= e.upper;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%sx=%.1Lf: %.4Lf in [%.3Lf, %.3Lf]", detail.empty() ? "" : "; ", xs[i], ratios[i].ratio, e.lower,
                  e.upper);
    detail += buf;
  }
  return {ok, detail};
}

Outcome crit11() {
  std::mt19937_64 rng(20240611);
  int solutions = 0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const int D = 1 + static_cast<int>(rng() % 3);
    std::map<int, Rational> c;
    for (int d = 1; d <= D; ++d) {
      if (rng() % 4) c[d] = Rational(static_cast<long long>(rng() % 11) - 5, 1 + rng() % 6);
    }
    c[D] = Rational(static_cast<long long>(1 + rng() % 5), 1 + rng() % 6);
    TrigPoly f(c);
    const std::size_t r = 1 + rng() % 8;
    std::vector<long long> small;
    std::vector<BigInt> big;
    for (std::size_t j = 0; j < r; ++j) {
      small.push_back(1 + static_cast<long long>(rng() % 16));
      big.emplace_back(small.back());
    }
    Rational fast = weighted_zero_sum(big, f).value;
    Rational slow = oracle::naive_zero_sum_small(small, f);
    if (fast != slow) return {false, "instance " + std::to_string(i) + ": " + to_string(fast) + " vs " + to_string(slow)};
    solutions += slow != 0;
  }
  return {true, std::to_string(kOracleInstances) + " instances, " + std::to_string(solutions) + " with nonzero value"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"cosine variance", 1, crit1},         {"telescoping degeneration", 1, crit2},
      {"cumulant constants", 1, crit3},      {"correlation-graph oracle", 120, crit4},
      {"cumulant bound", 300, crit5},        {"exp truncation", 1, crit6},
      {"mgf consistency", 60, crit7},        {"mod-gaussian trend", 600, crit8},
      {"mdp band", 900, crit9},              {"rss envelope", 120, crit10},
      {"diophantine oracle", 60, crit11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass && secs <= all[i].limit_s;
    failures += !pass;
    std::printf("%s %2zu %-26s %8.2fs / %5.0fs  %s\n", pass ? "PASS" : "FAIL", i + 1, all[i].name, secs, all[i].limit_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
  return failures == 0 ? 0 : 1;
}
