#include "lacuna/deviation.hpp"
#include "lacuna/moments.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace lacuna;

namespace {

LacunarySequence geo2(std::size_t n) { return build_sequence(GeometricSpec{2, 2}, n); }

// Wilson bounds as the two roots of (p_hat - p)^2 = z^2 p (1 - p) / n, found by bisection.
std::pair<double, double> score_roots(double hits, double n, double z) {
  const double ph = hits / n;
  auto g = [&](double p) { return (ph - p) * (ph - p) - z * z * p * (1 - p) / n; };
  auto bisect = [&](double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      double mid = (lo + hi) / 2;
      ((g(lo) > 0) == (g(mid) > 0) ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
  };
  return {ph == 0 ? 0.0 : bisect(0, ph), ph == 1 ? 1.0 : bisect(ph, 1)};
}

}  // namespace

TEST(Schedule, Identities) {
  ScheduleParams p{ScheduleKind::power, 2.0L / 3, 0};
  auto s = make_schedule(p, {4, 16, 64, 256}, [](std::size_t n) { return n / 2.0L; });
  for (const auto& r : s.rows) {
    EXPECT_NEAR(static_cast<double>(r.y * r.y / (r.x * r.variance)), 1.0, 1e-15);
    EXPECT_NEAR(static_cast<double>(r.b * r.b / r.x), 1.0, 1e-15);
    EXPECT_NEAR(static_cast<double>(r.z), std::pow(static_cast<double>(r.n), -2.0 / 3), 1e-15);
  }
  EXPECT_EQ(s.at(16).n, 16u);
  EXPECT_THROW(s.at(5), ConfigError);
}

TEST(Schedule, Admissibility) {
  auto var = [](std::size_t n) { return n / 2.0L; };
  std::vector<std::size_t> ns{100, 1000, 10000, 100000};
  auto root = make_schedule({ScheduleKind::power, 0.5L, 0}, ns, var);
  EXPECT_TRUE(root.admissibility.zn_n_increasing);
  EXPECT_TRUE(root.admissibility.zn_log2_decreasing);
  EXPECT_TRUE(root.admissibility.integer_ratio_theorem);

  auto log2 = make_schedule({ScheduleKind::log_power, 0, 2}, ns, var);
  EXPECT_TRUE(log2.admissibility.zn_n_increasing);
  EXPECT_FALSE(log2.admissibility.zn_log2_decreasing);
  EXPECT_FALSE(log2.admissibility.integer_ratio_theorem);
  EXPECT_TRUE(log2.admissibility.large_gap_theorem);

  auto clt = make_schedule({ScheduleKind::power, 1, 0}, ns, var);
  EXPECT_FALSE(clt.admissibility.zn_n_increasing);
  EXPECT_FALSE(clt.admissibility.large_gap_theorem);
}

TEST(Schedule, Errors) {
  EXPECT_THROW(make_schedule({}, {}, [](std::size_t) { return 1.0L; }), ConfigError);
  EXPECT_THROW(make_schedule({}, {4, 2}, [](std::size_t) { return 1.0L; }), ConfigError);
  EXPECT_THROW(make_schedule({}, {4}, [](std::size_t) { return 0.0L; }), ConfigError);
  EXPECT_THROW(schedule_row(3, 0, 1), ConfigError);
}

TEST(GaussianTail, Examples) {
  auto z = gaussian_tail(0);
  EXPECT_EQ(z.lower, 0.5L);
  EXPECT_EQ(z.upper, 0.5L);
  auto t = gaussian_tail(2);
  EXPECT_LE(t.lower, 0.02275L);
  EXPECT_GE(t.upper, 0.02275L);
  EXPECT_THROW(gaussian_tail(-1), ConfigError);
}

TEST(GaussianTail, BracketContainsOracle) {
  for (int i = 1; i <= 80; ++i) {
    double x = i / 10.0;
    double p = oracle::normal_tail_hp(x);
    auto b = gaussian_tail(x);
    EXPECT_LE(static_cast<double>(b.lower), p * (1 + 1e-12)) << x;
    EXPECT_GE(static_cast<double>(b.upper), p * (1 - 1e-12)) << x;
    EXPECT_NEAR(static_cast<double>(normal_sf(x)) / p, 1.0, 1e-12) << x;
  }
}

TEST(GaussianTail, LogRateApproachesOne) {
  double prev = std::numeric_limits<double>::infinity();
  for (double x : {2.0, 4.0, 6.0, 8.0}) {
    double r = -std::log(oracle::normal_tail_hp(x)) / (x * x / 2);
    EXPECT_GT(r, 1.0);
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_LT(prev, 1.15);
}

TEST(Wilson, MatchesScoreTestInversion) {
  for (auto [h, n] : std::vector<std::pair<int, int>>{{0, 50}, {1, 50}, {20, 100}, {500, 1000}, {999, 1000}, {1000, 1000}}) {
    auto w = wilson_interval(h, n);
    auto [lo, hi] = score_roots(h, n, static_cast<double>(kZ95));
    EXPECT_NEAR(static_cast<double>(w.lo), lo, 1e-12) << h << "/" << n;
    EXPECT_NEAR(static_cast<double>(w.hi), hi, 1e-12) << h << "/" << n;
  }
  EXPECT_THROW(wilson_interval(0, 0), ConfigError);
}

TEST(Mdp, CentralProbabilityIsAboutHalf) {
  auto s = geo2(12);
  auto row = schedule_row(12, std::pow(12.0L, -0.5L), to_long_double(sum_moment(TrigPoly::cosine(), s, 12, 2)));
  auto r = empirical_mdp_rate(TrigPoly::cosine(), s, row, 0, McConfig{100'000, 1, 16, 4});
  double p = static_cast<double>(r.hits) / static_cast<double>(r.samples);
  EXPECT_GE(p, 0.4);
  EXPECT_LE(p, 0.6);
  EXPECT_EQ(r.target, 0);
  ASSERT_TRUE(r.estimate.has_value());
  EXPECT_LE(r.lo, *r.estimate);
  EXPECT_GE(r.hi, *r.estimate);
}

TEST(Mdp, InfeasibleGuard) {
  auto s = geo2(12);
  auto row = schedule_row(12, 0.5L, 6);
  try {
    empirical_mdp_rate(TrigPoly::cosine(), s, row, 6, McConfig{10'000, 1, 16, 1});
    FAIL() << "expected refusal";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible at desk scale"), std::string::npos);
  }
}

TEST(Mdp, ZeroHitsGiveOneSidedBound) {
  // the telescoped sum never exceeds 2, but the normal approximation expects hits past 2.5
  auto s = geo2(8);
  auto row = schedule_row(8, 1, 1);
  auto r = empirical_mdp_rate(TrigPoly::telescope(), s, row, 2.5L, McConfig{100'000, 1, 16, 2});
  EXPECT_EQ(r.hits, 0u);
  EXPECT_FALSE(r.estimate.has_value());
  EXPECT_TRUE(std::isinf(r.lo));
  EXPECT_LT(r.hi, 0);
}

TEST(Mdp, DeterministicAcrossJobs) {
  auto s = geo2(32);
  auto row = schedule_row(32, std::pow(32.0L, -0.5L), 16);
  auto a = empirical_mdp_rate(TrigPoly::cosine(), s, row, 0.5L, McConfig{40'000, 9, 16, 1});
  auto b = empirical_mdp_rate(TrigPoly::cosine(), s, row, 0.5L, McConfig{40'000, 9, 16, 6});
  EXPECT_EQ(a.hits, b.hits);
}

TEST(Mdp, DependentAndIidBandsOverlap) {
  const std::size_t n = 256;
  auto s = geo2(n);
  auto row = schedule_row(n, std::pow(static_cast<long double>(n), -2.0L / 3), n / 2.0L);
  McConfig cfg{200'000, 4, 16, 4};
  auto dep = empirical_mdp_rate(TrigPoly::cosine(), s, row, 0.5L, cfg);
  auto iid = empirical_mdp_rate(TrigPoly::cosine(), s, row, 0.5L, cfg, true);
  EXPECT_LE(dep.lo, iid.hi);
  EXPECT_LE(iid.lo, dep.hi);
}

TEST(TailRatio, SharesDrawsWithMdpEstimator) {
  // S_10 is skewed (E S^3 != 0), so the ratio at 0 is not 1; the hit count must
  // still match the MDP estimator on the same streams.
  auto s = geo2(10);
  McConfig cfg{100'000, 2, 16, 4};
  auto r = mc_tail_ratio(TrigPoly::cosine(), s, 10, std::sqrt(5.0L), {0.0L, 1.0L}, cfg);
  auto m = empirical_mdp_rate(TrigPoly::cosine(), s, schedule_row(10, 1, 5), 0, cfg);
  EXPECT_EQ(r[0].p_hat, static_cast<long double>(m.hits) / m.samples);
  EXPECT_NEAR(static_cast<double>(r[0].ratio), 2 * static_cast<double>(r[0].p_hat), 1e-15);
  EXPECT_GT(r[1].p_hat, 0);
  EXPECT_LT(r[1].p_hat, r[0].p_hat);
}

TEST(Rss, ContainsOneAtZero) {
  for (long double theta : {1.0L, 10.0L, 100.0L}) {
    for (long double s : {1.0L, 2.0L * theta * theta}) {
      auto e = rss_envelope({theta, s, 0});
      EXPECT_LE(e.lower, 1);
      EXPECT_GE(e.upper, 1);
    }
  }
}

TEST(Rss, UpperNeverBelowLower) {
  for (long double theta : {2.0L, 50.0L, 500.0L}) {
    for (long double s : {4.0L, 100.0L, 2.0L * theta * theta}) {
      if (s > 2 * theta * theta) continue;
      const long double x_max = std::min(std::sqrt(s) / (3 * std::sqrt(std::numbers::e_v<long double>)),
                                         std::numbers::sqrt2_v<long double> * theta / (3 * std::sqrt(std::numbers::e_v<long double>)));
      for (int i = 0; i < 20; ++i) {
        auto e = rss_envelope({theta, s, x_max * i / 20});
        EXPECT_GE(e.upper, e.lower);
        EXPECT_GE(e.lower, 0);
      }
    }
  }
}

TEST(Rss, ShrinksAsParametersGrow) {
  long double prev = std::numeric_limits<long double>::infinity();
  for (long double theta : {100.0L, 1e3L, 1e4L, 1e5L}) {
    auto e = rss_envelope({theta, 2 * theta * theta, 1});
    EXPECT_LT(e.upper - e.lower, prev);
    prev = e.upper - e.lower;
  }
  EXPECT_LT(prev, 0.2L);
}

TEST(Rss, DomainErrors) {
  EXPECT_THROW(rss_envelope({0, 1, 0}), ConfigError);
  EXPECT_THROW(rss_envelope({1, 3, 0}), ConfigError);
  EXPECT_THROW(rss_envelope({1, 0.5L, 0}), ConfigError);
  EXPECT_THROW(rss_envelope({100, 100, 5}), ConfigError);
  EXPECT_THROW(rss_envelope({100, 100, -1}), ConfigError);
}
