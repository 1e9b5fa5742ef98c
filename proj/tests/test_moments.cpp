#include "lacuna/moments.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace lacuna;

namespace {

LacunarySequence geo2(std::size_t n) { return build_sequence(GeometricSpec{2, 2}, n); }

}  // namespace

TEST(SumMoment, CosineVariance) {
  auto s = geo2(12);
  for (std::size_t n = 1; n <= 12; ++n) EXPECT_EQ(sum_moment(TrigPoly::cosine(), s, n, 2), Rational(n, 2));
  auto odd = LacunarySequence(std::vector<BigInt>{3, 7, 20, 41});
  EXPECT_EQ(sum_moment(TrigPoly::cosine(), odd, 4, 2), Rational(2));
}

TEST(SumMoment, TelescopeVariance) {
  auto s = geo2(12);
  for (std::size_t n = 1; n <= 12; ++n) EXPECT_EQ(sum_moment(TrigPoly::telescope(), s, n, 2), Rational(1));
}

TEST(SumMoment, ThirdMomentExample) {
  auto s = LacunarySequence(std::vector<BigInt>{2, 4, 8});
  EXPECT_EQ(sum_moment(TrigPoly::cosine(), s, 3, 3), Rational(3, 2));
  EXPECT_EQ(sum_moment(TrigPoly::cosine(), s, 3, 3), oracle::naive_sum_moment(TrigPoly::cosine(), s.terms(), 3, 3));
}

TEST(SumMoment, AgreesWithNaiveExpansion) {
  auto s = geo2(5);
  for (auto f : {TrigPoly::cosine(), TrigPoly::telescope()}) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (unsigned m = 1; m <= 4; ++m) EXPECT_EQ(sum_moment(f, s, n, m), oracle::naive_sum_moment(f, s.terms(), n, m));
    }
  }
}

TEST(SumMoment, AgreesWithGridQuadrature) {
  auto f = TrigPoly({{1, Rational(1, 2)}, {3, Rational(1, 4)}});
  std::vector<long long> a{1, 3, 7, 15, 31};
  std::vector<BigInt> big(a.begin(), a.end());
  LacunarySequence s(big);
  for (unsigned m = 2; m <= 5; ++m) {
    long double grid = oracle::grid_moment(f, a, m, 1024);
    EXPECT_NEAR(to_double(sum_moment(f, s, 5, m)), static_cast<double>(grid), 1e-9) << m;
  }
}

TEST(SumMoment, Errors) {
  auto s = geo2(4);
  EXPECT_THROW(sum_moment(TrigPoly::cosine(), s, 5, 2), ConfigError);
  EXPECT_THROW(sum_moment(TrigPoly::cosine(), s, 4, 0), ConfigError);
  EXPECT_THROW(sum_moment(TrigPoly::telescope(), geo2(12), 12, 8, 1000), ResourceError);
}

TEST(IidMoment, Examples) {
  auto c = TrigPoly::cosine();
  EXPECT_EQ(iid_moment(c, 2, 4), Rational(9, 4));
  EXPECT_EQ(iid_moment(c, 1, 2), Rational(1, 2));
  for (unsigned m : {1u, 3u, 5u, 7u}) EXPECT_EQ(iid_moment(c, 6, m), Rational(0));
}

TEST(IidMoment, MatchesMultinomialExpansion) {
  for (auto f : {TrigPoly::cosine(), TrigPoly::telescope()}) {
    auto mu = single_moments(f, 6);
    for (std::size_t n = 1; n <= 5; ++n) {
      for (unsigned m = 1; m <= 6; ++m) EXPECT_EQ(iid_moment(f, n, m), oracle::multinomial_iid_moment(mu, n, m));
    }
  }
}

TEST(MomentsProperty, SingleTermAgreement) {
  auto s = geo2(1);
  for (auto f : {TrigPoly::cosine(), TrigPoly::telescope()}) {
    auto mu = single_moments(f, 8);
    for (unsigned m = 1; m <= 8; ++m) {
      EXPECT_EQ(sum_moment(f, s, 1, m), iid_moment(f, 1, m));
      EXPECT_EQ(sum_moment(f, s, 1, m), mu[m]);
    }
  }
}

TEST(MomentsProperty, NoSolutionsMeansIidEquality) {
  // a_k = 2^{k^2}: for n <= 6, m <= 4 the gaps exceed m D a_k, so only trivial
  // index-wise cancellations survive and the dependent and i.i.d. moments agree.
  auto s = build_sequence(ScheduleSpec{2, 2}, 6);
  auto f = TrigPoly::cosine();
  for (std::size_t n = 1; n <= 6; ++n) {
    for (unsigned m = 1; m <= 4; ++m) EXPECT_EQ(sum_moment(f, s, n, m), iid_moment(f, n, m)) << n << " " << m;
  }
}

TEST(MomentsProperty, DenominatorDividesPower) {
  auto f = TrigPoly({{1, Rational(1, 3)}, {2, Rational(1, 6)}});
  auto s = LacunarySequence(std::vector<BigInt>{1, 3, 7, 16});
  for (unsigned m = 1; m <= 4; ++m) {
    Rational v = sum_moment(f, s, 4, m);
    BigInt cap = boost::multiprecision::pow(f.common_denominator(), m);
    EXPECT_EQ(cap % denominator(v), 0);
  }
}

TEST(MomentTable, FirstMomentZeroSecondNonnegative) {
  auto t = moment_table(TrigPoly::telescope(), geo2(6), 6, 4, MomentKind::dependent);
  EXPECT_EQ(t[1], Rational(0));
  EXPECT_GE(t[2], Rational(0));
  EXPECT_EQ(t.max_order(), 4u);
}

TEST(VarianceReport, Examples) {
  auto r = variance_report(TrigPoly::cosine(), geo2(10), 10);
  EXPECT_EQ(r.variance, Rational(5));
  EXPECT_EQ(r.upper_bound, Rational(10));
  EXPECT_EQ(r.ratio, Rational(1, 2));
  EXPECT_TRUE(r.within_upper);
  auto t = variance_report(TrigPoly::telescope(), geo2(10), 10);
  EXPECT_EQ(t.variance, Rational(1));
  EXPECT_EQ(t.ratio, Rational(1, 10));
  EXPECT_EQ(variance_report(TrigPoly::cosine(), geo2(1), 1).variance, Rational(1, 2));
}

TEST(VarianceReportProperty, UpperBoundAlwaysHolds) {
  std::vector<TrigPoly> fs{TrigPoly::cosine(), TrigPoly::telescope(),
                           TrigPoly({{1, Rational(1, 2)}, {2, Rational(1, 2)}, {4, Rational(-1, 3)}})};
  std::vector<LacunarySequence> seqs{geo2(8), build_sequence(GeometricSpec{3, 3}, 8),
                                     LacunarySequence(std::vector<BigInt>{1, 2, 3, 4, 6, 8, 12, 16})};
  for (const auto& f : fs) {
    for (const auto& s : seqs) {
      for (std::size_t n = 1; n <= 8; ++n) EXPECT_TRUE(variance_report(f, s, n).within_upper);
    }
  }
}

TEST(VarianceConditions, Examples) {
  auto a = check_variance_conditions(TrigPoly::cosine(), geo2(6), 6);
  EXPECT_TRUE(a.a_nonnegative_coeffs);
  auto t = check_variance_conditions(TrigPoly::telescope(), geo2(6), 6);
  EXPECT_FALSE(t.a_nonnegative_coeffs);
  EXPECT_FALSE(t.c_k0.has_value());
  EXPECT_EQ(t.b_collisions.count, 5u);
  auto t3 = check_variance_conditions(TrigPoly::telescope(), build_sequence(GeometricSpec{3, 3}, 6), 6);
  ASSERT_TRUE(t3.c_k0.has_value());
  EXPECT_EQ(*t3.c_k0, 1u);
}
