#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lfsim/channel.hpp"
#include "lfsim/rng.hpp"
#include "oracles.hpp"

namespace lfsim {
namespace {

const Range kAz{deg_to_rad(-60), deg_to_rad(60)};
const Range kSpread{deg_to_rad(5), deg_to_rad(20)};

TEST(DropUsers, DrawsInsideRanges) {
  const auto users = drop_users(20, kAz, kSpread, 7);
  ASSERT_EQ(users.size(), 20u);
  for (const auto& u : users) {
    EXPECT_TRUE(kAz.contains(u.azimuth_rad));
    EXPECT_TRUE(kSpread.contains(u.spread_rad));
    EXPECT_EQ(u.snr_linear, 1.0);
  }
}

TEST(DropUsers, DegenerateRangeGivesThePoint) {
  const auto users = drop_users(1, {0.0, 0.0}, {deg_to_rad(10), deg_to_rad(10)}, 3);
  ASSERT_EQ(users.size(), 1u);
  EXPECT_EQ(users[0].azimuth_rad, 0.0);
  EXPECT_EQ(users[0].spread_rad, deg_to_rad(10));
}

TEST(DropUsers, SameSeedSameList) {
  const auto a = drop_users(12, kAz, kSpread, 99, Range{0, 20});
  const auto b = drop_users(12, kAz, kSpread, 99, Range{0, 20});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].azimuth_rad, b[i].azimuth_rad);
    EXPECT_EQ(a[i].spread_rad, b[i].spread_rad);
    EXPECT_EQ(a[i].snr_linear, b[i].snr_linear);
  }
}

TEST(DropUsers, HeterogeneousSnrInsideDbRange) {
  const auto users = drop_users(200, kAz, kSpread, 5, Range{0, 20});
  for (const auto& u : users) {
    const double db = 10 * std::log10(u.snr_linear);
    EXPECT_GE(db, 0.0);
    EXPECT_LE(db, 20.0);
  }
}

TEST(DropUsers, RejectsBadInput) {
  EXPECT_THROW(drop_users(0, kAz, kSpread, 1), ConfigError);
  EXPECT_THROW(drop_users(3, {1.0, 0.0}, kSpread, 1), ConfigError);
  EXPECT_THROW(drop_users(3, kAz, {0.2, 0.1}, 1), ConfigError);
  EXPECT_THROW(drop_users(3, {-2.0, 0.0}, kSpread, 1), ConfigError);
  EXPECT_THROW(drop_users(3, kAz, {0.0, 0.1}, 1), ConfigError);
  EXPECT_THROW(drop_users(3, kAz, kSpread, 1, Range{5, 1}), ConfigError);
}

TEST(OneRing, DiagonalIsExactlyOne) {
  const auto r = one_ring_correlation({deg_to_rad(30), deg_to_rad(10)}, 8, 0.5);
  for (int p = 0; p < 8; ++p) {
    EXPECT_EQ(r.entries()(p, p), cplx(1.0, 0.0));
  }
}

TEST(OneRing, HermitianWithUnitDiagonal) {
  for (double spread : {2.0, 5.0, 20.0, 40.0}) {
    const auto r = one_ring_correlation({deg_to_rad(-45), deg_to_rad(spread)}, 16, 0.5);
    EXPECT_LT((r.entries() - r.entries().adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    for (int p = 0; p < 16; ++p) {
      EXPECT_NEAR(r.entries()(p, p).real(), 1.0, 1e-10);
      EXPECT_NEAR(r.entries()(p, p).imag(), 0.0, 1e-10);
    }
    EXPECT_GE(r.min_eigenvalue_before_repair(), -CorrelationMatrix::kPsdTolerance);
  }
}

TEST(OneRing, VanishingSpreadIsAllOnes) {
  const auto r = one_ring_correlation({0.0, 1e-9}, 6, 0.5);
  EXPECT_LT((r.entries() - CMatrix::Ones(6, 6)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(OneRing, MatchesDenseTrapezoid) {
  const double theta = deg_to_rad(30);
  const double delta = deg_to_rad(10);
  const auto r = one_ring_correlation({theta, delta}, 4, 0.5);
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      const cplx expected = oracle::one_ring_trapezoid(p, q, 0.5, theta, delta, 100000);
      EXPECT_NEAR(std::abs(r.entries()(p, q) - expected), 0.0, 1e-8) << p << "," << q;
    }
  }
}

TEST(OneRing, SquareRootReproducesMatrix) {
  const auto r = one_ring_correlation({deg_to_rad(12), deg_to_rad(3)}, 16, 0.5);
  const CMatrix back = r.sqrt() * r.sqrt().adjoint();
  EXPECT_LT((back - r.entries()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CorrelationMatrix, RepairClipsSmallNegativeEigenvalue) {
  CMatrix m = CMatrix::Ones(3, 3);
  m(0, 0) -= 5e-11;
  const auto r = CorrelationMatrix::from_entries(m, 0.5);
  EXPECT_TRUE(r.repaired());
  EXPECT_LT(r.min_eigenvalue_before_repair(), 0.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(r.entries());
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-15);
  EXPECT_LT((r.entries() - m).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(CorrelationMatrix, RejectsIndefinite) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = m(1, 0) = 2.0;
  EXPECT_THROW(CorrelationMatrix::from_entries(m, 0.5), NumericalError);
}

TEST(GenChannel, IdentityCorrelationMeanNorm) {
  const int drops = 10000;
  std::vector<double> norms;
  const std::vector<double> noise{1.0};
  for (int d = 0; d < drops; ++d) {
    const auto ch = gen_channel_iid(2, noise, derive_seed(11, static_cast<std::uint64_t>(d)));
    norms.push_back(ch.h_true.col(0).squaredNorm());
  }
  double mean = 0, var = 0;
  for (double v : norms) mean += v;
  mean /= drops;
  for (double v : norms) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (drops - 1) / drops);
  EXPECT_LT(std::abs(mean - 2.0), 3 * se);
}

TEST(GenChannel, IidMatchesIdentityCorrelationPath) {
  std::vector<CorrelationMatrix> rs(5, CorrelationMatrix::identity(4));
  const std::vector<double> noise(5, 1.0);
  const auto a = gen_channel(rs, noise, 42);
  const auto b = gen_channel_iid(4, noise, 42);
  EXPECT_EQ(a.h_true, b.h_true);
}

TEST(GenChannel, SameSeedBitIdentical) {
  const auto r = one_ring_correlation({0.3, 0.2}, 8, 0.5);
  std::vector<CorrelationMatrix> rs(4, r);
  const std::vector<double> noise(4, 1.0);
  EXPECT_EQ(gen_channel(rs, noise, 5).h_true, gen_channel(rs, noise, 5).h_true);
  EXPECT_NE(gen_channel(rs, noise, 5).h_true, gen_channel(rs, noise, 6).h_true);
}

TEST(GenChannel, RankOneColumnsFollowSteeringVector) {
  const auto r = one_ring_correlation({0.4, 1e-9}, 4, 0.5);
  // Rank-one limit: R = a a^H with a_p = exp(j 2 pi D p sin(theta)).
  CVector a(4);
  for (int p = 0; p < 4; ++p) a(p) = std::polar(1.0, 2 * kPi * 0.5 * p * std::sin(0.4));
  std::vector<CorrelationMatrix> rs(6, r);
  const std::vector<double> noise(6, 1.0);
  const auto ch = gen_channel(rs, noise, 8);
  for (int k = 0; k < 6; ++k) {
    const CVector h = ch.h_true.col(k);
    const cplx coef = a.dot(h) / a.squaredNorm();
    EXPECT_LT((h - coef * a).norm(), 1e-8 * std::max(1.0, h.norm()));
  }
}

TEST(GenChannel, EmpiricalCovarianceMatchesOneRing) {
  const auto r = one_ring_correlation({deg_to_rad(30), deg_to_rad(10)}, 4, 0.5);
  const int draws = 100000;
  Engine engine(123);
  Eigen::MatrixXd s_re = Eigen::MatrixXd::Zero(4, 4), s2_re = s_re, s_im = s_re, s2_im = s_re;
  for (int i = 0; i < draws; ++i) {
    const CVector g = complex_gaussian_matrix(4, 1, engine).col(0);
    const CVector h = r.sqrt() * g;
    const CMatrix outer = h * h.adjoint();
    s_re += outer.real();
    s2_re += outer.real().cwiseAbs2();
    s_im += outer.imag();
    s2_im += outer.imag().cwiseAbs2();
  }
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      const double m_re = s_re(p, q) / draws;
      const double m_im = s_im(p, q) / draws;
      const double se_re = std::sqrt((s2_re(p, q) / draws - m_re * m_re) / draws);
      const double se_im = std::sqrt((s2_im(p, q) / draws - m_im * m_im) / draws);
      EXPECT_LT(std::abs(m_re - r.entries()(p, q).real()), 3 * se_re + 1e-12) << p << q;
      EXPECT_LT(std::abs(m_im - r.entries()(p, q).imag()), 3 * se_im + 1e-12) << p << q;
    }
  }
}

TEST(GenChannel, IidEntriesPassKolmogorovSmirnov) {
  Engine engine(2024);
  const CMatrix g = complex_gaussian_matrix(1, 100000, engine);
  std::vector<double> re, im;
  for (Eigen::Index i = 0; i < g.cols(); ++i) {
    re.push_back(g(0, i).real());
    im.push_back(g(0, i).imag());
  }
  const auto cdf = [](double x) { return oracle::normal_cdf(x * std::sqrt(2.0)); };
  EXPECT_LT(oracle::ks_statistic(re, cdf), oracle::ks_critical_001(re.size()));
  EXPECT_LT(oracle::ks_statistic(im, cdf), oracle::ks_critical_001(im.size()));
}

TEST(CsitNoise, ZeroVarianceIsIdentity) {
  const std::vector<double> noise(3, 1.0);
  const auto ch = add_csit_noise(gen_channel_iid(4, noise, 1), 0.0, 1);
  ASSERT_TRUE(ch.h_csit.has_value());
  EXPECT_EQ(*ch.h_csit, ch.h_true);
}

TEST(CsitNoise, RejectsOutOfRangeVariance) {
  const std::vector<double> noise(1, 1.0);
  EXPECT_THROW(add_csit_noise(gen_channel_iid(2, noise, 1), 1.0, 1), ConfigError);
  EXPECT_THROW(add_csit_noise(gen_channel_iid(2, noise, 1), -0.1, 1), ConfigError);
}

TEST(CsitNoise, VariancePreservedAndCorrelationMatches) {
  const std::vector<double> noise(1000, 1.0);
  for (double e : {0.1, 0.2}) {
    std::vector<double> power, corr;
    for (int d = 0; d < 100; ++d) {
      const auto seed = derive_seed(77, static_cast<std::uint64_t>(d));
      const auto ch = add_csit_noise(gen_channel_iid(1, noise, seed), e, seed);
      for (Eigen::Index k = 0; k < ch.h_true.cols(); ++k) {
        power.push_back(std::norm((*ch.h_csit)(0, k)));
        corr.push_back((std::conj(ch.h_true(0, k)) * (*ch.h_csit)(0, k)).real());
      }
    }
    const auto stats = [](const std::vector<double>& v) {
      double m = 0, s = 0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      for (double x : v) s += (x - m) * (x - m);
      return std::pair{m, std::sqrt(s / (v.size() - 1) / v.size())};
    };
    const auto [pm, pse] = stats(power);
    const auto [cm, cse] = stats(corr);
    EXPECT_LT(std::abs(pm - 1.0), 3 * pse) << e;
    EXPECT_LT(std::abs(cm - std::sqrt(1 - e)), 3 * cse) << e;
  }
}

TEST(NoisePowers, InverseOfSnr) {
  std::vector<UserGeometry> users{{0, 0.1, 1.0}, {0, 0.1, 100.0}};
  const auto n = noise_powers(users);
  EXPECT_EQ(n[0], 1.0);
  EXPECT_DOUBLE_EQ(n[1], 0.01);
}

}  // namespace
}  // namespace lfsim
