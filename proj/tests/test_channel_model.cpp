#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ssm/channel_model.hpp"

namespace {

using ssm::AnMode;
using ssm::CMatrix;
using ssm::Complex;
using ssm::Modulation;
using ssm::Side;
using ssm::SystemConfig;

SystemConfig default_cfg() {
  SystemConfig cfg;
  cfg.n_t = 4;
  cfg.n_r = 2;
  cfg.n_e = 2;
  cfg.m = 4;
  return cfg;
}

TEST(SystemConfig, RejectsNonPowerOfTwoAntennasAndBadPower) {
  SystemConfig cfg = default_cfg();
  EXPECT_NO_THROW(cfg.validate());
  cfg.n_t = 3;
  EXPECT_THROW(cfg.validate(), ssm::ConfigError);
  cfg = default_cfg();
  cfg.m = 6;
  EXPECT_THROW(cfg.validate(), ssm::ConfigError);
  cfg = default_cfg();
  cfg.sigma2_b = 0.0;
  EXPECT_THROW(cfg.validate(), ssm::ConfigError);
  cfg = default_cfg();
  cfg.n_e = 0;
  EXPECT_THROW(cfg.validate(), ssm::ConfigError);
}

TEST(Constellation, Bpsk) {
  const auto c = ssm::build_constellation(Modulation::psk, 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.symbols[0], Complex(1.0, 0.0));
  EXPECT_EQ(c.symbols[1], Complex(-1.0, 0.0));
}

TEST(Constellation, QpskStartsAtQuarterPi) {
  const auto c = ssm::build_constellation(Modulation::psk, 4);
  const double r = 1.0 / std::sqrt(2.0);
  const Complex expected[4] = {{r, r}, {-r, r}, {-r, -r}, {r, -r}};
  ASSERT_EQ(c.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(c.symbols[k] - expected[k]), 1e-15) << k;
  EXPECT_NEAR(c.mean_energy(), 1.0, 1e-12);
}

TEST(Constellation, QamUnitEnergyDistinctGrayGrid) {
  for (int m : {4, 16, 64}) {
    const auto c = ssm::build_constellation(Modulation::qam, m);
    ASSERT_EQ(static_cast<int>(c.size()), m);
    EXPECT_NEAR(c.mean_energy(), 1.0, 1e-12) << m;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) EXPECT_GT(std::abs(c.symbols[i] - c.symbols[j]), 1e-6);
  }
  // Gray labelling: consecutive in-phase labels 0,1 sit on adjacent levels
  const auto c16 = ssm::build_constellation(Modulation::qam, 16);
  const double step = 2.0 / std::sqrt(10.0);
  for (int k = 0; k + 1 < 4; ++k) {
    // labels k and k ^ (k + 1) differ by one bit and must be grid neighbours
    const int gray_a = k ^ (k >> 1);
    const int gray_b = (k + 1) ^ ((k + 1) >> 1);
    EXPECT_NEAR(std::abs(c16.symbols[gray_a] - c16.symbols[gray_b]), step, 1e-12);
  }
}

TEST(Constellation, RejectsUnsupportedSizes) {
  EXPECT_THROW(ssm::build_constellation(Modulation::qam, 8), ssm::ConfigError);
  EXPECT_THROW(ssm::build_constellation(Modulation::qam, 32), ssm::ConfigError);
  EXPECT_THROW(ssm::build_constellation(Modulation::psk, 3), ssm::ConfigError);
  EXPECT_THROW(ssm::build_constellation(Modulation::psk, 1), ssm::ConfigError);
}

TEST(Alphabet, TwoAntennaBpsk) {
  SystemConfig cfg = default_cfg();
  cfg.n_t = 2;
  cfg.m = 2;
  const auto a = ssm::build_alphabet(cfg, ssm::build_constellation(Modulation::psk, 2));
  ASSERT_EQ(a.size(), 4u);
  const Complex expected[4][2] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  for (int k = 0; k < 4; ++k)
    for (int e = 0; e < 2; ++e) EXPECT_EQ(a.vectors[k](e), expected[k][e]) << k << "," << e;
}

TEST(Alphabet, StructureAndDifferences) {
  const SystemConfig cfg = default_cfg();
  const auto c = ssm::build_constellation(Modulation::psk, 4);
  const auto a = ssm::build_alphabet(cfg, c);
  ASSERT_EQ(a.size(), 16u);
  double energy = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    int nonzero = 0;
    for (int e = 0; e < cfg.n_t; ++e) nonzero += (std::abs(a.vectors[k](e)) > 0.0) ? 1 : 0;
    EXPECT_EQ(nonzero, 1);
    const std::size_t antenna = k / 4, symbol = k % 4;
    EXPECT_EQ(a.vectors[k](static_cast<Eigen::Index>(antenna)), c.symbols[symbol]);
    energy += a.vectors[k].squaredNorm();
  }
  EXPECT_NEAR(energy / 16.0, 1.0, 1e-12);

  int zero_diffs = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j, ++total) zero_diffs += a.difference(i, j).norm() == 0.0 ? 1 : 0;
  EXPECT_EQ(total, 256);
  EXPECT_EQ(zero_diffs, 16);
}

TEST(Channel, DeterministicAndCorrectShape) {
  const SystemConfig cfg = default_cfg();
  ssm::RngStream a(99), b(99);
  const auto c1 = ssm::generate_channel(a, cfg);
  const auto c2 = ssm::generate_channel(b, cfg);
  EXPECT_EQ(c1.h_b.rows(), 2);
  EXPECT_EQ(c1.h_b.cols(), 4);
  EXPECT_EQ(c1.h_e.rows(), 2);
  EXPECT_EQ(c1.h_e.cols(), 4);
  EXPECT_TRUE(c1.h_b == c2.h_b);
  EXPECT_TRUE(c1.h_e == c2.h_e);
}

TEST(Channel, EntriesHaveUnitVariance) {
  const SystemConfig cfg = default_cfg();
  ssm::RngStream rng(5);
  double power = 0.0, re2 = 0.0;
  Complex mean = 0.0;
  long count = 0;
  for (int draw = 0; draw < 10000; ++draw) {
    const auto ch = ssm::generate_channel(rng, cfg);
    for (const CMatrix* h : {&ch.h_b, &ch.h_e})
      for (Eigen::Index k = 0; k < h->size(); ++k) {
        const Complex z = (*h)(k);
        power += std::norm(z);
        re2 += z.real() * z.real();
        mean += z;
        ++count;
      }
  }
  EXPECT_NEAR(power / count, 1.0, 0.05);
  EXPECT_NEAR(re2 / count, 0.5, 0.025);
  EXPECT_LT(std::abs(mean / static_cast<double>(count)), 0.02);
}

TEST(AnProjector, NullSpaceProperties) {
  const SystemConfig cfg = default_cfg();
  ssm::RngStream rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ch = ssm::generate_channel(rng, cfg);
    const auto t = ssm::build_an_projector(ch.h_b, AnMode::null_space);
    EXPECT_LE(std::abs(t.trace_energy() - 1.0), 1e-10);
    EXPECT_LE((ch.h_b * t.t).norm(), 1e-9);
    // scaled orthogonal projector: T^2 = T / sqrt(n_t - n_r)
    EXPECT_LE((t.t * t.t - t.t / std::sqrt(2.0)).norm(), 1e-10);
  }
}

TEST(AnProjector, Isotropic) {
  ssm::RngStream rng(3);
  SystemConfig cfg = default_cfg();
  const auto ch = ssm::generate_channel(rng, cfg);
  const auto t = ssm::build_an_projector(ch.h_b, AnMode::isotropic);
  EXPECT_TRUE(t.t.isApprox(CMatrix::Identity(4, 4) * 0.5));
  EXPECT_NEAR(t.trace_energy(), 1.0, 1e-15);
}

TEST(AnProjector, SquareChannelHasNoNullSpace) {
  SystemConfig cfg = default_cfg();
  cfg.n_r = 4;
  ssm::RngStream rng(8);
  const auto ch = ssm::generate_channel(rng, cfg);
  EXPECT_THROW(ssm::build_an_projector(ch.h_b, AnMode::null_space), ssm::CapabilityError);
}

TEST(Whitener, FullSignalPowerGivesScaledIdentity) {
  SystemConfig cfg = default_cfg();
  cfg.sigma2_b = 0.3;
  ssm::RngStream rng(4);
  const auto ch = ssm::generate_channel(rng, cfg);
  const auto t = ssm::build_an_projector(ch.h_b, AnMode::isotropic);
  const auto wh = ssm::build_whitener(ch.h_b, t, 1.0, cfg, Side::bob);
  EXPECT_TRUE(wh.w == 0.3 * CMatrix::Identity(2, 2));
}

TEST(Whitener, NullSpaceAnIsInvisibleToBob) {
  SystemConfig cfg = default_cfg();
  cfg.sigma2_b = 0.1;
  ssm::RngStream rng(6);
  const auto ch = ssm::generate_channel(rng, cfg);
  const auto t = ssm::build_an_projector(ch.h_b, AnMode::null_space);
  for (double beta : {0.0, 0.25, 0.5, 0.9}) {
    const auto wh = ssm::build_whitener(ch.h_b, t, beta, cfg, Side::bob);
    EXPECT_LE((wh.w - 0.1 * CMatrix::Identity(2, 2)).norm(), 1e-15) << beta;
  }
}

TEST(Whitener, InverseSquareRootWhitens) {
  SystemConfig cfg = default_cfg();
  cfg.sigma2_e = 0.05;
  ssm::RngStream rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ch = ssm::generate_channel(rng, cfg);
    const auto t = ssm::build_an_projector(ch.h_b, AnMode::null_space);
    const auto wh = ssm::build_whitener(ch.h_e, t, 0.4, cfg, Side::eve);
    const CMatrix id = wh.w_inv_sqrt * wh.w * wh.w_inv_sqrt.adjoint();
    EXPECT_LE((id - CMatrix::Identity(2, 2)).norm(), 1e-8);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(wh.w);
    EXPECT_GE(eig.eigenvalues().minCoeff(), 0.05 * (1.0 - 1e-9));
  }
}

TEST(Whitener, RejectsBadInputs) {
  const SystemConfig cfg = default_cfg();
  ssm::RngStream rng(12);
  auto ch = ssm::generate_channel(rng, cfg);
  const auto t = ssm::build_an_projector(ch.h_b, AnMode::isotropic);
  EXPECT_THROW(ssm::build_whitener(ch.h_b, t, 1.5, cfg, Side::bob), ssm::ConfigError);
  EXPECT_THROW(ssm::build_whitener(ch.h_b, t, -0.1, cfg, Side::bob), ssm::ConfigError);
  ch.h_e(0, 0) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(ssm::build_whitener(ch.h_e, t, 0.5, cfg, Side::eve), ssm::NumericError);
}

}  // namespace
