#include "resispike/error.hpp"
#include "resispike/mp_law.hpp"
#include "resispike/spectra.hpp"
#include "resispike/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace rs = resispike;

namespace {

Eigen::MatrixXd random_symmetric(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  return 0.5 * (a + a.transpose());
}

rs::Spectrum random_spectrum(std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::vector<double> v(m);
  for (auto& x : v) x = u(rng);
  return rs::Spectrum(v);
}

}  // namespace

TEST(EigSym, IdentityAndDiagonal) {
  auto d = rs::eig_sym(Eigen::MatrixXd::Identity(3, 3));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(d.values(i), 1.0, 1e-14);
  EXPECT_NEAR((d.vectors.transpose() * d.vectors - Eigen::MatrixXd::Identity(3, 3)).norm(), 0.0, 1e-12);

  Eigen::MatrixXd diag = Eigen::Vector3d(1, 5, 2).asDiagonal();
  d = rs::eig_sym(diag);
  EXPECT_NEAR(d.values(0), 5.0, 1e-14);
  EXPECT_NEAR(d.values(1), 2.0, 1e-14);
  EXPECT_NEAR(d.values(2), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(d.vectors(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(d.vectors(2, 1)), 1.0, 1e-14);
}

TEST(EigSym, RandomReconstruction) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd a = random_symmetric(6, rng);
  const auto d = rs::eig_sym(a);
  const Eigen::MatrixXd back = d.vectors * d.values.asDiagonal() * d.vectors.transpose();
  EXPECT_LT((back - a).norm(), 1e-10);
  for (int i = 1; i < 6; ++i) EXPECT_GE(d.values(i - 1), d.values(i));
}

TEST(EigSym, RejectsAsymmetric) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(0, 1) = 1.0;
  try {
    rs::eig_sym(a);
    FAIL() << "expected NonSymmetric";
  } catch (const rs::Error& e) {
    EXPECT_EQ(e.code(), rs::ErrorCode::NonSymmetric);
  }
}

TEST(Spectrum, NormalizeTrace) {
  auto s = rs::normalize_trace(rs::Spectrum({2, 2, 2}));
  for (double v : s.values()) EXPECT_DOUBLE_EQ(v, 1.0);
  s = rs::normalize_trace(rs::Spectrum({4, 2, 0}));
  EXPECT_DOUBLE_EQ(s.values()[0], 2.0);
  EXPECT_DOUBLE_EQ(s.values()[1], 1.0);
  EXPECT_DOUBLE_EQ(s.values()[2], 0.0);
  EXPECT_TRUE(s.normalized());

  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto r = rs::normalize_trace(random_spectrum(17, rng));
    EXPECT_NEAR(r.sum(), 17.0, 1e-12);
  }
  try {
    rs::normalize_trace(rs::Spectrum({0, 0}));
    FAIL();
  } catch (const rs::Error& e) {
    EXPECT_EQ(e.code(), rs::ErrorCode::ZeroTrace);
  }
}

TEST(Spectrum, Moments) {
  EXPECT_DOUBLE_EQ(rs::moment(rs::Spectrum({1, 1, 1, 1}), 4), 1.0);
  EXPECT_DOUBLE_EQ(rs::moment(rs::Spectrum({2, 0}), 2), 2.0);

  // Quantile sample of MP(c): M2 = 1 + c.
  const std::size_t m = 400;
  for (double c : {0.25, 0.5, 1.0}) {
    const auto s = rs::MarcenkoPasturMeasure(c).quantile_spectrum(m);
    EXPECT_NEAR(rs::moment(s, 2), 1.0 + c, 3.0 / std::sqrt(double(m)));
  }
}

TEST(Spectrum, MFunctional) {
  EXPECT_DOUBLE_EQ(rs::m_functional(rs::Spectrum({1, 1, 1}), 2.0, 1, 2), 1.0);
  EXPECT_NEAR(rs::m_functional(rs::Spectrum({3, 1}), 4.0, 1, 1), 5.0 / 3.0, 1e-15);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto s = random_spectrum(9, rng);
    for (int p = 1; p <= 4; ++p) EXPECT_NEAR(rs::m_functional(s, 0.0, p, 0), rs::moment(s, p), 1e-12);
  }
  try {
    rs::m_functional(rs::Spectrum({3, 1}), 3.0, 1, 1);
    FAIL();
  } catch (const rs::Error& e) {
    EXPECT_EQ(e.code(), rs::ErrorCode::PoleTooClose);
  }
}

TEST(Spectrum, TTransform) {
  EXPECT_DOUBLE_EQ(rs::t_transform(rs::Spectrum({1, 1, 1}), 3.0), 0.5);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto s = random_spectrum(8, rng);
    const double z = s.max() + 0.5 + k;
    EXPECT_NEAR(rs::t_transform(s, z), rs::m_functional(s, z, 1, 1), 1e-14);
    EXPECT_NEAR(1e8 * rs::t_transform(s, 1e8), rs::moment(s, 1), 1e-6);
  }
}

TEST(Spectrum, WeightedTTransform) {
  Eigen::MatrixXd w = Eigen::Vector2d(2, 1).asDiagonal();
  const auto d = rs::eig_sym(w);
  EXPECT_NEAR(rs::weighted_t_transform(d, Eigen::Vector2d(1, 0), 3.0), 2.0, 1e-14);

  const auto id = rs::eig_sym(Eigen::MatrixXd::Identity(4, 4));
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.5);
  EXPECT_NEAR(rs::weighted_t_transform(id, u, 2.0), 1.0, 1e-14);

  std::mt19937_64 rng(9);
  const Eigen::MatrixXd a = random_symmetric(6, rng);
  const Eigen::MatrixXd psd = a * a.transpose();
  const auto dd = rs::eig_sym(psd);
  Eigen::VectorXd v = Eigen::VectorXd::Random(6).normalized();
  const double z = dd.values(0) + 1.0;
  double brute = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double p = dd.vectors.col(i).dot(v);
    brute += dd.values(i) / (z - dd.values(i)) * p * p;
  }
  EXPECT_NEAR(rs::weighted_t_transform(dd, v, z), brute, 1e-12);
  try {
    rs::weighted_t_transform(dd, 2.0 * v, z);
    FAIL();
  } catch (const rs::Error& e) {
    EXPECT_EQ(e.code(), rs::ErrorCode::NotUnit);
  }
}

TEST(Spectrum, SolveTTransformInverts) {
  const rs::Spectrum s({2.5, 1.0, 0.5, 0.3});
  for (double target : {0.01, 0.3, 2.0}) {
    const double z = rs::solve_t_transform(s, target);
    EXPECT_GT(z, s.max());
    EXPECT_NEAR(rs::t_transform(s, z), target, 1e-12 * std::max(1.0, target));
  }
}

TEST(MarcenkoPastur, MomentsMatchClosedForms) {
  for (double c : {0.1, 0.5, 1.0, 2.0}) {
    const rs::MarcenkoPasturMeasure mp(c);
    for (int s = 1; s <= 4; ++s) EXPECT_NEAR(mp.moment(s), rs::mp_moment(c, s), 1e-10 * rs::mp_moment(c, s)) << c;
    EXPECT_NEAR(mp.upper_edge(), (1 + std::sqrt(c)) * (1 + std::sqrt(c)), 1e-14);
  }
}

TEST(MarcenkoPastur, TTransformClosedForm) {
  // For MP(c): T(z) = (z - 1 - c - sqrt((z-1-c)^2 - 4c)) / (2c).
  for (double c : {0.3, 1.0, 1.7}) {
    const rs::MarcenkoPasturMeasure mp(c);
    const double z = mp.upper_edge() + 0.7;
    const double b = z - 1.0 - c;
    const double closed = (b - std::sqrt(b * b - 4.0 * c)) / (2.0 * c);
    EXPECT_NEAR(mp.m_functional(z, 1, 1), closed, 1e-11) << c;
  }
}

TEST(Stats, NormalAndQuantiles) {
  EXPECT_NEAR(rs::normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(rs::normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(rs::normal_sf(10.0), 7.619853024160527e-24, 1e-35);
  EXPECT_DOUBLE_EQ(rs::empirical_quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(rs::sample_mean({1, 2, 3}), 2.0);
  EXPECT_DOUBLE_EQ(rs::sample_sd({1, 2, 3}), 1.0);
  EXPECT_NEAR(rs::ks_distance_normal({0.0}), 0.5, 1e-15);
}
