#include "resispike/error.hpp"
#include "resispike/parallel.hpp"
#include "resispike/simlab.hpp"
#include "resispike/testkit.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace rs = resispike;

namespace {

Eigen::MatrixXd spiked(std::size_t m, std::size_t n, double theta, std::size_t idx, std::uint64_t seed,
                       std::uint64_t group = 0) {
  auto rng = rs::make_rng(seed, 0, group);
  Eigen::MatrixXd z = rs::standard_normal(Eigen::Index(m), Eigen::Index(n), rng);
  return rs::apply_perturbation(z, theta, idx);
}

Eigen::VectorXd unit(std::initializer_list<double> v) {
  Eigen::VectorXd u(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) u(i++) = x;
  return u.normalized();
}

}  // namespace

TEST(ResidualPair, DenseOracle) {
  const auto ux = unit({1, 0.3, -0.2, 0.1, 0.0, 0.4});
  const auto uy = unit({0.2, 1, 0.5, 0.0, -0.3, 0.1});
  const rs::FilteredCovariance fx(12.0, ux), fy(30.0, uy);
  const auto pair = rs::residual_pair(fx, fy);
  const auto d = rs::eig_sym(rs::inv_sqrt_apply(fx, fy.dense()));
  EXPECT_NEAR(pair.hi, d.values(0), 1e-10 * d.values(0));
  EXPECT_NEAR(pair.lo, d.values(5), 1e-10);
  EXPECT_FALSE(pair.degenerate);
}

TEST(ResidualPair, ParallelDirections) {
  const auto u = unit({1, 2, 3});
  auto p = rs::residual_pair(rs::FilteredCovariance(5.0, u), rs::FilteredCovariance(5.0, u));
  EXPECT_TRUE(p.degenerate);
  EXPECT_DOUBLE_EQ(p.hi, 1.0);
  EXPECT_DOUBLE_EQ(p.lo, 1.0);
  p = rs::residual_pair(rs::FilteredCovariance(5.0, u), rs::FilteredCovariance(10.0, -u));
  EXPECT_TRUE(p.degenerate);
  EXPECT_NEAR(p.hi, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.lo, 1.0);
}

TEST(ResidualSpikeTest, IdenticalDataIsDegenerate) {
  const Eigen::MatrixXd x = spiked(100, 500, 5000.0, 0, 1);
  const auto rep = rs::residual_spike_test(x, x);
  EXPECT_TRUE(rep.diagnostics.degenerate);
  EXPECT_DOUBLE_EQ(rep.lambda_max_obs, 1.0);
  EXPECT_DOUBLE_EQ(rep.lambda_min_obs, 1.0);
  EXPECT_GT(rep.p_max, 0.999);
  EXPECT_GT(rep.p_min, 0.999);
  EXPECT_FALSE(rep.reject);
  EXPECT_TRUE(rep.diagnostics.criterion_evaluated);
  EXPECT_TRUE(rep.diagnostics.criterion_ok);
  EXPECT_NEAR(rep.diagnostics.angle_sq, 1.0, 1e-12);
}

TEST(ResidualSpikeTest, NullAndAlternative) {
  const Eigen::MatrixXd x = spiked(100, 500, 5000.0, 0, 2, 0);
  const Eigen::MatrixXd y = spiked(100, 500, 5000.0, 0, 2, 1);
  const auto h0 = rs::residual_spike_test(x, y);
  EXPECT_TRUE(h0.diagnostics.detectable_x);
  EXPECT_TRUE(h0.diagnostics.detectable_y);
  EXPECT_GT(h0.lambda_max_obs, 1.0);
  EXPECT_LT(h0.lambda_min_obs, 1.0);
  EXPECT_NEAR(h0.lambda_max_obs * h0.lambda_min_obs, h0.diagnostics.theta_unbiased_y /
                                                         h0.diagnostics.theta_unbiased_x, 1e-9);

  const Eigen::MatrixXd y1 = spiked(100, 500, 5000.0, 1, 2, 1);
  const auto h1 = rs::residual_spike_test(x, y1);
  EXPECT_TRUE(h1.reject);
  EXPECT_LT(h1.p_max, 1e-6);
}

TEST(ResidualSpikeTest, SwapsToLargerSample) {
  const Eigen::MatrixXd x = spiked(60, 200, 1000.0, 0, 3, 0);
  const Eigen::MatrixXd y = spiked(60, 400, 1000.0, 0, 3, 1);
  const auto a = rs::residual_spike_test(x, y);
  EXPECT_TRUE(a.diagnostics.swapped);
  EXPECT_EQ(a.diagnostics.n_x, 400u);
  EXPECT_EQ(a.diagnostics.n_y, 200u);
  const auto b = rs::residual_spike_test(y, x);
  EXPECT_FALSE(b.diagnostics.swapped);
  EXPECT_DOUBLE_EQ(a.lambda_max_obs, b.lambda_max_obs);
}

TEST(ResidualSpikeTest, Errors) {
  const Eigen::MatrixXd x = spiked(50, 200, 1000.0, 0, 4);
  try {
    rs::residual_spike_test(x, spiked(40, 200, 1000.0, 0, 4));
    FAIL();
  } catch (const rs::Error& e) {
    EXPECT_EQ(e.code(), rs::ErrorCode::DimensionMismatch);
  }
  try {
    rs::residual_spike_test(x, spiked(50, 200, 1.0, 0, 5));
    FAIL();
  } catch (const rs::Error& e) {
    EXPECT_EQ(e.code(), rs::ErrorCode::NotDetectable);
  }
}

TEST(ResidualSpikeTest, FilteredRawVariant) {
  const Eigen::MatrixXd x = spiked(80, 400, 2000.0, 0, 6, 0);
  const Eigen::MatrixXd y = spiked(80, 400, 2000.0, 0, 6, 1);
  rs::TestOptions o;
  o.variant = rs::MatrixVariant::FilteredRaw;
  o.check_criterion = false;
  const auto r = rs::residual_spike_test(x, y, o);
  EXPECT_FALSE(r.diagnostics.law_calibrated);
  EXPECT_EQ(r.diagnostics.variant, rs::MatrixVariant::FilteredRaw);
  EXPECT_FALSE(r.diagnostics.criterion_evaluated);
  // Raw Y keeps its bulk, so the extremes spread well beyond the filtered pair.
  EXPECT_GT(r.lambda_max_obs, 1.5);
  EXPECT_LT(r.lambda_min_obs, 0.7);
  EXPECT_EQ(rs::matrix_variant_from_string("filtered_raw"), rs::MatrixVariant::FilteredRaw);
  EXPECT_STREQ(rs::to_string(rs::MatrixVariant::BothFiltered), "both_filtered");
  EXPECT_THROW(rs::matrix_variant_from_string("raw"), rs::Error);
}

TEST(GenLogdet, Cases) {
  EXPECT_NEAR(rs::gen_logdet(Eigen::MatrixXd::Identity(5, 5)), 0.0, 1e-14);
  Eigen::MatrixXd d = Eigen::Vector2d(2.0, 0.0).asDiagonal();
  EXPECT_NEAR(rs::gen_logdet(d), std::log(2.0), 1e-14);

  auto rng = rs::make_rng(8, 0, 0);
  const Eigen::MatrixXd z = rs::standard_normal(20, 8, rng);
  const Eigen::MatrixXd w = z * z.transpose() / 8.0;
  const Eigen::MatrixXd g = z.transpose() * z / 8.0;  // same nonzero spectrum
  const auto e = rs::eig_sym(g);
  double want = 0.0;
  for (int i = 0; i < 8; ++i) want += std::log(e.values(i));
  EXPECT_NEAR(rs::gen_logdet(w), want, 1e-9);

  try {
    rs::gen_logdet(Eigen::MatrixXd::Zero(3, 3));
    FAIL();
  } catch (const rs::Error& e2) {
    EXPECT_EQ(e2.code(), rs::ErrorCode::AllZero);
  }
}

TEST(Classical, IdenticalSamples) {
  const Eigen::MatrixXd x = spiked(30, 100, 50.0, 0, 9);
  const auto s = rs::classical_statistics(x, x);
  EXPECT_NEAR(s.t2, 0.0, 1e-9);
  EXPECT_NEAR(s.t3, 30.0, 1e-9);
  EXPECT_EQ(s.rank, 30u);

  // n < m: K lives on the rank of S_X.
  const Eigen::MatrixXd w = spiked(30, 12, 50.0, 0, 10);
  const auto r = rs::classical_statistics(w, w);
  EXPECT_EQ(r.rank, 11u);
  EXPECT_NEAR(r.t3, 11.0, 1e-8);
  EXPECT_NEAR(r.t2, 0.0, 1e-8);
}

TEST(Baselines, DeterministicAcrossWorkers) {
  const Eigen::MatrixXd x = spiked(20, 120, 30.0, 0, 11, 0);
  const Eigen::MatrixXd y = spiked(20, 100, 30.0, 0, 11, 1);
  const auto a = rs::baselines(x, y, 40, 123, 0.05, true, 1);
  const auto b = rs::baselines(x, y, 40, 123, 0.05, true, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.quantiles.replicates, 40u);
  EXPECT_LT(a.quantiles.t3.low, a.quantiles.t3.high);
  const auto c = rs::baselines(x, y, 40, 124, 0.05, true, 1);
  EXPECT_NE(a.quantiles, c.quantiles);
}

TEST(Baselines, Outside) {
  const rs::StatQuantiles q{1.0, 2.0};
  EXPECT_TRUE(rs::outside(q, 0.5));
  EXPECT_TRUE(rs::outside(q, 2.5));
  EXPECT_FALSE(rs::outside(q, 1.5));
}
