#include "support.hpp"

#include "mkkc/kernels.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace mkkc;
using mkkc::testing::gaussian;

namespace {

DataView<double> view_of(MatrixXd X) { return {std::move(X), "x"}; }

double min_over_max_eigenvalue(const MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(K, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("rbf of identical rows is one") {
  MatrixXd X(3, 2);
  X << 1, 2, 1, 2, -3, 0.5;
  const auto k = rbf_kernel(view_of(X), 0.5);
  CHECK(k.K(0, 1) == 1.0);
  CHECK(k.K(1, 0) == 1.0);
  for (Index i = 0; i < 3; ++i) CHECK(k.K(i, i) == 1.0);
  CHECK_FALSE(k.centered);
  CHECK_FALSE(k.trace_scaled);
}

TEST_CASE("rbf at distance sqrt2 with gamma one half") {
  MatrixXd X(2, 2);
  X << 0, 0, 1, 1;
  const auto k = rbf_kernel(view_of(X), 0.5);
  CHECK(k.K(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(k.K(0, 1) == doctest::Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("rbf on random data is symmetric PSD") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto k = rbf_kernel(view_of(gaussian(3 + trial, 2, rng)), 0.5);
    CHECK(k.K.isApprox(k.K.transpose(), 0.0));
    CHECK(min_over_max_eigenvalue(k.K) >= -1e-8);
  }
}

TEST_CASE("rbf rejects bad input") {
  MatrixXd X(2, 1);
  X << 0, std::nan("");
  CHECK_THROWS_AS(rbf_kernel(view_of(X), 0.5), InputError);
  CHECK_THROWS_AS(rbf_kernel(view_of(MatrixXd::Zero(2, 1)), -1.0), InputError);
  CHECK_THROWS_AS(rbf_kernel(view_of(MatrixXd::Zero(1, 1)), 0.5), InputError);
}

TEST_CASE("linear kernel of the identity is the identity") {
  const auto k = linear_kernel(view_of(MatrixXd::Identity(2, 2)));
  CHECK(k.K == MatrixXd::Identity(2, 2));
}

TEST_CASE("linear kernel duplicates rows and columns of duplicated samples") {
  MatrixXd X(3, 2);
  X << 1, 2, 1, 2, 0.5, -1;
  const auto k = linear_kernel(view_of(X));
  CHECK(k.K.row(0) == k.K.row(1));
  CHECK(k.K.col(0) == k.K.col(1));
}

TEST_CASE("linear kernel matches pairwise dot products") {
  std::mt19937_64 rng(3);
  const MatrixXd X = gaussian(4, 3, rng);
  const auto k = linear_kernel(view_of(X));
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      double dot = 0.0;
      for (Index f = 0; f < 3; ++f) dot += X(i, f) * X(j, f);
      CHECK(k.K(i, j) == doctest::Approx(dot).epsilon(1e-12));
    }
}

TEST_CASE("linear kernel rank is bounded by feature count") {
  std::mt19937_64 rng(4);
  const auto k = linear_kernel(view_of(gaussian(8, 2, rng)));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(k.K, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  CHECK((es.eigenvalues().array().abs() > 1e-10 * top).count() == 2);
}

TEST_CASE("centering is idempotent and annihilates constants") {
  std::mt19937_64 rng(5);
  KernelMatrix<double> k{mkkc::testing::random_psd(7, 4, rng)};
  const auto once = center_kernel(k);
  const auto twice = center_kernel(once);
  CHECK(once.centered);
  CHECK(mkkc::testing::max_abs_diff(once.K, twice.K) <= 1e-10);

  KernelMatrix<double> constant{MatrixXd::Constant(5, 5, 2.5)};
  CHECK(center_kernel(constant).K.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("centered kernels have zero row sums and match the projection oracle") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 3 + trial * 3;
    KernelMatrix<double> k{mkkc::testing::random_psd(n, 3, rng)};
    const auto c = center_kernel(k);
    CHECK(c.K.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(c.K.colwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(mkkc::testing::max_abs_diff(c.K, mkkc::testing::center_by_projection(k.K)) <= 1e-10);
    CHECK(c.K.isApprox(c.K.transpose(), 0.0));
  }
}

TEST_CASE("scale_kernel divides by the trace") {
  MatrixXd K(2, 2);
  K << 3, 1, 1, 1;
  const auto s = scale_kernel(KernelMatrix<double>{K});
  CHECK(s.K(0, 0) == 0.75);
  CHECK(s.K(0, 1) == 0.25);
  CHECK(s.trace_scaled);

  const auto eye = scale_kernel(KernelMatrix<double>{MatrixXd::Identity(5, 5)});
  CHECK(eye.K.isApprox(MatrixXd::Identity(5, 5) / 5.0));
  CHECK(std::abs(eye.K.trace() - 1.0) <= 1e-10);

  CHECK_THROWS_AS(scale_kernel(KernelMatrix<double>{MatrixXd::Zero(3, 3)}), DegenerateError);
}

TEST_CASE("prepare_bundle centers then scales every view") {
  std::mt19937_64 rng(8);
  const MatrixXd X = gaussian(10, 3, rng);
  const auto bundle = prepare_bundle<double>({view_of(X), view_of(X)}, {KernelSpec{KernelKind::Linear}});
  REQUIRE(bundle.views() == 2);
  CHECK(bundle[0] == bundle[1]);
  for (const auto& k : bundle.kernels) {
    CHECK(k.centered);
    CHECK(k.trace_scaled);
    CHECK(std::abs(k.K.trace() - 1.0) <= 1e-10);
    CHECK(k.K.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-8);
  }
  // Centering before scaling: the result is the centered Gram over its trace.
  const MatrixXd expected = mkkc::testing::center_by_projection(X * X.transpose());
  CHECK(mkkc::testing::max_abs_diff(bundle[0], expected / expected.trace()) <= 1e-12);
}

TEST_CASE("prepare_bundle traces sum to m and errors propagate") {
  std::mt19937_64 rng(9);
  const auto bundle = mkkc::testing::random_bundle(12, 4, rng);
  double total = 0.0;
  for (Index v = 0; v < bundle.views(); ++v) {
    total += bundle[v].trace();
    CHECK(min_over_max_eigenvalue(bundle[v]) >= -1e-8);
  }
  CHECK(total == doctest::Approx(4.0).epsilon(1e-10));

  CHECK_THROWS_AS(prepare_bundle<double>({view_of(gaussian(5, 2, rng)), view_of(gaussian(6, 2, rng))}, {KernelSpec{}}),
                  ShapeError);
  // Identical samples give a kernel that is zero after centering.
  CHECK_THROWS_AS(prepare_bundle<double>({view_of(MatrixXd::Ones(4, 2))}, {KernelSpec{}}), DegenerateError);
  CHECK_THROWS_AS(prepare_bundle<double>({view_of(gaussian(5, 2, rng))}, {KernelSpec{}, KernelSpec{}, KernelSpec{}}),
                  ShapeError);
}

TEST_CASE("paper-real gamma uses the feature count") {
  CHECK(feature_count_gamma(4) == doctest::Approx(1.0 / 18.0));
  MatrixXd X(2, 4);
  X << 0, 0, 0, 0, 1, 1, 1, 1;
  const auto k = build_kernel(view_of(X), KernelSpec{KernelKind::Rbf, 0.0, true});
  CHECK(k.K(0, 1) == doctest::Approx(std::exp(-4.0 / 18.0)));
}

TEST_CASE("combine_linear") {
  std::mt19937_64 rng(10);
  const auto bundle = mkkc::testing::random_bundle(9, 2, rng);

  CHECK(combine_linear(bundle, VectorXd::Unit(2, 0)).K == bundle[0]);
  CHECK(combine_linear(bundle, VectorXd::Zero(2)).K.isZero(0.0));
  const VectorXd half = VectorXd::Constant(2, 0.5);
  CHECK(mkkc::testing::max_abs_diff(combine_linear(bundle, half).K, 0.5 * (bundle[0] + bundle[1])) <= 1e-15);
  CHECK(std::abs(combine_linear(bundle, half).K.trace() - 1.0) <= 1e-10);

  CHECK_THROWS_AS(combine_linear(bundle, VectorXd::Ones(3)), ShapeError);
  CHECK_THROWS_AS(combine_linear(bundle, VectorXd::Constant(2, -0.1)), InputError);
}

TEST_CASE("combine_squared is combine_linear on squared weights") {
  std::mt19937_64 rng(12);
  const auto bundle = mkkc::testing::random_bundle(9, 3, rng);
  CHECK(combine_squared(bundle, VectorXd::Unit(3, 0)).K == bundle[0]);
  CHECK(mkkc::testing::max_abs_diff(combine_squared(bundle, VectorXd::Ones(3)).K, bundle[0] + bundle[1] + bundle[2]) <=
        1e-15);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd theta = VectorXd::Random(3).cwiseAbs();
    const VectorXd squared = theta.array().square();
    CHECK(mkkc::testing::max_abs_diff(combine_squared(bundle, theta).K, combine_linear(bundle, squared).K) <= 1e-15);
  }
}

TEST_CASE("centering commutes with nonnegative combination") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = mkkc::testing::uniform_index(3, 20, rng);
    const Index m = mkkc::testing::uniform_index(1, 4, rng);
    KernelBundle<double> raw;
    KernelBundle<double> centered;
    for (Index v = 0; v < m; ++v) {
      KernelMatrix<double> k{mkkc::testing::random_psd(n, 3, rng)};
      centered.kernels.push_back(center_kernel(k));
      raw.kernels.push_back(k);
    }
    const VectorXd theta = VectorXd::Random(m).cwiseAbs();
    const MatrixXd left = combine_linear(centered, theta).K;
    const MatrixXd right = mkkc::testing::center_by_projection(combine_linear(raw, theta).K);
    CHECK(mkkc::testing::max_abs_diff(left, right) <= 1e-10);
  }
}

TEST_CASE("standardize_columns uses the sample standard deviation") {
  MatrixXd X(4, 2);
  X << 1, 10, 2, 10, 3, 10, 4, 10;
  const MatrixXd Z = standardize_columns(X);
  CHECK(Z.col(0).mean() == doctest::Approx(0.0));
  CHECK(Z.col(0).squaredNorm() / 3.0 == doctest::Approx(1.0));
  // Constant columns are centered only.
  CHECK(Z.col(1).isZero(0.0));
}

TEST_CASE("single-precision kernels") {
  Eigen::MatrixXf X(3, 2);
  X << 0, 0, 1, 1, 2, 0;
  const auto bundle = prepare_bundle<float>({DataView<float>{X, "f"}}, {KernelSpec{}});
  CHECK(std::abs(bundle[0].trace() - 1.0f) <= 1e-6f);
}

}  // TEST_SUITE
