#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "mwgl/signals.hpp"

using namespace mwgl;

namespace {

ProductModel p2p2() {
  WeightVector g = WeightVector::zeros(2);
  g.w(0) = 1.0;
  return ProductModel{g, g};
}

}  // namespace

TEST_CASE("samples are orthogonal to the constant vector") {
  std::mt19937_64 rng(53);
  const ProductModel model{testhelp::random_connected(4, rng),
                           testhelp::random_connected(5, rng)};
  const SignalSet s = sample_igmrf(model, 50, 999);
  for (const Matrix& x : s.data)
    CHECK(std::abs(x.sum()) <= 1e-9 * std::max(1.0, x.norm()));
}

TEST_CASE("mean Dirichlet energy equals the Laplacian rank") {
  std::mt19937_64 rng(59);
  const ProductModel model{testhelp::random_connected(3, rng),
                           testhelp::random_connected(4, rng)};
  const Matrix L = laplacian_from_weights(product_weights(model.g1, model.g2));
  const int n = 100000;
  const SignalSet s = sample_igmrf(model, n, 4242);
  double acc = 0.0;
  for (const Matrix& x : s.data) {
    const Matrix xt = x.transpose();
    Eigen::Map<const Vector> v(xt.data(), model.nodes());
    acc += v.dot(L * v);
  }
  const double expected = model.nodes() - 1;
  CHECK_THAT(acc / n, Catch::Matchers::WithinRel(expected, 0.02));
}

TEST_CASE("empirical covariance approaches the pseudo-inverse") {
  const ProductModel model = p2p2();
  const Matrix K = testhelp::kronecker_sum(laplacian_from_weights(model.g1),
                                           laplacian_from_weights(model.g2));
  const Matrix pinv = testhelp::dense_pinv(K);
  const SignalSet s = sample_igmrf(model, 100000, 7);
  const Matrix scm = full_sample_covariance(s);
  CHECK((scm - pinv).norm() / pinv.norm() <= 0.05);
}

TEST_CASE("sampling errors") {
  CHECK_THROWS_AS(sample_igmrf(p2p2(), 0, 1), InvalidInput);
  ProductModel broken = p2p2();
  broken.g1.w(0) = 0.0;
  CHECK_THROWS_AS(sample_igmrf(broken, 5, 1), DisconnectedGraph);
}

TEST_CASE("sampler is deterministic in (model, n, seed)") {
  std::mt19937_64 rng(61);
  const ProductModel model{testhelp::random_connected(3, rng),
                           testhelp::random_connected(3, rng)};
  const SignalSet a = sample_igmrf(model, 17, 12345);
  const SignalSet b = sample_igmrf(model, 17, 12345);
  const SignalSet c = sample_igmrf(model, 17, 54321);
  for (int k = 0; k < 17; ++k)
    CHECK((a.data[k] - b.data[k]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.data[0] - c.data[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("covariance error decays like the square root of n") {
  std::mt19937_64 rng(67);
  const ProductModel model{testhelp::random_connected(4, rng),
                           testhelp::random_connected(4, rng)};
  const Matrix pinv = testhelp::dense_pinv(testhelp::kronecker_sum(
      laplacian_from_weights(model.g1), laplacian_from_weights(model.g2)));
  auto err_at = [&](int n) {
    const SignalSet s = sample_igmrf(model, n, 31337);
    return (full_sample_covariance(s) - pinv).norm() / pinv.norm();
  };
  const double ratio = err_at(20000) / err_at(5000);  // prediction: 0.5
  CHECK(ratio >= 0.3);
  CHECK(ratio <= 0.8);
}

TEST_CASE("mode covariances on single fixed samples") {
  SignalSet s;
  s.p1 = s.p2 = 2;
  s.data.push_back(Matrix::Identity(2, 2));
  ModeCovariances c = mode_covariances(s);
  CHECK((c.s1 - Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK((c.s2 - Matrix::Identity(2, 2)).norm() == 0.0);

  s.data[0] = Matrix::Ones(2, 2);
  c = mode_covariances(s);
  CHECK((c.s1 - Matrix::Constant(2, 2, 2.0)).norm() == 0.0);
  CHECK((c.s2 - Matrix::Constant(2, 2, 2.0)).norm() == 0.0);

  s.data.clear();
  CHECK_THROWS_AS(mode_covariances(s), InvalidInput);
}

TEST_CASE("trace decomposition over the product Laplacian") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    const ProductModel model{testhelp::random_connected(3 + trial % 3, rng),
                             testhelp::random_connected(4, rng)};
    const SignalSet s = sample_igmrf(model, 9, 100 + trial);
    const ModeCovariances c = mode_covariances(s);
    const Matrix L1 = laplacian_from_weights(model.g1);
    const Matrix L2 = laplacian_from_weights(model.g2);
    const Matrix S = full_sample_covariance(s);
    const double joint =
        (testhelp::kronecker_sum(L1, L2).array() * S.array()).sum();
    const double split =
        (L1.array() * c.s1.array()).sum() + (L2.array() * c.s2.array()).sum();
    CHECK_THAT(joint, Catch::Matchers::WithinAbs(split, 1e-10));
    CHECK_THAT(c.s1.trace(), Catch::Matchers::WithinRel(c.s2.trace(), 1e-12));
  }
}

TEST_CASE("full sample covariance basics") {
  SignalSet s;
  s.p1 = s.p2 = 2;
  s.data.push_back(Matrix::Ones(2, 2));
  CHECK((full_sample_covariance(s) - Matrix::Ones(4, 4)).norm() == 0.0);

  std::mt19937_64 rng(73);
  const ProductModel model{testhelp::random_connected(3, rng),
                           testhelp::random_connected(3, rng)};
  const Matrix scm = full_sample_covariance(sample_igmrf(model, 4, 5));
  Eigen::SelfAdjointEigenSolver<Matrix> es(scm);
  CHECK(es.eigenvalues()(0) >= -1e-12);
}

TEST_CASE("two-way centering removes mode means") {
  std::mt19937_64 rng(79);
  std::normal_distribution<double> gauss;
  SignalSet s;
  s.p1 = 3;
  s.p2 = 4;
  for (int k = 0; k < 6; ++k) {
    Matrix x(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) x(i, j) = gauss(rng) + i - 2.0 * j;
    s.data.push_back(x);
  }
  const SignalSet centered = center_modes(s);
  Vector col_mean = Vector::Zero(4);
  for (const Matrix& x : centered.data)
    col_mean += x.colwise().mean().transpose();
  CHECK(col_mean.cwiseAbs().maxCoeff() <= 1e-12);
}
