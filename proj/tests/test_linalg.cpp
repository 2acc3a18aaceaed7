#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oja/linalg.hpp"
#include "oja/rng.hpp"

using namespace oja;

namespace {

Matrix make(std::initializer_list<std::initializer_list<Scalar>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.begin()->size());
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (Scalar v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("sym and skew split known matrices") {
  const Matrix b = make({{0, 2}, {0, 0}});
  CHECK((sym(b) - make({{0, 1}, {1, 0}})).norm() == 0);
  CHECK((skew(b) - make({{0, 1}, {-1, 0}})).norm() == 0);

  const Matrix id = Matrix::Identity(3, 3);
  CHECK((sym(id) - id).norm() == 0);
  CHECK(skew(id).norm() == 0);

  const Matrix one = Matrix::Constant(1, 1, 7.0);
  CHECK(sym(one)(0, 0) == 7.0);
  CHECK(skew(one)(0, 0) == 0.0);
}

TEST_CASE("sym + skew reproduces the input") {
  RngStream rng(11);
  // Dyadic-valued entries make every intermediate operation exact, so the
  // reconstruction must be bitwise.
  Matrix b(5, 5);
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      b(i, j) = std::floor(16 * rng.gaussian()) / 16;
    }
  }
  CHECK((sym(b) + skew(b) - b).norm() == 0);

  // Gaussian entries may round, but only at the last bit.
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix g = random_gaussian(6, 6, rng);
    CHECK((sym(g) + skew(g) - g).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((sym(g) - sym(g).transpose()).norm() == 0);
    CHECK((skew(g) + skew(g).transpose()).norm() == 0);
  }

  CHECK_THROWS_AS((void)sym(Matrix::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS((void)skew(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("jacobi_eigen on a diagonal matrix is exact") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 2;
  d(1, 1) = 3;
  d(2, 2) = 1;
  const SymmetricEigen eig = jacobi_eigen(d);
  CHECK(eig.values(0) == 3.0);
  CHECK(eig.values(1) == 2.0);
  CHECK(eig.values(2) == 1.0);
  // Columns follow the sorted eigenvalues; signs follow the convention.
  CHECK(eig.vectors(1, 0) == 1.0);
  CHECK(eig.vectors(0, 1) == 1.0);
  CHECK(eig.vectors(2, 2) == 1.0);
  CHECK((eig.vectors.transpose() * eig.vectors - Matrix::Identity(3, 3)).norm() == 0);
}

TEST_CASE("jacobi_eigen matches the hand-solved 2x2 case") {
  const Matrix a = make({{2, 1}, {1, 2}});
  const SymmetricEigen eig = jacobi_eigen(a);
  CHECK(eig.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eig.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  const Scalar r = 1 / std::sqrt(Scalar(2));
  CHECK(std::abs(eig.vectors(0, 0) - r) <= 1e-15);
  CHECK(std::abs(eig.vectors(1, 0) - r) <= 1e-15);
  // Sign convention: tied magnitudes resolve to the first entry positive.
  CHECK(std::abs(eig.vectors(0, 1) - r) <= 1e-15);
  CHECK(std::abs(eig.vectors(1, 1) + r) <= 1e-15);
}

TEST_CASE("jacobi_eigen reconstructs random SPD matrices") {
  RngStream rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 2 + static_cast<Index>(std::floor(rng.uniform01() * 11));  // 2..12
    const SpdMatrix a = random_spd_uniform(n, rng);
    const SymmetricEigen eig = jacobi_eigen(a.matrix());
    const Scalar scale = a.matrix().norm();

    const Matrix w = eig.vectors;
    CHECK((w.transpose() * w - Matrix::Identity(n, n)).norm() <= 1e-12);
    CHECK((w * eig.values.asDiagonal() * w.transpose() - a.matrix()).norm() <= 1e-10 * scale);
    CHECK((a.matrix() * w - w * eig.values.asDiagonal()).norm() <= 1e-10 * scale);
    for (Index i = 0; i + 1 < n; ++i) CHECK(eig.values(i) >= eig.values(i + 1));
  }
}

TEST_CASE("jacobi_eigen recovers a planted eigensystem") {
  RngStream rng(7);
  const Index n = 6;
  const Matrix q = haar_orthogonal(n, rng);
  Vector lambda(n);
  for (Index i = 0; i < n; ++i) lambda(i) = static_cast<Scalar>(n - i);  // 6..1
  const Matrix a = q * lambda.asDiagonal() * q.transpose();

  const SymmetricEigen eig = jacobi_eigen(a);
  CHECK((eig.values - lambda).cwiseAbs().maxCoeff() <= 1e-13);
  for (Index j = 0; j < n; ++j) {
    // Columns agree with the planted ones up to sign.
    const Scalar diff_plus = (eig.vectors.col(j) - q.col(j)).norm();
    const Scalar diff_minus = (eig.vectors.col(j) + q.col(j)).norm();
    CHECK(std::min(diff_plus, diff_minus) <= 1e-12);
  }
}

TEST_CASE("jacobi_eigen error paths") {
  CHECK_THROWS_AS((void)jacobi_eigen(Matrix::Zero(2, 3)), std::invalid_argument);
  // Zero sweep budget cannot diagonalize anything non-diagonal.
  const Matrix a = make({{2, 1}, {1, 2}});
  CHECK_THROWS_AS((void)jacobi_eigen(a, 0), std::runtime_error);
}

TEST_CASE("SpdMatrix validates its contract") {
  const Matrix good = make({{2, 0.5}, {0.5, 1}});
  const SpdMatrix a(good);
  CHECK(a.dim() == 2);
  CHECK(a.symmetry_defect() == 0);
  CHECK((a.matrix() - a.matrix().transpose()).norm() == 0);

  // Slightly asymmetric input is symmetrized and the defect recorded.
  Matrix tilted = good;
  tilted(0, 1) += 1e-13;
  const SpdMatrix b(tilted);
  CHECK(b.symmetry_defect() == doctest::Approx(std::sqrt(2.0) * 1e-13).epsilon(1e-6));
  CHECK((b.matrix() - b.matrix().transpose()).norm() == 0);

  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(SpdMatrix{indefinite}, std::invalid_argument);

  // Repeated eigenvalues violate the simple-spectrum requirement.
  CHECK_THROWS_AS(SpdMatrix{Matrix::Identity(3, 3)}, std::invalid_argument);

  Matrix near_double = Matrix::Identity(2, 2);
  near_double(1, 1) = 1 + 1e-13;
  CHECK_THROWS_AS(SpdMatrix{near_double}, std::invalid_argument);

  CHECK_THROWS_AS(SpdMatrix{Matrix::Zero(2, 3)}, std::invalid_argument);
}

TEST_CASE("spectral_decompose returns descending simple eigenvalues") {
  RngStream rng(99);
  const SpdMatrix a = random_spd_uniform(6, rng);
  const SpectralDecomposition sd = spectral_decompose(a);
  for (Index i = 0; i + 1 < 6; ++i) CHECK(sd.eigenvalues(i) > sd.eigenvalues(i + 1));
  CHECK((a.matrix() * sd.eigenvectors - sd.eigenvectors * sd.eigenvalues.asDiagonal()).norm() <=
        1e-10 * a.matrix().norm());
}

TEST_CASE("RngStream is deterministic and stream-separated") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool all_equal_c = true, all_equal_d = true;
  for (int i = 0; i < 100; ++i) {
    const Scalar va = a.gaussian();
    CHECK(va == b.gaussian());
    all_equal_c = all_equal_c && va == c.gaussian();
    all_equal_d = all_equal_d && va == d.gaussian();
  }
  CHECK_FALSE(all_equal_c);
  CHECK_FALSE(all_equal_d);
  CHECK(a.seed() == 42);
  CHECK(a.stream() == 3);
}

TEST_CASE("uniform01 lies in the half-open interval (0, 1]") {
  RngStream rng(5);
  Scalar mean = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Scalar u = rng.uniform01();
    REQUIRE(u > 0);
    REQUIRE(u <= 1);
    mean += u;
  }
  mean /= draws;
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("gaussian moments match the standard normal") {
  RngStream rng(6);
  const int draws = 1000000;
  Scalar mean = 0, second = 0;
  for (int i = 0; i < draws; ++i) {
    const Scalar g = rng.gaussian();
    mean += g;
    second += g * g;
  }
  mean /= draws;
  second /= draws;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(second - mean * mean - 1) < 0.01);
}

TEST_CASE("random_gaussian fills row by row") {
  RngStream fill(77), reference(77);
  const Matrix m = random_gaussian(2, 2, fill);
  CHECK(m(0, 0) == reference.gaussian());
  CHECK(m(0, 1) == reference.gaussian());
  CHECK(m(1, 0) == reference.gaussian());
  CHECK(m(1, 1) == reference.gaussian());
  CHECK_THROWS_AS((void)random_gaussian(0, 2, fill), std::invalid_argument);
}

TEST_CASE("haar_orthogonal produces orthogonal matrices") {
  RngStream rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix q = haar_orthogonal(5, rng);
    CHECK((q.transpose() * q - Matrix::Identity(5, 5)).norm() <= 1e-13);
  }
}

TEST_CASE("random_spd_uniform honors its sampling contract") {
  {
    RngStream r1(123), r2(123);
    const SpdMatrix a1 = random_spd_uniform(6, r1);
    const SpdMatrix a2 = random_spd_uniform(6, r2);
    CHECK((a1.matrix() - a2.matrix()).norm() == 0);
  }

  RngStream rng(31415);
  for (int rep = 0; rep < 1000; ++rep) {
    const SpdMatrix a = random_spd_uniform(6, rng);
    const SymmetricEigen eig = jacobi_eigen(a.matrix());
    CHECK(eig.values(0) <= 1 + 1e-12);
    CHECK(eig.values(5) > 0);
    for (Index i = 0; i + 1 < 6; ++i) {
      // The sampler redraws until the gap floor holds; allow recovery slack.
      CHECK(eig.values(i) - eig.values(i + 1) > 1e-6 * 0.99);
    }
    CHECK((a.matrix() - a.matrix().transpose()).norm() == 0);
  }

  RngStream small(1);
  CHECK_THROWS_AS((void)random_spd_uniform(1, small), std::invalid_argument);
}
