#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "oja/field.hpp"
#include "oja/rng.hpp"

using namespace oja;

namespace {

OjaProblem random_problem(Index n, Index p, RngStream& rng) {
  return OjaProblem(random_spd_uniform(n, rng), p);
}

Matrix fd_oja_df(const OjaProblem& prob, const Matrix& x, const Matrix& z, Scalar h) {
  return (oja_f(prob, Iterate(x + h * z)) - oja_f(prob, Iterate(x - h * z))) / (2 * h);
}

Matrix fd_xi_dlift(const OjaProblem& prob, const Matrix& x, const Matrix& z, Scalar h) {
  return (xi_lift(prob, Iterate(x + h * z)) - xi_lift(prob, Iterate(x - h * z))) / (2 * h);
}

Matrix orthogonal_complement(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  const Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), x.rows());
  return q.rightCols(x.rows() - x.cols());
}

}  // namespace

TEST_CASE("field vanishes exactly on eigenvector columns of a diagonal matrix") {
  Matrix a = Matrix::Zero(4, 4);
  a.diagonal() << 4, 3, 2, 1;
  const OjaProblem prob(SpdMatrix(a), 2);
  Matrix x = Matrix::Zero(4, 2);
  x(0, 0) = 1;
  x(1, 1) = 1;
  CHECK(oja_f(prob, Iterate(x)).norm() == 0);
  CHECK(xi_lift(prob, Iterate(x)).norm() == 0);
}

TEST_CASE("field value on a hand-computed single-column case") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 2, 1;
  const OjaProblem prob(SpdMatrix(a), 1);
  Matrix x(2, 1);
  x << 2, 0;
  const Matrix f = oja_f(prob, Iterate(x));
  // F = A x - x (x^T A x) = (4, 0) - (2, 0) * 8 = (-12, 0).
  CHECK(f(0, 0) == -12.0);
  CHECK(f(1, 0) == 0.0);

  // With one column there is no vertical correction: the lift equals F.
  CHECK((xi_lift(prob, Iterate(x)) - f).norm() == 0);
}

TEST_CASE("field is equivariant under orthogonal column mixing") {
  RngStream rng(21);
  for (int rep = 0; rep < 25; ++rep) {
    const OjaProblem prob = random_problem(6, 3, rng);
    const Iterate x(random_gaussian(6, 3, rng));
    const Matrix q = haar_orthogonal(3, rng);
    const Iterate xq(x.x() * q);
    const Scalar scale = oja_f(prob, x).norm();
    CHECK((oja_f(prob, xq) - oja_f(prob, x) * q).norm() <= 1e-13 * (1 + scale));
    CHECK((xi_lift(prob, xq) - xi_lift(prob, x) * q).norm() <= 1e-13 * (1 + scale));
  }
}

TEST_CASE("lift is horizontal and differs from the raw field by a vertical part") {
  RngStream rng(22);
  for (int rep = 0; rep < 25; ++rep) {
    const OjaProblem prob = random_problem(7, 3, rng);
    const Iterate x(random_gaussian(7, 3, rng));
    const Matrix xi = xi_lift(prob, x);
    CHECK(project_skew(x, xi).norm() <= 1e-13 * (1 + xi.norm()));
    const Matrix diff = oja_f(prob, x) - xi;
    CHECK((project_horizontal(x, diff)).norm() <= 1e-12 * (1 + diff.norm()));
  }
}

TEST_CASE("derivative of the field matches the symbolic single-column case") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 2, 1;
  const OjaProblem prob(SpdMatrix(a), 1);
  RngStream rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const Scalar xv = 2 * rng.uniform01() - 1;
    if (std::abs(xv) < 0.1) continue;
    Matrix x(2, 1), z(2, 1);
    x << xv, 0;
    const Scalar z1 = rng.gaussian(), z2 = rng.gaussian();
    z << z1, z2;
    const Matrix df = oja_df(prob, Iterate(x), z);
    CHECK(std::abs(df(0, 0) - 2 * z1 * (1 - 3 * xv * xv)) <= 1e-13);
    CHECK(std::abs(df(1, 0) - z2 * (1 - 2 * xv * xv)) <= 1e-13);
  }
}

TEST_CASE("derivatives match central differences") {
  RngStream rng(24);
  const Scalar h = 1e-6;
  for (int rep = 0; rep < 25; ++rep) {
    const Index n = 4 + static_cast<Index>(std::floor(rng.uniform01() * 4));  // 4..7
    const Index p = 1 + static_cast<Index>(std::floor(rng.uniform01() * 3));  // 1..3
    const OjaProblem prob = random_problem(n, p, rng);
    const Iterate x(random_gaussian(n, p, rng));
    const Matrix z = random_gaussian(n, p, rng);

    const Matrix df = oja_df(prob, x, z);
    const Matrix df_fd = fd_oja_df(prob, x.x(), z, h);
    CHECK((df - df_fd).norm() <= 1e-7 * (1 + df.norm()));

    const Matrix dxi = xi_dlift(prob, x, z);
    const Matrix dxi_fd = fd_xi_dlift(prob, x.x(), z, h);
    CHECK((dxi - dxi_fd).norm() <= 1e-7 * (1 + dxi.norm()));

    // The covariant operator is the projected derivative; compare on a
    // horizontal probe.
    const Matrix zh = project_horizontal(x, z);
    const LinearOperator op = newton_operator(prob, x);
    const Matrix lhs = op.apply(zh);
    const Matrix rhs = project_horizontal(x, fd_xi_dlift(prob, x.x(), zh, h));
    CHECK((lhs - rhs).norm() <= 1e-7 * (1 + lhs.norm()));
  }
}

TEST_CASE("derivative operators are linear") {
  RngStream rng(25);
  const OjaProblem prob = random_problem(6, 3, rng);
  const Iterate x(random_gaussian(6, 3, rng));
  const LinearOperator ops[] = {plain_jacobian_operator(prob, x),
                                lift_jacobian_operator(prob, x),
                                newton_operator(prob, x),
                                augmented_newton_operator(prob, x)};
  for (const LinearOperator& op : ops) {
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix z1 = random_gaussian(6, 3, rng);
      const Matrix z2 = random_gaussian(6, 3, rng);
      const Scalar a = rng.gaussian(), b = rng.gaussian();
      const Matrix lhs = op.apply(a * z1 + b * z2);
      const Matrix rhs = a * op.apply(z1) + b * op.apply(z2);
      CHECK((lhs - rhs).norm() <= 1e-12 * (1 + lhs.norm()));
    }
    CHECK(op.apply(Matrix::Zero(6, 3)).norm() == 0);
  }
}

TEST_CASE("Jacobian block structure at a zero") {
  RngStream rng(26);
  const SpdMatrix a = random_spd_uniform(6, rng);
  const OjaProblem prob(a, 3);
  const SpectralDecomposition sd = spectral_decompose(a);

  // A non-dominant invariant subspace exercises the general case.
  Matrix xs(6, 3);
  xs.col(0) = sd.eigenvectors.col(0);
  xs.col(1) = sd.eigenvectors.col(2);
  xs.col(2) = sd.eigenvectors.col(4);
  const Iterate x(xs);
  const Matrix b = sym(xs.transpose() * (a.matrix() * xs));
  const Scalar a_norm = a.matrix().norm();

  // Vertical directions are annihilated.
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix w = skew(random_gaussian(3, 3, rng));
    CHECK(xi_dlift(prob, x, xs * w).norm() <= 1e-12 * a_norm * w.norm());
    // The plain Jacobian annihilates them as well (the degenerate kernel).
    CHECK(oja_df(prob, x, xs * w).norm() <= 1e-12 * a_norm * w.norm());
  }

  // Symmetric in-span directions map to -X (S B + B S).
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix s = sym(random_gaussian(3, 3, rng));
    const Matrix lhs = xi_dlift(prob, x, xs * s);
    const Matrix rhs = -xs * (s * b + b * s);
    CHECK((lhs - rhs).norm() <= 1e-12 * a_norm * s.norm());
  }

  // Out-of-span directions map to A Z - Z B, staying out of span.
  const Matrix xperp = orthogonal_complement(xs);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix z = xperp * random_gaussian(3, 3, rng);
    const Matrix lhs = xi_dlift(prob, x, z);
    const Matrix rhs = a.matrix() * z - z * b;
    CHECK((lhs - rhs).norm() <= 1e-12 * a_norm * z.norm());
    CHECK((project_perp(x, lhs) - lhs).norm() <= 1e-12 * a_norm * z.norm());
  }
}

TEST_CASE("dense_operator_matrix materializes operators faithfully") {
  LinearOperator ident;
  ident.rows = 3;
  ident.cols = 2;
  ident.apply = [](const Matrix& z) { return z; };
  CHECK((dense_operator_matrix(ident) - Matrix::Identity(6, 6)).norm() == 0);

  RngStream rng(27);
  const OjaProblem prob = random_problem(5, 2, rng);
  const Iterate x(random_gaussian(5, 2, rng));
  const LinearOperator op = lift_jacobian_operator(prob, x);
  const Matrix m = dense_operator_matrix(op);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix z = random_gaussian(5, 2, rng);
    const Vector lhs = m * vectorize(z);
    const Vector rhs = vectorize(op.apply(z));
    CHECK((lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm()));
  }

  LinearOperator empty;
  CHECK_THROWS_AS((void)dense_operator_matrix(empty), std::invalid_argument);
}

TEST_CASE("verify_zero separates zeros, rotated zeros, and scaled bases") {
  RngStream rng(28);
  const SpdMatrix a = random_spd_uniform(6, rng);
  const OjaProblem prob(a, 3);
  const SpectralDecomposition sd = spectral_decompose(a);
  const Matrix basis = sd.eigenvectors.leftCols(3);

  const ZeroReport at_zero = verify_zero(prob, Iterate(basis), 1e-12);
  CHECK(at_zero.is_zero_f);
  CHECK(at_zero.is_zero_xi);
  CHECK(at_zero.f_norm <= 1e-12);
  CHECK(at_zero.xi_norm <= 1e-12);
  CHECK(at_zero.invariant_subspace_defect <= 1e-12);
  CHECK(at_zero.orthonormality_defect <= 1e-12);

  const Matrix q = haar_orthogonal(3, rng);
  const ZeroReport rotated = verify_zero(prob, Iterate(basis * q), 1e-12);
  CHECK(rotated.is_zero_f);
  CHECK(rotated.is_zero_xi);

  // Scaling ruins the zero: the lift is -6 V B, far from zero, while the
  // subspace itself stays invariant.
  const ZeroReport scaled = verify_zero(prob, Iterate(2 * basis), 1e-12);
  CHECK_FALSE(scaled.is_zero_f);
  CHECK_FALSE(scaled.is_zero_xi);
  CHECK(scaled.xi_norm > 1e-3);
  CHECK(scaled.invariant_subspace_defect <= 1e-12);
  CHECK(scaled.orthonormality_defect == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("nondegeneracy_check reports the structure at a simple zero") {
  RngStream rng(29);
  const SpdMatrix a = random_spd_uniform(6, rng);
  const OjaProblem prob(a, 3);
  const SpectralDecomposition sd = spectral_decompose(a);
  const Matrix basis = sd.eigenvectors.leftCols(3);

  const NondegeneracyReport rep = nondegeneracy_check(prob, Iterate(basis));
  CHECK(rep.full_kernel_dim == 3);  // p(p-1)/2 skew directions
  CHECK(rep.sigma_min_horizontal > 1e-8 * a.matrix().norm());
  CHECK(rep.pp_block_sigma_min > 1e-8 * a.matrix().norm());
  CHECK(rep.zero_block_defect <= 1e-10);
  CHECK(rep.block_structure_ok);

  // The sym-sym block spectrum is {beta_i + beta_j} over i <= j.
  REQUIRE(rep.beta.size() == 3);
  std::vector<Scalar> expected;
  for (Index i = 0; i < 3; ++i) {
    for (Index j = i; j < 3; ++j) expected.push_back(rep.beta(i) + rep.beta(j));
  }
  std::sort(expected.begin(), expected.end(), std::greater<Scalar>());
  REQUIRE(rep.sylvester_eigenvalues.size() == static_cast<Index>(expected.size()));
  for (Index k = 0; k < rep.sylvester_eigenvalues.size(); ++k) {
    CHECK(std::abs(rep.sylvester_eigenvalues(k) - expected[static_cast<std::size_t>(k)]) <=
          1e-10);
  }

  // Betas are the eigenvalues of A restricted to the subspace.
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(rep.beta(i) - sd.eigenvalues(i)) <= 1e-12);
  }

  CHECK_THROWS_AS((void)nondegeneracy_check(prob, Iterate(random_gaussian(6, 3, rng))),
                  std::invalid_argument);
}

TEST_CASE("problem construction validates the column count") {
  RngStream rng(30);
  const SpdMatrix a = random_spd_uniform(4, rng);
  CHECK_THROWS_AS(OjaProblem(a, 0), std::invalid_argument);
  CHECK_THROWS_AS(OjaProblem(a, 4), std::invalid_argument);
  const OjaProblem ok(a, 2);
  CHECK(ok.n() == 4);
}
