#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "helpers.hpp"
#include "trda/linalg.hpp"
#include "trda/rng.hpp"

using namespace trda;

TEST_SUITE("linalg") {

TEST_CASE("sym_eig solves a known 2x2") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const auto d = sym_eig(a);
  CHECK(d.values(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(d.values(1) == doctest::Approx(1.0).epsilon(1e-12));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(test::unit_col_diff(d.vectors.col(0), (Vector(2) << s, s).finished()) < 1e-12);
  CHECK(test::unit_col_diff(d.vectors.col(1), (Vector(2) << s, -s).finished()) < 1e-12);
}

TEST_CASE("sym_eig is descending, orthonormal, sign-fixed") {
  RngStream rng({0x11});
  const Matrix a = test::random_spd(6, rng);
  const auto d = sym_eig(a);
  for (int i = 0; i + 1 < 6; ++i) CHECK(d.values(i) >= d.values(i + 1));
  CHECK((d.vectors.transpose() * d.vectors - Matrix::Identity(6, 6)).norm() < 1e-10);
  CHECK((a * d.vectors - d.vectors * d.values.asDiagonal().toDenseMatrix()).norm() < 1e-9);
  for (int j = 0; j < 6; ++j) {
    Eigen::Index arg;
    d.vectors.col(j).cwiseAbs().maxCoeff(&arg);
    CHECK(d.vectors(arg, j) > 0.0);
  }
}

TEST_CASE("sym_eig rejects non-symmetric input") {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  CHECK_THROWS_AS(sym_eig(a), std::invalid_argument);
}

TEST_CASE("gen_eig_spd on the diagonal example") {
  Matrix b(2, 2), w(2, 2);
  b << 2, 0, 0, 4;
  w << 1, 0, 0, 2;
  const auto d = gen_eig_spd(b, w);
  CHECK(std::abs(d.values(0) - 2.0) < 1e-12);
  CHECK(std::abs(d.values(1) - 2.0) < 1e-12);
  CHECK((d.vectors.transpose() * w * d.vectors - Matrix::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("gen_eig_spd with identity weight equals sym_eig") {
  RngStream rng({0x12});
  const Matrix b = test::random_spd(5, rng);
  const auto gd = gen_eig_spd(b, Matrix::Identity(5, 5));
  const auto sd = sym_eig(b);
  CHECK((gd.values - sd.values).norm() < 1e-9);
}

TEST_CASE("gen_eig_spd normalizes against the scale matrix") {
  RngStream rng({0x13});
  const Matrix b = test::random_spd(4, rng);
  const Matrix w = test::random_spd(4, rng);
  const Matrix s = 2.5 * w;
  const auto d = gen_eig_spd(b, w, &s);
  CHECK((d.vectors.transpose() * s * d.vectors - Matrix::Identity(4, 4)).norm() < 1e-9);
}

TEST_CASE("gen_eig_spd reports singular weight with a remedy") {
  Matrix b = Matrix::Identity(3, 3);
  Matrix w = Matrix::Zero(3, 3);
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;
  CHECK_THROWS_WITH_AS(gen_eig_spd(b, w),
                       doctest::Contains("range_projection"), std::runtime_error);
}

TEST_CASE("orthonormalized preserves the span") {
  RngStream rng({0x14});
  const Matrix v = test::random_matrix(5, 2, rng);
  const Matrix q = orthonormalized(v);
  CHECK((q.transpose() * q - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(subspace_angle(q, orthonormalized(v * 3.0)) < 1e-10);
}

TEST_CASE("subspace_angle known values") {
  Matrix e1(2, 1), e2(2, 1), diag(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  diag << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(subspace_angle(e1, e1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(subspace_angle(e1, e2) == doctest::Approx(std::acos(-1.0) / 2).epsilon(1e-12));
  CHECK(subspace_angle(e1, diag) == doctest::Approx(std::acos(-1.0) / 4).epsilon(1e-12));
  CHECK(subspace_angle(e1, diag) == doctest::Approx(subspace_angle(diag, e1)).epsilon(1e-12));
}

TEST_CASE("subspace_angle ignores rotations within the span") {
  RngStream rng({0x15});
  const Matrix q = orthonormalized(test::random_matrix(6, 2, rng));
  Matrix rot(2, 2);
  const double t = 0.7;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  CHECK(subspace_angle(q, q * rot) < 1e-10);
}

TEST_CASE("range_projection keeps exactly the numerical range") {
  RngStream rng({0x16});
  const Matrix g = test::random_matrix(4, 2, rng);
  const Matrix a = g * g.transpose();
  const auto basis = range_projection(a);
  REQUIRE(basis.gamma.cols() == 2);
  CHECK(basis.kept_values.size() == 2);
  CHECK((basis.gamma.transpose() * basis.gamma - Matrix::Identity(2, 2)).norm() < 1e-12);
  const Matrix proj = basis.gamma * basis.gamma.transpose();
  CHECK((proj * a - a).norm() < 1e-9);
  CHECK_THROWS_AS(range_projection(Matrix::Zero(3, 3)), std::runtime_error);
}

TEST_CASE("condition_number and spectral_norm") {
  Matrix a(2, 2);
  a << 4, 0, 0, 1;
  CHECK(condition_number(a) == doctest::Approx(4.0).epsilon(1e-12));
  Matrix sing = Matrix::Zero(2, 2);
  sing(0, 0) = 1.0;
  CHECK(std::isinf(condition_number(sing)));
  Matrix neg(2, 2);
  neg << -5, 0, 0, 2;
  CHECK(spectral_norm(neg) == doctest::Approx(5.0).epsilon(1e-12));
}

}  // TEST_SUITE
