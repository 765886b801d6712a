#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "trda/moments.hpp"

using namespace trda;

namespace {

// Two groups of two points with hand-computable moments.
LabeledDataset toy_dataset() {
  Matrix x(4, 2);
  x << 0, 0,
       2, 0,
       1, 1,
       3, 3;
  return test::make_dataset(x, {0, 0, 1, 1}, 2);
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("group_stats hand values") {
  const auto gs = group_stats(toy_dataset());
  CHECK(gs.counts == std::vector<int>{2, 2});
  CHECK((gs.means.col(0) - (Vector(2) << 1, 0).finished()).norm() < 1e-14);
  CHECK((gs.means.col(1) - (Vector(2) << 2, 2).finished()).norm() < 1e-14);
  CHECK((gs.overall_mean - (Vector(2) << 1.5, 1.0).finished()).norm() < 1e-14);
  REQUIRE(gs.covs[0].has_value());
  Matrix c0(2, 2), c1(2, 2);
  c0 << 2, 0, 0, 0;
  c1 << 2, 2, 2, 2;
  CHECK((*gs.covs[0] - c0).norm() < 1e-14);
  CHECK((*gs.covs[1] - c1).norm() < 1e-14);
}

TEST_CASE("group_stats leaves singleton covariances empty") {
  Matrix x(3, 2);
  x << 0, 0, 2, 0, 5, 5;
  const auto gs = group_stats(test::make_dataset(x, {0, 0, 1}, 2));
  CHECK(gs.covs[0].has_value());
  CHECK_FALSE(gs.covs[1].has_value());
}

TEST_CASE("classical_scatter hand values and identities") {
  const auto d = toy_dataset();
  const auto s = classical_scatter(d);
  Matrix b(2, 2), w(2, 2);
  b << 0.25, 0.5, 0.5, 1.0;
  w << 1.0, 0.5, 0.5, 0.5;
  CHECK((s.b - b).norm() < 1e-14);
  CHECK((s.w - w).norm() < 1e-14);
  CHECK(s.counts == std::vector<int>{2, 2});
  CHECK(s.source == ScatterSource::classical);

  // total scatter splits into between plus within
  Matrix total = Matrix::Zero(2, 2);
  const Vector mean = d.x.colwise().mean();
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const Vector c = d.x.row(i).transpose() - mean;
    total += c * c.transpose();
  }
  total /= static_cast<double>(d.n());
  CHECK((s.b + s.w - total).norm() < 1e-12);
  CHECK((s.s_pooled - s.w * (4.0 / 2.0)).norm() < 1e-14);
}

TEST_CASE("theoretical_scatter population formulas") {
  std::vector<GroupModel> models(2);
  models[0] = {(Vector(2) << 0, 0).finished(), Matrix::Identity(2, 2), 0.5};
  models[1] = {(Vector(2) << 2, 0).finished(), 3.0 * Matrix::Identity(2, 2), 0.5};
  const auto s = theoretical_scatter(models);
  Matrix b(2, 2);
  b << 1, 0, 0, 0;
  CHECK((s.b - b).norm() < 1e-14);
  CHECK((s.w - 2.0 * Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((s.s_pooled - s.w).norm() < 1e-14);
  CHECK(s.counts.empty());
  CHECK(s.source == ScatterSource::theoretical);
}

TEST_CASE("theoretical_scatter rejects unnormalized priors") {
  std::vector<GroupModel> models(2);
  models[0] = {Vector::Zero(2), Matrix::Identity(2, 2), 1.0};
  models[1] = {Vector::Ones(2), Matrix::Identity(2, 2), 1.0};
  CHECK_THROWS_AS(theoretical_scatter(models), std::invalid_argument);
}

TEST_CASE("qn_scale frozen values") {
  CHECK(qn_scale({1, 2, 3, 5, 8, 13, 21, 34}) == doctest::Approx(13.3314).epsilon(1e-9));
  CHECK(qn_scale({2.0, 4, 1, 9, 5}) == doctest::Approx(4.4438).epsilon(1e-9));
  CHECK(qn_scale({3.7, 3.7, 3.7, 3.7, 3.7, 3.7}) == doctest::Approx(0.0));
  CHECK(qn_scale({1.5, -2.0, 0.0, 4.25, -3.5, 2.25, 1.0}) ==
        doctest::Approx(3.33285).epsilon(1e-9));
  CHECK_THROWS_AS(qn_scale({1.0}), std::invalid_argument);
}

TEST_CASE("group_counts") {
  const auto d = test::gaussian_groups({Vector::Zero(2), Vector::Ones(2)}, 7, 1);
  CHECK(d.group_counts() == std::vector<int>{7, 7});
}

}  // TEST_SUITE
