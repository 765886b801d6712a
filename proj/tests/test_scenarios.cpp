#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "trda/linalg.hpp"
#include "trda/scenarios.hpp"

using namespace trda;

TEST_SUITE("scenarios") {

TEST_CASE("scenario I parameters") {
  const auto spec = build_scenario(ScenarioId::I);
  CHECK(spec.g() == 4);
  CHECK(spec.p() == 3);
  CHECK(spec.k == 2);
  CHECK(spec.contaminated_group == 0);
  CHECK((spec.clean[0].mu - (Vector(3) << 15, 3, 0).finished()).norm() < 1e-14);
  CHECK((spec.clean[1].mu - (Vector(3) << 15, -3, 0).finished()).norm() < 1e-14);
  CHECK((spec.clean[2].mu - (Vector(3) << 0, 0, 2).finished()).norm() < 1e-14);
  CHECK((spec.clean[3].mu - (Vector(3) << 0, 0, -2).finished()).norm() < 1e-14);
  for (int j = 0; j < 4; ++j) {
    CHECK(spec.clean[static_cast<std::size_t>(j)].prior == doctest::Approx(0.25));
    const Matrix& sig = spec.clean[static_cast<std::size_t>(j)].sigma;
    CHECK(sig(0, 0) == 1.0);
    CHECK(sig(1, 2) == -0.25);
    CHECK((sig - sig.transpose()).norm() == 0.0);
  }
  CHECK((spec.contaminating[0].mu - (Vector(3) << 15, -27, 0).finished()).norm() < 1e-14);
  CHECK((spec.contaminating[0].sigma - spec.clean[0].sigma).norm() == 0.0);
}

TEST_CASE("scenario II parameters") {
  const auto spec = build_scenario(ScenarioId::II);
  CHECK(spec.contaminated_group == 1);
  CHECK((spec.clean[0].mu - (Vector(3) << 0, -3, 0).finished()).norm() < 1e-14);
  CHECK((spec.clean[2].mu - (Vector(3) << 3, 0, 1).finished()).norm() < 1e-14);
  CHECK(spec.clean[0].sigma.diagonal().isApprox((Vector(3) << 1, 3, 1).finished()));
  CHECK(spec.clean[2].sigma.diagonal().isApprox((Vector(3) << 3, 1, 3).finished()));
  CHECK((spec.contaminating[1].mu - (Vector(3) << 0, -27, 0).finished()).norm() < 1e-14);
}

TEST_CASE("scenario III parameters") {
  const auto spec = build_scenario(ScenarioId::III);
  CHECK(spec.contaminated_group == 2);
  CHECK((spec.clean[0].mu - (Vector(3) << 0, -3, 1).finished()).norm() < 1e-14);
  CHECK((spec.clean[1].mu - (Vector(3) << 10, 0, 1).finished()).norm() < 1e-14);
  CHECK((spec.clean[3].mu - (Vector(3) << -10, 0, 1).finished()).norm() < 1e-14);
  CHECK(spec.clean[1].sigma.isApprox(Matrix::Identity(3, 3)));
  CHECK(spec.clean[2].sigma(1, 1) == 3.0);
  CHECK(spec.clean[2].sigma(1, 2) == -0.5);
  CHECK((spec.contaminating[2].mu - (Vector(3) << 0, -27, 1).finished()).norm() < 1e-14);
}

TEST_CASE("scenario IV pads II with noise coordinates") {
  const auto iv0 = build_scenario(ScenarioId::IV, 0);
  const auto ii = build_scenario(ScenarioId::II);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK((iv0.clean[j].mu - ii.clean[j].mu).norm() == 0.0);
    CHECK((iv0.clean[j].sigma - ii.clean[j].sigma).norm() == 0.0);
  }

  const auto iv10 = build_scenario(ScenarioId::IV, 10);
  CHECK(iv10.p() == 13);
  CHECK(iv10.q == 10);
  for (const auto& m : iv10.clean) {
    CHECK(m.mu.tail(10).norm() == 0.0);
    CHECK(m.sigma.bottomRightCorner(10, 10).isApprox(Matrix::Identity(10, 10)));
    CHECK(m.sigma.topRightCorner(3, 10).norm() == 0.0);
  }
  CHECK(iv10.contaminating[1].mu.tail(10).norm() == 0.0);
}

TEST_CASE("q is rejected outside its domain") {
  CHECK_THROWS_AS(build_scenario(ScenarioId::I, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_scenario(ScenarioId::IV, 15), std::invalid_argument);
  for (int q : {0, 10, 20, 50, 100}) {
    CHECK(build_scenario(ScenarioId::IV, q).p() == 3 + q);
  }
}

TEST_CASE("scenario ids parse leniently") {
  CHECK(parse_scenario_id("I") == ScenarioId::I);
  CHECK(parse_scenario_id("iii") == ScenarioId::III);
  CHECK(parse_scenario_id("4") == ScenarioId::IV);
  CHECK(to_string(ScenarioId::II) == "II");
  CHECK_THROWS_AS(parse_scenario_id("V"), std::invalid_argument);
}

TEST_CASE("contamination spec flags only the designated group") {
  const auto spec = build_scenario(ScenarioId::II);
  const auto c = contamination(spec, 0.2);
  CHECK(c.epsilon == 0.2);
  CHECK(c.contaminated == std::vector<bool>{false, true, false, false});
  const auto none = contamination(spec, 0.0);
  CHECK(none.epsilon == 0.0);
  for (bool f : none.contaminated) CHECK_FALSE(f);
}

TEST_CASE("theoretical solutions match the frozen coefficients") {
  const auto [fda_i, tr_i] = theoretical_solutions(build_scenario(ScenarioId::I));
  CHECK(test::unit_col_diff(fda_i.v.col(0), (Vector(3) << 1, 0, 0).finished()) < 1e-9);
  CHECK(test::unit_col_diff(fda_i.v.col(1),
                            (Vector(3) << 0, 0.92346683447, 0.383678257965).finished()) < 1e-8);
  CHECK(tr_i.rho == doctest::Approx(34.052160907775).epsilon(1e-9));
  CHECK(test::unit_col_diff(tr_i.v.col(1),
                            (Vector(3) << 0, 0.756728429086, 0.653729366491).finished()) < 1e-7);

  const auto [fda_iii, tr_iii] = theoretical_solutions(build_scenario(ScenarioId::III));
  CHECK(test::unit_col_diff(fda_iii.v.col(1),
                            (Vector(3) << 0, 0.992277876714, 0.124034734589).finished()) < 1e-8);
  CHECK(tr_iii.rho == doctest::Approx(25.234621922307).epsilon(1e-9));
  CHECK(test::unit_col_diff(tr_iii.v.col(1),
                            (Vector(3) << 0, 0.147142685635, 0.989115276428).finished()) < 1e-7);
}

TEST_CASE("scenarios II and IV solve to the first two axes") {
  for (int q : {0, 50}) {
    const auto spec = q == 0 ? build_scenario(ScenarioId::II) : build_scenario(ScenarioId::IV, q);
    const auto [f, t] = theoretical_solutions(spec);
    Matrix axes = Matrix::Zero(spec.p(), 2);
    axes(0, 0) = axes(1, 1) = 1.0;
    CHECK(subspace_angle(orthonormalized(f.v), axes) < 1e-8);
    CHECK(subspace_angle(orthonormalized(t.v), axes) < 1e-8);
    CHECK(t.rho == doctest::Approx(2.25).epsilon(1e-10));
  }
}

}  // TEST_SUITE
