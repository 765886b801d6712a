#include "trda/scenarios.hpp"

#include <cctype>
#include <stdexcept>

namespace trda {
namespace {

std::vector<GroupModel> make_models(const Matrix& means, const std::vector<Matrix>& covs) {
  std::vector<GroupModel> models(covs.size());
  for (std::size_t j = 0; j < covs.size(); ++j) {
    models[j].mu = means.col(static_cast<Eigen::Index>(j));
    models[j].sigma = covs[j];
    models[j].prior = 1.0 / static_cast<double>(covs.size());
  }
  return models;
}

Matrix pad_cov(const Matrix& s, int q) {
  Matrix out = Matrix::Identity(s.rows() + q, s.cols() + q);
  out.topLeftCorner(s.rows(), s.cols()) = s;
  return out;
}

}  // namespace

ScenarioId parse_scenario_id(const std::string& s) {
  std::string up = s;
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "I" || up == "1") return ScenarioId::I;
  if (up == "II" || up == "2") return ScenarioId::II;
  if (up == "III" || up == "3") return ScenarioId::III;
  if (up == "IV" || up == "4") return ScenarioId::IV;
  throw std::invalid_argument("unknown scenario id: " + s);
}

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::I: return "I";
    case ScenarioId::II: return "II";
    case ScenarioId::III: return "III";
    case ScenarioId::IV: return "IV";
  }
  throw std::logic_error("unreachable");
}

ScenarioSpec build_scenario(ScenarioId id, int q) {
  if (id != ScenarioId::IV && q != 0) {
    throw std::invalid_argument("irrelevant variables are only defined for scenario IV");
  }
  if (id == ScenarioId::IV && q != 0 && q != 10 && q != 20 && q != 50 && q != 100) {
    throw std::invalid_argument("scenario IV supports q in {0, 10, 20, 50, 100}");
  }

  ScenarioSpec spec;
  spec.id = id;
  spec.q = q;

  Matrix m(3, 4), cm(3, 4);
  std::vector<Matrix> covs(4);
  switch (id) {
    case ScenarioId::I: {
      m << 15, 15, 0, 0,
            3, -3, 0, 0,
            0,  0, 2, -2;
      cm = m;
      cm(1, 0) = -27;
      Matrix s(3, 3);
      s << 1, 0, 0,
           0, 1, -0.25,
           0, -0.25, 1;
      covs = {s, s, s, s};
      spec.contaminated_group = 0;
      break;
    }
    case ScenarioId::II:
    case ScenarioId::IV: {
      m <<  0, 0, 3, -3,
           -3, 3, 0,  0,
            0, 0, 1,  1;
      cm = m;
      cm(1, 1) = -27;
      const Matrix s12 = Eigen::Vector3d{1, 3, 1}.asDiagonal();
      const Matrix s34 = Eigen::Vector3d{3, 1, 3}.asDiagonal();
      covs = {s12, s12, s34, s34};
      spec.contaminated_group = 1;
      break;
    }
    case ScenarioId::III: {
      m <<  0, 10, 0, -10,
           -3,  0, 3,   0,
            1,  1, 1,   1;
      cm = m;
      cm(1, 2) = -27;
      Matrix s3(3, 3);
      s3 << 1, 0, 0,
            0, 3, -0.5,
            0, -0.5, 1;
      covs = {Eigen::Vector3d{1, 3, 1}.asDiagonal(), Matrix::Identity(3, 3), s3,
              Matrix::Identity(3, 3)};
      spec.contaminated_group = 2;
      break;
    }
  }

  if (id == ScenarioId::IV && q > 0) {
    Matrix mp = Matrix::Zero(3 + q, 4), cmp = Matrix::Zero(3 + q, 4);
    mp.topRows(3) = m;
    cmp.topRows(3) = cm;
    m = std::move(mp);
    cm = std::move(cmp);
    for (auto& s : covs) s = pad_cov(s, q);
  }

  spec.clean = make_models(m, covs);
  spec.contaminating = make_models(cm, covs);
  return spec;
}

ContaminationSpec contamination(const ScenarioSpec& spec, double epsilon) {
  ContaminationSpec c;
  c.epsilon = epsilon;
  c.contaminating = spec.contaminating;
  c.contaminated.assign(spec.clean.size(), false);
  if (epsilon > 0.0) c.contaminated[spec.contaminated_group] = true;
  return c;
}

std::pair<Projection, Projection> theoretical_solutions(const ScenarioSpec& spec) {
  const ScatterPair s = theoretical_scatter(spec.clean);
  Projection f = fda(s, spec.k);
  TrOptions opts;
  Projection t = solve_tr(s, spec.k, opts);
  return {std::move(f), std::move(t)};
}

}  // namespace trda
