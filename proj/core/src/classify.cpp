#include "trda/classify.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace trda {
namespace {

Vector log_priors_from_counts(const std::vector<int>& counts, Eigen::Index n) {
  Vector lp(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t j = 0; j < counts.size(); ++j) {
    lp(static_cast<Eigen::Index>(j)) =
        std::log(static_cast<double>(counts[j]) / static_cast<double>(n));
  }
  return lp;
}

int argmin_score(const Vector& scores) {
  int best = 0;
  for (Eigen::Index j = 1; j < scores.size(); ++j) {
    if (scores(j) < scores(best)) best = static_cast<int>(j);
  }
  return best;
}

Matrix projected_group_means(const LabeledDataset& d, const Projection& proj) {
  if (proj.v.rows() != d.p()) {
    throw std::invalid_argument("classify: projection and data dimensions differ");
  }
  const GroupStats stats = group_stats(d);
  return proj.v.transpose() * stats.means;
}

}  // namespace

int predict(const ClassifierModel& m, const Vector& x) {
  Vector u;
  if (m.v) {
    if (x.size() != m.v->rows()) {
      throw std::invalid_argument("classify: probe dimension does not match the training space");
    }
    u = m.v->transpose() * x;
  } else {
    if (x.size() != m.centers.rows()) {
      throw std::invalid_argument("classify: probe dimension does not match the training space");
    }
    u = x;
  }
  Vector scores(m.g());
  for (int j = 0; j < m.g(); ++j) {
    const Vector c = u - m.centers.col(j);
    const double d2 = (m.metric == Metric::euclidean) ? c.squaredNorm()
                                                      : c.dot(m.pooled_inverse * c);
    scores(j) = d2 - 2.0 * m.log_priors(j);
  }
  return argmin_score(scores);
}

std::vector<int> predict(const ClassifierModel& m, const Matrix& x_rows) {
  std::vector<int> labels(static_cast<std::size_t>(x_rows.rows()));
  for (Eigen::Index i = 0; i < x_rows.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] = predict(m, Vector(x_rows.row(i).transpose()));
  }
  return labels;
}

double accuracy(const ClassifierModel& m, const LabeledDataset& d) {
  const std::vector<int> pred = predict(m, d.x);
  Eigen::Index hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == d.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(d.n());
}

ClassifierModel nearest_projected_mean_train(const LabeledDataset& d, const Projection& proj) {
  ClassifierModel m;
  m.v = proj.v;
  m.centers = projected_group_means(d, proj);
  m.pooled_inverse = Matrix::Identity(proj.k(), proj.k());
  m.log_priors = log_priors_from_counts(d.group_counts(), d.n());
  m.metric = Metric::euclidean;
  return m;
}

ClassifierModel nearest_projected_mean_from_models(const std::vector<GroupModel>& models,
                                                   const Projection& proj) {
  ClassifierModel m;
  m.v = proj.v;
  m.centers.resize(proj.k(), static_cast<Eigen::Index>(models.size()));
  m.log_priors.resize(static_cast<Eigen::Index>(models.size()));
  for (std::size_t j = 0; j < models.size(); ++j) {
    m.centers.col(static_cast<Eigen::Index>(j)) = proj.v.transpose() * models[j].mu;
    m.log_priors(static_cast<Eigen::Index>(j)) = std::log(models[j].prior);
  }
  m.pooled_inverse = Matrix::Identity(proj.k(), proj.k());
  m.metric = Metric::euclidean;
  return m;
}

int nearest_projected_mean_predict(const ClassifierModel& m, const Vector& x) {
  return predict(m, x);
}

int lda_rule(const Vector& x, const std::vector<GroupModel>& models, const Matrix& sigma) {
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("lda_rule: shared covariance is not SPD");
  }
  Vector scores(static_cast<Eigen::Index>(models.size()));
  for (std::size_t j = 0; j < models.size(); ++j) {
    const Vector c = x - models[j].mu;
    scores(static_cast<Eigen::Index>(j)) =
        c.dot(llt.solve(c)) - 2.0 * std::log(models[j].prior);
  }
  return argmin_score(scores);
}

int qda_rule(const Vector& x, const std::vector<GroupModel>& models) {
  Vector scores(static_cast<Eigen::Index>(models.size()));
  for (std::size_t j = 0; j < models.size(); ++j) {
    const Eigen::LLT<Matrix> llt(models[j].sigma);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("qda_rule: group covariance is not SPD");
    }
    const double log_det = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    const Vector c = x - models[j].mu;
    // negated so the shared argmin tie-break (lowest index) applies
    scores(static_cast<Eigen::Index>(j)) =
        log_det + c.dot(llt.solve(c)) - 2.0 * std::log(models[j].prior);
  }
  return argmin_score(scores);
}

std::vector<int> qda_rule(const Matrix& x_rows, const std::vector<GroupModel>& models) {
  std::vector<int> labels(static_cast<std::size_t>(x_rows.rows()));
  for (Eigen::Index i = 0; i < x_rows.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] = qda_rule(Vector(x_rows.row(i).transpose()), models);
  }
  return labels;
}

ReducedRankLdaParams reduced_rank_lda_params(const ScatterPair& s, const Projection& proj,
                                             const Matrix& group_means) {
  if (proj.scaling != ProjScaling::s_pooled_orthonormal) {
    throw std::invalid_argument("reduced_rank_lda_params: projection must be pooled-scaled");
  }
  const Eigen::Index p = s.p();
  const Matrix sv = s.s_pooled * proj.v;
  const Matrix normal = (proj.v.transpose() * sv - Matrix::Identity(proj.k(), proj.k()));
  if (normal.cwiseAbs().maxCoeff() > 1e-6) {
    throw std::invalid_argument("reduced_rank_lda_params: V' s_pooled V != I");
  }
  const Matrix proj_sv = sv * proj.v.transpose();            // s_pooled V V'
  const Matrix residual = Matrix::Identity(p, p) - proj_sv;  // I - s_pooled V V'

  Vector grand = Vector::Zero(p);
  if (!s.counts.empty()) {
    double n = 0.0;
    for (int j = 0; j < group_means.cols(); ++j) {
      grand += static_cast<double>(s.counts[static_cast<std::size_t>(j)]) * group_means.col(j);
      n += static_cast<double>(s.counts[static_cast<std::size_t>(j)]);
    }
    grand /= n;
  } else {
    grand = group_means.rowwise().mean();
  }

  ReducedRankLdaParams out;
  out.means.resize(p, group_means.cols());
  for (int j = 0; j < group_means.cols(); ++j) {
    out.means.col(j) = proj_sv * group_means.col(j) + residual * grand;
  }
  out.sigma = s.s_pooled + residual * s.b * residual.transpose();
  return out;
}

ClassifierModel robust_projected_train(const LabeledDataset& d, const Projection& proj,
                                       const RobustConfig& cfg, const StreamKey& key) {
  if (proj.v.rows() != d.p()) {
    throw std::invalid_argument("classify: projection and data dimensions differ");
  }
  const Matrix u = d.x * proj.v;
  const std::vector<int> counts = d.group_counts();
  const double n = static_cast<double>(d.n());
  const int g = d.n_groups;

  ClassifierModel m;
  m.v = proj.v;
  m.centers.resize(proj.k(), g);
  Matrix pooled = Matrix::Zero(proj.k(), proj.k());
  for (int j = 0; j < g; ++j) {
    const int nj = counts[static_cast<std::size_t>(j)];
    Matrix uj(nj, proj.k());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      if (d.labels[static_cast<std::size_t>(i)] == j) uj.row(r++) = u.row(i);
    }
    RobustEstimate est;
    try {
      est = robust_location_cov(uj, cfg, key.with(static_cast<std::uint64_t>(j)));
    } catch (const std::exception& e) {
      throw std::runtime_error("robust_projected_train: group " + std::to_string(j) + ": " +
                               e.what());
    }
    m.centers.col(j) = est.location;
    pooled += ((static_cast<double>(nj) - 1.0) / (n - g)) * est.covariance;
  }
  const Eigen::LLT<Matrix> llt(pooled);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("robust_projected_train: pooled projected covariance is not SPD");
  }
  m.pooled_inverse = llt.solve(Matrix::Identity(proj.k(), proj.k()));
  m.log_priors = log_priors_from_counts(counts, d.n());
  m.metric = Metric::mahalanobis;
  return m;
}

ClassifierModel robust_projected_train(const LabeledDataset& d, const Projection& proj,
                                       const RobustConfig& cfg) {
  return robust_projected_train(d, proj, cfg, StreamKey{{cfg.seed}});
}

int robust_projected_predict(const ClassifierModel& m, const Vector& x) {
  return predict(m, x);
}

}  // namespace trda
