#pragma once

#include <optional>
#include <vector>

#include "trda/moments.hpp"
#include "trda/reduce.hpp"
#include "trda/robust.hpp"

namespace trda {

enum class Metric { euclidean, mahalanobis };

// Nearest-center rule in a projected space. With the Mahalanobis metric the
// pooled projected covariance supplies the norm; scores subtract 2 log(prior).
// Ties go to the lowest group index.
struct ClassifierModel {
  std::optional<Matrix> v;  // p x k projection; absent = rule in the full space
  Matrix centers;           // k x g
  Matrix pooled_inverse;    // k x k, identity for the Euclidean metric
  Vector log_priors;        // g
  Metric metric = Metric::euclidean;

  int g() const { return static_cast<int>(centers.cols()); }
  Eigen::Index k() const { return centers.rows(); }
};

int predict(const ClassifierModel& m, const Vector& x);
std::vector<int> predict(const ClassifierModel& m, const Matrix& x_rows);
double accuracy(const ClassifierModel& m, const LabeledDataset& d);

// Euclidean nearest projected mean with log-prior correction; centers are the
// projected training class means.
ClassifierModel nearest_projected_mean_train(const LabeledDataset& d, const Projection& proj);
// Same rule built from population parameters instead of a sample.
ClassifierModel nearest_projected_mean_from_models(const std::vector<GroupModel>& models,
                                                   const Projection& proj);
int nearest_projected_mean_predict(const ClassifierModel& m, const Vector& x);

// argmin_j ||x - mu_j||^2_{Sigma^-1} - 2 log p_j with a shared covariance.
int lda_rule(const Vector& x, const std::vector<GroupModel>& models, const Matrix& sigma);
// argmax_j log p_j - 1/2 log det Sigma_j - 1/2 ||x - mu_j||^2_{Sigma_j^-1}.
int qda_rule(const Vector& x, const std::vector<GroupModel>& models);
std::vector<int> qda_rule(const Matrix& x_rows, const std::vector<GroupModel>& models);

// Full-space parameters whose plug-in rule matches projected classification:
// mu_j = S V V' xbar_j + (I - S V V') xbar, Sigma = S + (I - S V V') B (...)'.
// Requires the pooled-scaled reducer (V' s_pooled V = I).
struct ReducedRankLdaParams {
  Matrix means;  // p x g
  Matrix sigma;  // p x p
};
ReducedRankLdaParams reduced_rank_lda_params(const ScatterPair& s, const Projection& proj,
                                             const Matrix& group_means);

// Projected robust LDA: per-group robust location/cov on the projected
// training data, pooled with (n_j - 1)/(n - g) weights, Mahalanobis rule.
ClassifierModel robust_projected_train(const LabeledDataset& d, const Projection& proj,
                                       const RobustConfig& cfg);
ClassifierModel robust_projected_train(const LabeledDataset& d, const Projection& proj,
                                       const RobustConfig& cfg, const StreamKey& key);
int robust_projected_predict(const ClassifierModel& m, const Vector& x);

}  // namespace trda
