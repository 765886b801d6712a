#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trda/linalg.hpp"

namespace trda {

// Rows of x are observations; labels are contiguous group indices 0..g-1,
// every group occupied.
struct LabeledDataset {
  Matrix x;
  std::vector<int> labels;
  int n_groups = 0;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
  std::vector<int> group_counts() const;
};

struct GroupModel {
  Vector mu;
  Matrix sigma;
  double prior = 1.0;
};

enum class ScatterSource { classical, robust, theoretical, contaminated_theoretical };

struct ScatterPair {
  Matrix b;
  Matrix w;
  Matrix s_pooled;
  std::vector<int> counts;  // empty for population sources
  ScatterSource source = ScatterSource::classical;

  Eigen::Index p() const { return b.rows(); }
  int g() const { return static_cast<int>(counts.size()); }
};

struct GroupStats {
  Matrix means;                             // p x g
  std::vector<std::optional<Matrix>> covs;  // divisor n_j - 1; absent when n_j < 2
  std::vector<int> counts;
  Vector overall_mean;
};

GroupStats group_stats(const LabeledDataset& d);

// B = n^-1 sum n_j (xbar_j - xbar)(xbar_j - xbar)', W = n^-1 sum of within
// cross products; s_pooled = n/(n-g) W.
ScatterPair classical_scatter(const LabeledDataset& d);

// W = sum p_j Sigma_j, B = sum p_j (mu_j - mu)(mu_j - mu)'; s_pooled = W.
ScatterPair theoretical_scatter(const std::vector<GroupModel>& models);

// 2.2219 times the k-th order statistic of pairwise absolute differences,
// k = C(h,2), h = floor(n/2)+1. No finite-sample correction.
double qn_scale(const std::vector<double>& x);

}  // namespace trda
