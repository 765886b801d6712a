#pragma once

#include <cstdint>
#include <vector>

#include "trda/moments.hpp"
#include "trda/rng.hpp"

namespace trda {

struct RobustConfig {
  double alpha = 0.75;           // h = ceil(alpha * n) points kept
  int n_initial_subsets = 500;
  int n_cstep_candidates = 10;   // finalists refined to convergence
  double condition_cap = 1000.0;
  std::vector<double> rho_grid;  // defaults to {0, 0.01, ..., 0.99, 1}
  std::uint64_t seed = 0;

  std::vector<double> effective_rho_grid() const;
};

struct RobustEstimate {
  Vector location;
  Matrix covariance;         // consistency-corrected, SPD
  std::vector<int> support;  // sorted row indices of the optimal h-subset
  double rho = 0.0;          // regularization weight (0 = plain MCD)
  double log_det = 0.0;      // objective value attained
};

// alpha-consistency factor for the MCD scatter under normality,
// c(alpha) = alpha / F_{chi2(p+2)}(q_alpha), q_alpha the chi2(p) quantile.
double mcd_consistency_factor(int p, double alpha);

// Fast minimum-covariance-determinant estimate: elemental starts, two warm-up
// concentration steps each, best candidates refined until the support set
// repeats. Deterministic given the stream key. Requires n >= 2(p+1).
RobustEstimate fast_mcd(const Matrix& x, const RobustConfig& cfg, const StreamKey& key);
RobustEstimate fast_mcd(const Matrix& x, const RobustConfig& cfg);

// Regularized variant: shrinks subset covariances toward a diagonal
// Qn-based target until the condition number is capped; coincides with
// fast_mcd when no shrinkage is needed and n >= 2(p+1). Works for any p.
RobustEstimate mrcd(const Matrix& x, const RobustConfig& cfg, const StreamKey& key);
RobustEstimate mrcd(const Matrix& x, const RobustConfig& cfg);

// fast_mcd when n >= 2(p+1), mrcd otherwise.
RobustEstimate robust_location_cov(const Matrix& x, const RobustConfig& cfg,
                                   const StreamKey& key);

// Plug-in scatter pair from per-group robust estimates (stream per group):
// mu = sum (n_j/n) mu_j, B = sum (n_j/n)(mu_j - mu)(mu_j - mu)',
// W = sum ((n_j - 1)/(n - g)) S_j; s_pooled = W.
ScatterPair robust_scatter(const LabeledDataset& d, const RobustConfig& cfg);
ScatterPair robust_scatter(const LabeledDataset& d, const RobustConfig& cfg,
                           const StreamKey& key);

}  // namespace trda
