#include "trda/robust.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>

namespace trda {
namespace {

constexpr std::uint64_t kRegularizedWord = 0x4d524344u;
constexpr int kMaxElementalRedraws = 1000;
constexpr int kMaxCsteps = 500;

struct SubsetStats {
  Vector mean;
  Matrix cov;  // divisor h - 1
};

SubsetStats subset_stats(const Matrix& x, const std::vector<int>& idx) {
  const Eigen::Index p = x.cols();
  const auto h = static_cast<Eigen::Index>(idx.size());
  Vector mean = Vector::Zero(p);
  for (int i : idx) mean += x.row(i).transpose();
  mean /= static_cast<double>(h);
  Matrix cov = Matrix::Zero(p, p);
  for (int i : idx) {
    const Vector c = x.row(i).transpose() - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(h - 1);
  return {std::move(mean), std::move(cov)};
}

double llt_log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
}

// h indices of smallest squared Mahalanobis distance; ties broken by index.
std::vector<int> concentrate(const Matrix& x, const Vector& mean,
                             const Eigen::LLT<Matrix>& llt, int h) {
  const Eigen::Index n = x.rows();
  Matrix centered = x.rowwise() - mean.transpose();
  Matrix solved = llt.solve(centered.transpose());
  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = {centered.row(i).dot(solved.col(i)),
                                         static_cast<int>(i)};
  }
  std::nth_element(dist.begin(), dist.begin() + (h - 1), dist.end());
  std::vector<int> keep(static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) keep[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
  std::sort(keep.begin(), keep.end());
  return keep;
}

int subset_size(double alpha, Eigen::Index n) {
  if (alpha < 0.5 || alpha > 1.0) {
    throw std::invalid_argument("robust estimation: alpha must lie in [0.5, 1]");
  }
  return static_cast<int>(std::ceil(alpha * static_cast<double>(n)));
}

std::vector<int> draw_distinct(RngStream& rng, int count, Eigen::Index n) {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(count));
  int guard = 0;
  while (static_cast<int>(idx.size()) < count) {
    const int cand = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    if (std::find(idx.begin(), idx.end(), cand) == idx.end()) {
      idx.push_back(cand);
    } else if (++guard > 100000) {
      throw std::runtime_error("robust estimation: subset sampling exhausted");
    }
  }
  return idx;
}

struct Candidate {
  std::vector<int> support;
  double log_det = std::numeric_limits<double>::infinity();
};

void check_monotone(double before, double after) {
  if (after > before + 1e-10 * std::max(1.0, std::abs(before))) {
    throw std::logic_error("robust estimation: concentration step increased the determinant");
  }
}

// One concentration pass: stats of the support, then reselect h points.
// Returns false (and leaves the candidate untouched) when the support repeats.
bool cstep(const Matrix& x, int h, Candidate& cand,
           const std::function<Eigen::LLT<Matrix>(const SubsetStats&)>& shape) {
  const SubsetStats st = subset_stats(x, cand.support);
  const Eigen::LLT<Matrix> llt = shape(st);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("robust estimation: singular h-subset covariance");
  }
  const double ld = llt_log_det(llt);
  check_monotone(cand.log_det, ld);
  cand.log_det = ld;
  std::vector<int> next = concentrate(x, st.mean, llt, h);
  if (next == cand.support) return false;
  cand.support = std::move(next);
  return true;
}

RobustEstimate run_mcd_candidates(const Matrix& x, int h, const RobustConfig& cfg,
                                  std::vector<Candidate> candidates,
                                  const std::function<Eigen::LLT<Matrix>(const SubsetStats&)>& shape,
                                  const std::function<RobustEstimate(const Candidate&)>& finish) {
  for (auto& cand : candidates) {
    for (int t = 0; t < 2; ++t) {
      if (!cstep(x, h, cand, shape)) break;
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.log_det < b.log_det; });
  const std::size_t keep = std::min<std::size_t>(candidates.size(),
                                                 static_cast<std::size_t>(cfg.n_cstep_candidates));
  candidates.resize(keep);

  for (auto& cand : candidates) {
    for (int t = 0; t < kMaxCsteps && cstep(x, h, cand, shape); ++t) {
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.log_det < b.log_det; });
  return finish(candidates.front());
}

}  // namespace

std::vector<double> RobustConfig::effective_rho_grid() const {
  std::vector<double> grid = rho_grid;
  if (grid.empty()) {
    for (int i = 0; i <= 100; ++i) grid.push_back(static_cast<double>(i) / 100.0);
  }
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 0.0 || grid.back() > 1.0) {
    throw std::invalid_argument("robust estimation: rho grid must ascend within [0, 1]");
  }
  return grid;
}

double mcd_consistency_factor(int p, double alpha) {
  if (p < 1) throw std::invalid_argument("mcd_consistency_factor: p must be positive");
  if (alpha < 0.5 || alpha > 1.0) {
    throw std::invalid_argument("mcd_consistency_factor: alpha must lie in [0.5, 1]");
  }
  if (alpha >= 1.0 - 1e-12) return 1.0;
  const boost::math::chi_squared base(static_cast<double>(p));
  const boost::math::chi_squared shifted(static_cast<double>(p + 2));
  const double q = boost::math::quantile(base, alpha);
  return alpha / boost::math::cdf(shifted, q);
}

RobustEstimate fast_mcd(const Matrix& x, const RobustConfig& cfg, const StreamKey& key) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n < 2 * (p + 1)) {
    throw std::invalid_argument(
        "fast_mcd: needs n >= 2(p+1); use the regularized estimator instead");
  }
  const int h = subset_size(cfg.alpha, n);
  if (h < p + 1) {
    throw std::invalid_argument("fast_mcd: h-subset smaller than p+1");
  }
  const double factor = mcd_consistency_factor(static_cast<int>(p), cfg.alpha);

  const auto shape = [](const SubsetStats& st) { return Eigen::LLT<Matrix>(st.cov); };
  const auto finish = [&](const Candidate& cand) {
    const SubsetStats st = subset_stats(x, cand.support);
    RobustEstimate est;
    est.location = st.mean;
    est.covariance = factor * st.cov;
    est.support = cand.support;
    est.rho = 0.0;
    est.log_det = cand.log_det;
    return est;
  };

  if (h == static_cast<int>(n)) {
    Candidate all;
    all.support.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) all.support[static_cast<std::size_t>(i)] = static_cast<int>(i);
    const SubsetStats st = subset_stats(x, all.support);
    const Eigen::LLT<Matrix> llt(st.cov);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("fast_mcd: singular full-sample covariance");
    }
    all.log_det = llt_log_det(llt);
    return finish(all);
  }

  RngStream rng = key.stream();
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(cfg.n_initial_subsets));
  for (int s = 0; s < cfg.n_initial_subsets; ++s) {
    Candidate cand;
    bool seeded = false;
    for (int attempt = 0; attempt < kMaxElementalRedraws; ++attempt) {
      const std::vector<int> elem = draw_distinct(rng, static_cast<int>(p) + 1, n);
      const SubsetStats st = subset_stats(x, elem);
      const Eigen::LLT<Matrix> llt(st.cov);
      if (llt.info() != Eigen::Success) continue;
      if (Matrix(llt.matrixL()).diagonal().minCoeff() <
          1e-12 * (1.0 + st.cov.diagonal().maxCoeff())) {
        continue;
      }
      cand.support = concentrate(x, st.mean, llt, h);
      seeded = true;
      break;
    }
    if (!seeded) {
      throw std::runtime_error("fast_mcd: exhausted redraws of degenerate elemental subsets");
    }
    candidates.push_back(std::move(cand));
  }
  return run_mcd_candidates(x, h, cfg, std::move(candidates), shape, finish);
}

RobustEstimate fast_mcd(const Matrix& x, const RobustConfig& cfg) {
  return fast_mcd(x, cfg, StreamKey{{cfg.seed}});
}

RobustEstimate mrcd(const Matrix& x, const RobustConfig& cfg, const StreamKey& key) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n < 4) throw std::invalid_argument("mrcd: needs at least 4 observations");
  const int h = subset_size(cfg.alpha, n);
  if (h < 2) throw std::invalid_argument("mrcd: h-subset smaller than 2");
  const std::vector<double> grid = cfg.effective_rho_grid();

  Vector med(p), scale(p);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = x(i, j);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    med(j) = (n % 2 == 1) ? sorted[static_cast<std::size_t>(n / 2)]
                          : 0.5 * (sorted[static_cast<std::size_t>(n / 2 - 1)] +
                                   sorted[static_cast<std::size_t>(n / 2)]);
    scale(j) = qn_scale(col);
    if (scale(j) <= 0.0) {
      throw std::invalid_argument(
          "mrcd: variable " + std::to_string(j) +
          " has zero Qn scale; screen constant variables out first");
    }
  }

  const double factor = mcd_consistency_factor(static_cast<int>(p), cfg.alpha);

  if (n >= 2 * (p + 1) && grid.front() == 0.0) {
    try {
      RobustEstimate plain = fast_mcd(x, cfg, key);
      const Matrix standardized = scale.cwiseInverse().asDiagonal() * plain.covariance *
                                  scale.cwiseInverse().asDiagonal();
      if (condition_number(standardized) <= cfg.condition_cap) {
        return plain;
      }
    } catch (const std::runtime_error&) {
      // degenerate data defeats the plain estimator; regularize instead
    }
  }

  const Matrix z = scale.cwiseInverse().asDiagonal() * (x.rowwise() - med.transpose()).transpose();
  const Matrix zr = z.transpose();  // n x p, standardized rows

  RngStream rng = key.with(kRegularizedWord).stream();
  std::vector<Candidate> candidates(static_cast<std::size_t>(cfg.n_initial_subsets));
  std::vector<std::pair<double, double>> spectra;  // (lambda_min, lambda_max) per candidate
  spectra.reserve(candidates.size());
  for (auto& cand : candidates) {
    cand.support = draw_distinct(rng, h, n);
    std::sort(cand.support.begin(), cand.support.end());
    const SubsetStats st = subset_stats(zr, cand.support);
    Eigen::SelfAdjointEigenSolver<Matrix> es(st.cov, Eigen::EigenvaluesOnly);
    spectra.emplace_back(std::max(0.0, es.eigenvalues().minCoeff()),
                         std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  double rho = -1.0;
  for (double r : grid) {
    bool ok = true;
    for (const auto& [lo, hi] : spectra) {
      const double kmin = r + (1.0 - r) * factor * lo;
      const double kmax = r + (1.0 - r) * factor * hi;
      if (kmin <= 0.0 || kmax / kmin > cfg.condition_cap) {
        ok = false;
        break;
      }
    }
    if (ok) {
      rho = r;
      break;
    }
  }
  if (rho < 0.0) {
    throw std::runtime_error("mrcd: no rho in the grid caps the condition number");
  }

  const Matrix eye = Matrix::Identity(p, p);
  const auto shape = [&](const SubsetStats& st) {
    return Eigen::LLT<Matrix>(Matrix(rho * eye + (1.0 - rho) * factor * st.cov));
  };
  const auto finish = [&](const Candidate& cand) {
    const SubsetStats st = subset_stats(zr, cand.support);
    const Matrix k = rho * eye + (1.0 - rho) * factor * st.cov;
    RobustEstimate est;
    est.location = med + scale.asDiagonal() * st.mean;
    est.covariance = scale.asDiagonal() * k * scale.asDiagonal();
    est.support = cand.support;
    est.rho = rho;
    est.log_det = cand.log_det;
    return est;
  };
  return run_mcd_candidates(zr, h, cfg, std::move(candidates), shape, finish);
}

RobustEstimate mrcd(const Matrix& x, const RobustConfig& cfg) {
  return mrcd(x, cfg, StreamKey{{cfg.seed}});
}

RobustEstimate robust_location_cov(const Matrix& x, const RobustConfig& cfg,
                                   const StreamKey& key) {
  if (x.rows() >= 2 * (x.cols() + 1)) return fast_mcd(x, cfg, key);
  return mrcd(x, cfg, key);
}

ScatterPair robust_scatter(const LabeledDataset& d, const RobustConfig& cfg,
                           const StreamKey& key) {
  const std::vector<int> counts = d.group_counts();
  const int g = d.n_groups;
  const Eigen::Index n = d.n();
  const Eigen::Index p = d.p();
  if (n - g < 1) {
    throw std::invalid_argument("robust_scatter: needs n - g >= 1");
  }

  std::vector<RobustEstimate> per_group(static_cast<std::size_t>(g));
  for (int j = 0; j < g; ++j) {
    Matrix xj(counts[static_cast<std::size_t>(j)], p);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d.labels[static_cast<std::size_t>(i)] == j) xj.row(r++) = d.x.row(i);
    }
    try {
      per_group[static_cast<std::size_t>(j)] =
          robust_location_cov(xj, cfg, key.with(static_cast<std::uint64_t>(j)));
    } catch (const std::exception& e) {
      throw std::runtime_error("robust_scatter: group " + std::to_string(j) + ": " + e.what());
    }
  }

  Vector mu = Vector::Zero(p);
  for (int j = 0; j < g; ++j) {
    mu += (static_cast<double>(counts[static_cast<std::size_t>(j)]) / static_cast<double>(n)) *
          per_group[static_cast<std::size_t>(j)].location;
  }
  ScatterPair sp;
  sp.b = Matrix::Zero(p, p);
  sp.w = Matrix::Zero(p, p);
  for (int j = 0; j < g; ++j) {
    const auto& est = per_group[static_cast<std::size_t>(j)];
    const double nj = static_cast<double>(counts[static_cast<std::size_t>(j)]);
    const Vector c = est.location - mu;
    sp.b.noalias() += (nj / static_cast<double>(n)) * (c * c.transpose());
    sp.w += ((nj - 1.0) / static_cast<double>(n - g)) * est.covariance;
  }
  sp.s_pooled = sp.w;
  sp.counts = counts;
  sp.source = ScatterSource::robust;
  return sp;
}

ScatterPair robust_scatter(const LabeledDataset& d, const RobustConfig& cfg) {
  return robust_scatter(d, cfg, StreamKey{{cfg.seed}});
}

}  // namespace trda
