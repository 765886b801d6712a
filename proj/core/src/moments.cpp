#include "trda/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace trda {

std::vector<int> LabeledDataset::group_counts() const {
  std::vector<int> counts(n_groups, 0);
  for (int l : labels) {
    if (l < 0 || l >= n_groups) throw std::invalid_argument("labels out of range");
    ++counts[l];
  }
  return counts;
}

GroupStats group_stats(const LabeledDataset& d) {
  if (d.n() == 0 || d.n_groups == 0) throw std::invalid_argument("group_stats: empty dataset");
  if (static_cast<Eigen::Index>(d.labels.size()) != d.n()) {
    throw std::invalid_argument("group_stats: label count mismatch");
  }
  const int g = d.n_groups;
  const Eigen::Index p = d.p();
  GroupStats s;
  s.counts = d.group_counts();
  for (int j = 0; j < g; ++j) {
    if (s.counts[j] == 0) throw std::invalid_argument("group_stats: empty group");
  }
  s.means = Matrix::Zero(p, g);
  for (Eigen::Index i = 0; i < d.n(); ++i) s.means.col(d.labels[i]) += d.x.row(i).transpose();
  for (int j = 0; j < g; ++j) s.means.col(j) /= s.counts[j];

  s.covs.resize(g);
  for (int j = 0; j < g; ++j) {
    if (s.counts[j] < 2) continue;
    s.covs[j] = Matrix::Zero(p, p);
  }
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const int j = d.labels[i];
    if (!s.covs[j]) continue;
    const Vector c = d.x.row(i).transpose() - s.means.col(j);
    *s.covs[j] += c * c.transpose();
  }
  for (int j = 0; j < g; ++j) {
    if (s.covs[j]) *s.covs[j] /= (s.counts[j] - 1);
  }

  s.overall_mean = Vector::Zero(p);
  for (int j = 0; j < g; ++j) s.overall_mean += (static_cast<double>(s.counts[j]) / d.n()) * s.means.col(j);
  return s;
}

ScatterPair classical_scatter(const LabeledDataset& d) {
  const GroupStats s = group_stats(d);
  const Eigen::Index p = d.p();
  const int g = d.n_groups;
  const double n = static_cast<double>(d.n());
  if (n - g < 1) throw std::invalid_argument("classical_scatter: need n - g >= 1");

  ScatterPair sp;
  sp.source = ScatterSource::classical;
  sp.counts = s.counts;
  sp.b = Matrix::Zero(p, p);
  for (int j = 0; j < g; ++j) {
    const Vector c = s.means.col(j) - s.overall_mean;
    sp.b += (s.counts[j] / n) * (c * c.transpose());
  }
  sp.w = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const Vector c = d.x.row(i).transpose() - s.means.col(d.labels[i]);
    sp.w += c * c.transpose();
  }
  sp.w /= n;
  sp.s_pooled = sp.w * (n / (n - g));
  return sp;
}

ScatterPair theoretical_scatter(const std::vector<GroupModel>& models) {
  if (models.empty()) throw std::invalid_argument("theoretical_scatter: no models");
  const Eigen::Index p = models[0].mu.size();
  double prior_sum = 0.0;
  for (const auto& m : models) prior_sum += m.prior;
  if (std::abs(prior_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("theoretical_scatter: priors must sum to 1");
  }
  for (const auto& m : models) {
    if (m.sigma.rows() != p || m.mu.size() != p) {
      throw std::invalid_argument("theoretical_scatter: dimension mismatch");
    }
    Eigen::LLT<Matrix> llt(m.sigma);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("theoretical_scatter: group covariance is not SPD");
    }
  }
  Vector mu = Vector::Zero(p);
  for (const auto& m : models) mu += m.prior * m.mu;
  ScatterPair sp;
  sp.source = ScatterSource::theoretical;
  sp.b = Matrix::Zero(p, p);
  sp.w = Matrix::Zero(p, p);
  for (const auto& m : models) {
    const Vector c = m.mu - mu;
    sp.b += m.prior * (c * c.transpose());
    sp.w += m.prior * m.sigma;
  }
  sp.s_pooled = sp.w;
  return sp;
}

double qn_scale(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("qn_scale: need at least 2 values");
  std::vector<double> diffs;
  diffs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) diffs.push_back(std::abs(x[i] - x[j]));
  }
  const std::size_t h = n / 2 + 1;
  const std::size_t k = h * (h - 1) / 2;
  std::nth_element(diffs.begin(), diffs.begin() + (k - 1), diffs.end());
  return 2.2219 * diffs[k - 1];
}

}  // namespace trda
