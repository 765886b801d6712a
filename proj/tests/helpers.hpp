#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "trda/moments.hpp"
#include "trda/rng.hpp"

namespace trda::test {

inline LabeledDataset make_dataset(const Matrix& x, std::vector<int> labels, int g) {
  LabeledDataset d;
  d.x = x;
  d.labels = std::move(labels);
  d.n_groups = g;
  return d;
}

inline double rel_frob(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / b.norm();
}

// Unit-normalize both columns, align sign by inner product, return the max
// absolute entry difference.
inline double unit_col_diff(const Vector& actual, const Vector& expected) {
  Vector a = actual / actual.norm();
  const Vector e = expected / expected.norm();
  if (a.dot(e) < 0) a = -a;
  return (a - e).cwiseAbs().maxCoeff();
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Matrix random_spd(Eigen::Index p, RngStream& rng) {
  const Matrix g = random_matrix(p, p + 4, rng);
  return g * g.transpose() / static_cast<double>(p + 4);
}

// Gaussian mixture sample: n_per rows per group around the given means.
inline LabeledDataset gaussian_groups(const std::vector<Vector>& means, int n_per,
                                      std::uint64_t seed) {
  const int g = static_cast<int>(means.size());
  const Eigen::Index p = means.front().size();
  RngStream rng({0x6d69u, seed});
  Matrix x(static_cast<Eigen::Index>(g) * n_per, p);
  std::vector<int> labels(static_cast<std::size_t>(g) * n_per);
  Eigen::Index row = 0;
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < n_per; ++i, ++row) {
      x.row(row) = (means[static_cast<std::size_t>(j)] + rng.normal_vector(p)).transpose();
      labels[static_cast<std::size_t>(row)] = j;
    }
  }
  return make_dataset(x, labels, g);
}

}  // namespace trda::test
