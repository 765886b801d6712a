#include "trda/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace trda {
namespace {

void apply_sign_convention(Matrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index imax = 0;
    double amax = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, j));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (v(imax, j) < 0.0) v.col(j) = -v.col(j);
  }
}

EigenDecomposition descending_sym_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("sym_eig: eigensolver failed to converge");
  }
  const Eigen::Index p = a.rows();
  EigenDecomposition d;
  d.values = es.eigenvalues().reverse();
  d.vectors.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) d.vectors.col(j) = es.eigenvectors().col(p - 1 - j);
  apply_sign_convention(d.vectors);
  return d;
}

}  // namespace

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

EigenDecomposition sym_eig(const Matrix& a) {
  if (!is_symmetric(a)) throw std::invalid_argument("sym_eig: matrix is not symmetric");
  return descending_sym_eig(a);
}

EigenDecomposition gen_eig_spd(const Matrix& b, const Matrix& w, const Matrix* scale_matrix) {
  if (!is_symmetric(b)) throw std::invalid_argument("gen_eig_spd: b is not symmetric");
  if (!is_symmetric(w)) throw std::invalid_argument("gen_eig_spd: w is not symmetric");
  if (b.rows() != w.rows()) throw std::invalid_argument("gen_eig_spd: dimension mismatch");

  const EigenDecomposition we = descending_sym_eig(w);
  const double lmax = we.values[0];
  const double lmin = we.values[we.values.size() - 1];
  if (!(lmax > 0.0) || lmin <= 1e-12 * lmax) {
    throw std::runtime_error(
        "gen_eig_spd: w is numerically singular or indefinite; "
        "apply range_projection and solve the compressed pencil");
  }

  Eigen::LLT<Matrix> llt(w);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "gen_eig_spd: Cholesky factorization of w failed; "
        "apply range_projection and solve the compressed pencil");
  }
  const Matrix l = llt.matrixL();
  // c = L^-1 B L^-T
  Matrix c = l.triangularView<Eigen::Lower>().solve(b);
  c = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose());

  EigenDecomposition ce = descending_sym_eig(c);
  EigenDecomposition out;
  out.values = ce.values;
  out.vectors = l.transpose().triangularView<Eigen::Upper>().solve(ce.vectors);
  if (scale_matrix != nullptr) {
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
      const double m = out.vectors.col(j).dot(*scale_matrix * out.vectors.col(j));
      if (!(m > 0.0)) throw std::runtime_error("gen_eig_spd: scale matrix is not positive on an eigenvector");
      out.vectors.col(j) /= std::sqrt(m);
    }
  }
  apply_sign_convention(out.vectors);
  return out;
}

Matrix orthonormalized(const Matrix& v) {
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ() * Matrix::Identity(v.rows(), v.cols());
  apply_sign_convention(q);
  return q;
}

double subspace_angle(const Matrix& v1, const Matrix& v2) {
  auto check = [](const Matrix& v, const char* name) {
    const Matrix g = v.transpose() * v;
    if ((g - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() > 1e-8) {
      throw std::invalid_argument(std::string("subspace_angle: ") + name +
                                  " is not column-orthonormal; orthonormalize first");
    }
  };
  check(v1, "v1");
  check(v2, "v2");
  if (v1.rows() != v2.rows()) throw std::invalid_argument("subspace_angle: dimension mismatch");
  const Matrix d = v1 * v1.transpose() - v2 * v2.transpose();
  const double s = std::min(1.0, spectral_norm(d));
  return std::asin(s);
}

RangeBasis range_projection(const Matrix& w) {
  const EigenDecomposition d = sym_eig(w);
  const double lmax = d.values[0];
  if (!(lmax > 0.0)) throw std::runtime_error("range_projection: matrix has no positive eigenvalues");
  Eigen::Index m = 0;
  while (m < d.values.size() && d.values[m] > 1e-10 * lmax) ++m;
  RangeBasis rb;
  rb.gamma = d.vectors.leftCols(m);
  rb.kept_values = d.values.head(m);
  return rb;
}

double condition_number(const Matrix& w) {
  const EigenDecomposition d = sym_eig(w);
  const double lmax = d.values[0];
  const double lmin = d.values[d.values.size() - 1];
  if (!(lmax > 0.0)) return std::numeric_limits<double>::infinity();
  if (lmin <= lmax * 1e-15) return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

double spectral_norm(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

}  // namespace trda
