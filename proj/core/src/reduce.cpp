#include "trda/reduce.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "trda/rng.hpp"

namespace trda {
namespace {

int numerical_rank(const Matrix& a) {
  const EigenDecomposition d = sym_eig(a);
  const double lmax = std::max(0.0, d.values[0]);
  if (lmax == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < d.values.size(); ++i) {
    if (d.values[i] > 1e-10 * lmax) ++r;
  }
  return r;
}

Matrix initial_guess(const ScatterPair& s, int k, const TrOptions& opts) {
  if (opts.init == TrOptions::Init::fda_warm_start) {
    const EigenDecomposition d = gen_eig_spd(s.b, s.w);
    return orthonormalized(d.vectors.leftCols(k));
  }
  RngStream rs{opts.seed, 0x7252696e69747369ull};
  Matrix v(s.p(), k);
  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j) = rs.normal_vector(s.p());
  return orthonormalized(v);
}

}  // namespace

double trace_ratio_value(const Matrix& v, const ScatterPair& s) {
  const double num = (v.transpose() * s.b * v).trace();
  const double den = (v.transpose() * s.w * v).trace();
  if (!(den > 0.0)) throw std::invalid_argument("trace_ratio_value: tr(v'Wv) must be positive");
  return num / den;
}

Projection fda(const ScatterPair& s, int k, ProjScaling scaling) {
  const int r = numerical_rank(s.b);
  if (k < 1 || k > r) {
    throw std::invalid_argument("fda: k = " + std::to_string(k) +
                                " exceeds rank(B) = " + std::to_string(r) +
                                " (at most min(g-1, p))");
  }
  const Matrix* scale = nullptr;
  if (scaling == ProjScaling::s_pooled_orthonormal) scale = &s.s_pooled;
  const EigenDecomposition d = gen_eig_spd(s.b, s.w, scale);

  Projection proj;
  proj.method = ReduceMethod::fda;
  proj.scaling = scaling;
  proj.v = d.vectors.leftCols(k);
  if (scaling == ProjScaling::column_orthonormal) proj.v = orthonormalized(proj.v);
  proj.rho = trace_ratio_value(proj.v, s);
  proj.iterations = 1;
  proj.converged = true;
  return proj;
}

Projection solve_tr(const ScatterPair& s, int k, const TrOptions& opts) {
  const Eigen::Index p = s.p();
  if (k < 1 || k > p) throw std::invalid_argument("solve_tr: k out of range");
  const int rank_w = numerical_rank(s.w);
  if (rank_w < static_cast<int>(p) - k + 1) {
    throw std::invalid_argument(
        "solve_tr: rank(W) < p - k + 1, the trace ratio is unbounded; "
        "apply range_projection first");
  }

  Projection proj;
  proj.method = ReduceMethod::tr;
  proj.scaling = ProjScaling::column_orthonormal;

  Matrix v = initial_guess(s, k, opts);
  double rho = trace_ratio_value(v, s);
  proj.rho_trace.push_back(rho);

  const double norm_b = spectral_norm(s.b);
  const double norm_w = spectral_norm(s.w);

  EigenDecomposition d;
  proj.converged = false;
  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    const Matrix m = s.b - rho * s.w;
    d = sym_eig(m);
    v = d.vectors.leftCols(k);
    const double rho_new = trace_ratio_value(v, s);
    if (rho_new < rho - 1e-9 * std::max(1.0, std::abs(rho))) {
      throw std::runtime_error("solve_tr: rho decreased across an iteration");
    }
    proj.rho_trace.push_back(rho_new);
    const bool done = std::abs(rho_new - rho) <= opts.tol_rho * std::max(1.0, std::abs(rho_new));
    rho = rho_new;
    if (done) {
      proj.converged = true;
      break;
    }
  }

  const Matrix m_final = s.b - rho * s.w;
  d = sym_eig(m_final);
  proj.v = d.vectors.leftCols(k);
  proj.rho = rho;
  proj.iterations = it;
  proj.gap = (k < p) ? d.values[k - 1] - d.values[k]
                     : std::numeric_limits<double>::infinity();
  proj.stationarity = std::abs(d.values.head(k).sum());
  proj.uniqueness_warning = proj.gap <= 1e-8 * (norm_b + norm_w);
  return proj;
}

std::vector<RhoProfileEntry> rho_profile(const ScatterPair& s, int k_max, const TrOptions& opts) {
  if (k_max < 1 || k_max > s.p()) throw std::invalid_argument("rho_profile: k_max out of range");
  std::vector<RhoProfileEntry> out;
  out.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    const Projection pr = solve_tr(s, k, opts);
    RhoProfileEntry e;
    e.k = k;
    e.rho = pr.rho;
    e.tr_b = (pr.v.transpose() * s.b * pr.v).trace();
    e.tr_w = (pr.v.transpose() * s.w * pr.v).trace();
    e.gap = pr.gap;
    if (!out.empty() && e.rho > out.back().rho + 1e-8 * std::max(1.0, std::abs(e.rho))) {
      throw std::runtime_error("rho_profile: rho increased with k, which contradicts the "
                               "monotonicity property; solver bug");
    }
    out.push_back(e);
  }
  return out;
}

ReduceMethod parse_reduce_method(const std::string& s) {
  if (s == "tr") return ReduceMethod::tr;
  if (s == "fda") return ReduceMethod::fda;
  throw std::invalid_argument("unknown reduction method: " + s);
}

std::string to_string(ReduceMethod m) {
  return m == ReduceMethod::tr ? "tr" : "fda";
}

ConjectureReport conjecture_scan(const ScatterPair& s, int k_max, const TrOptions& opts) {
  const std::vector<RhoProfileEntry> prof = rho_profile(s, k_max, opts);
  ConjectureReport rep;
  rep.k_max = k_max;
  for (std::size_t i = 0; i + 1 < prof.size(); ++i) {
    if (prof[i + 1].tr_b < prof[i].tr_b - 1e-8) {
      rep.violations.push_back({prof[i].k, prof[i].tr_b, prof[i + 1].tr_b});
    }
  }
  return rep;
}

}  // namespace trda
