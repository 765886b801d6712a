#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trda/moments.hpp"

namespace trda {

enum class ReduceMethod { fda, tr };

ReduceMethod parse_reduce_method(const std::string& s);
std::string to_string(ReduceMethod m);
enum class ProjScaling { w_orthonormal, s_pooled_orthonormal, column_orthonormal };

struct Projection {
  Matrix v;  // p x k
  ReduceMethod method = ReduceMethod::fda;
  ProjScaling scaling = ProjScaling::column_orthonormal;
  double rho = 0.0;               // trace ratio value at v
  double gap = 0.0;               // lambda_k - lambda_{k+1} of B - rho W (tr only)
  double stationarity = 0.0;      // |sum of top-k eigenvalues of B - rho W| (tr only)
  int iterations = 0;
  bool converged = true;
  bool uniqueness_warning = false;
  std::vector<double> rho_trace;  // per-iteration rho values (tr only)

  int k() const { return static_cast<int>(v.cols()); }
};

struct TrOptions {
  double tol_rho = 1e-10;
  int max_iter = 200;
  enum class Init { fda_warm_start, random };
  Init init = Init::fda_warm_start;
  std::uint64_t seed = 0;  // used for Init::random
};

double trace_ratio_value(const Matrix& v, const ScatterPair& s);

// Top-k generalized eigenvectors of (B, W). The scaling flag picks the
// normalization: v'Wv = I, v'S_pooled v = I, or plain column-orthonormal
// (QR of the W-orthonormal solution, same span).
Projection fda(const ScatterPair& s, int k, ProjScaling scaling = ProjScaling::w_orthonormal);

// Fixed-point iteration for max tr(V'BV)/tr(V'WV) over V'V = I:
// rho <- rho(V), V <- top-k eigenvectors of B - rho W, until the relative
// change in rho is below tol. The rho sequence is checked non-decreasing.
Projection solve_tr(const ScatterPair& s, int k, const TrOptions& opts = {});

struct RhoProfileEntry {
  int k;
  double rho;
  double tr_b;
  double tr_w;
  double gap;
};

// Optimal trace-ratio diagnostics for k = 1..k_max. Throws if the computed
// rho values fail to be non-increasing in k (that would be a solver bug).
std::vector<RhoProfileEntry> rho_profile(const ScatterPair& s, int k_max,
                                         const TrOptions& opts = {});

struct ConjectureViolation {
  int k;
  double tr_b_k;
  double tr_b_k_plus_1;
};

struct ConjectureReport {
  int k_max;
  std::vector<ConjectureViolation> violations;  // tr_B decreasing from k to k+1
};

// Observational scan of the between-trace monotonicity in k; never asserts.
ConjectureReport conjecture_scan(const ScatterPair& s, int k_max,
                                 const TrOptions& opts = {});

}  // namespace trda
