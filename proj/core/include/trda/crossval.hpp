#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trda/moments.hpp"
#include "trda/reduce.hpp"
#include "trda/robust.hpp"

namespace trda {

enum class EstimatorKind { classical, robust };

EstimatorKind parse_estimator(const std::string& s);
std::string to_string(EstimatorKind e);

struct CvConfig {
  int folds = 10;
  ReduceMethod method = ReduceMethod::tr;
  EstimatorKind estimator = EstimatorKind::classical;
  std::uint64_t seed = 0;
  int threads = 0;
  RobustConfig robust;
};

struct CvCell {
  int k = 0;
  double median_accuracy = 0.0;  // over the non-failed folds
  int n_failed_folds = 0;
};

struct CvResult {
  std::vector<CvCell> per_k;            // k = 1..max_k
  double baseline_accuracy = 0.0;       // robust LDA without reduction
  int baseline_failed_folds = 0;
  int max_k = 0;
  std::vector<std::string> fold_errors; // "fold f, k=..: message"
};

// Deterministic stratified assignment: within each class the shuffled members
// are dealt round-robin, so per-class fold counts differ by at most one.
std::vector<int> stratified_folds(const std::vector<int>& labels, int n_groups, int folds,
                                  std::uint64_t seed);

// Per fold: scatter pair (classical or robust) on the training portion, a
// range-projection step when the within matrix is singular, the reducer at
// each k = 1..min(g-1, p), and a projected robust-LDA rule evaluated on the
// held-out portion. Reports the fold-median accuracy per k plus the
// no-reduction robust-LDA baseline.
CvResult crossval(const LabeledDataset& d, const CvConfig& cfg);

std::string crossval_csv(const CvResult& result, const CvConfig& cfg);

}  // namespace trda
