#include "trda/crossval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include "trda/classify.hpp"
#include "trda/study.hpp"

namespace trda {
namespace {

constexpr std::uint64_t kFoldWord = 0x464f4c44u;      // fold shuffling
constexpr std::uint64_t kScatterWord = 0x43565343u;   // per-fold robust scatter
constexpr std::uint64_t kClassifyWord = 0x4356434cu;  // per-fold robust classifier
constexpr std::uint64_t kBaselineWord = 0x43564241u;  // per-fold baseline

LabeledDataset subset_rows(const LabeledDataset& d, const std::vector<int>& fold_of,
                           int fold, bool keep_fold) {
  Eigen::Index count = 0;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if ((fold_of[i] == fold) == keep_fold) ++count;
  }
  LabeledDataset out;
  out.x.resize(count, d.p());
  out.labels.resize(static_cast<std::size_t>(count));
  out.n_groups = d.n_groups;
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if ((fold_of[i] == fold) != keep_fold) continue;
    out.x.row(r) = d.x.row(static_cast<Eigen::Index>(i));
    out.labels[static_cast<std::size_t>(r)] = d.labels[i];
    ++r;
  }
  return out;
}

struct FoldOutcome {
  std::vector<double> accuracy;      // per k, NaN on failure
  std::vector<std::string> errors;   // per k, empty when fine
  double baseline = std::numeric_limits<double>::quiet_NaN();
  std::string baseline_error;
};

Projection identity_projection(Eigen::Index p) {
  Projection proj;
  proj.v = Matrix::Identity(p, p);
  proj.scaling = ProjScaling::column_orthonormal;
  return proj;
}

}  // namespace

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "classical") return EstimatorKind::classical;
  if (s == "robust") return EstimatorKind::robust;
  throw std::invalid_argument("unknown estimator: " + s);
}

std::string to_string(EstimatorKind e) {
  return e == EstimatorKind::classical ? "classical" : "robust";
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int n_groups, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("crossval: needs at least 2 folds");
  std::vector<int> fold_of(labels.size(), -1);
  for (int c = 0; c < n_groups; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    RngStream rng({seed, kFoldWord, static_cast<std::uint64_t>(c)});
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.next_below(i)]);
    }
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      fold_of[members[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

CvResult crossval(const LabeledDataset& d, const CvConfig& cfg) {
  const std::vector<int> counts = d.group_counts();
  if (d.n_groups < 2) throw std::invalid_argument("crossval: needs at least 2 classes");
  const int min_count = *std::min_element(counts.begin(), counts.end());
  if (cfg.folds < 2) throw std::invalid_argument("crossval: needs at least 2 folds");
  if (cfg.folds > min_count) {
    throw std::invalid_argument("crossval: folds exceed the smallest class size (" +
                                std::to_string(min_count) + ")");
  }

  const int max_k = static_cast<int>(std::min<Eigen::Index>(d.n_groups - 1, d.p()));
  const std::vector<int> fold_of = stratified_folds(d.labels, d.n_groups, cfg.folds, cfg.seed);
  std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(cfg.folds));

  const auto run_fold = [&](int f) {
    FoldOutcome& out = outcomes[static_cast<std::size_t>(f)];
    out.accuracy.assign(static_cast<std::size_t>(max_k),
                        std::numeric_limits<double>::quiet_NaN());
    out.errors.assign(static_cast<std::size_t>(max_k), "");

    const LabeledDataset train = subset_rows(d, fold_of, f, false);
    const LabeledDataset test = subset_rows(d, fold_of, f, true);
    const StreamKey fold_key{{cfg.seed, static_cast<std::uint64_t>(f)}};

    ScatterPair scatter;
    try {
      scatter = (cfg.estimator == EstimatorKind::classical)
                    ? classical_scatter(train)
                    : robust_scatter(train, cfg.robust, fold_key.with(kScatterWord));
    } catch (const std::exception& ex) {
      const std::string msg = std::string("scatter estimation: ") + ex.what();
      for (auto& e : out.errors) e = msg;
      out.baseline_error = msg;
      return;
    }

    // reduce to the numerical range of W when it is singular
    Matrix gamma;
    ScatterPair reduced = scatter;
    LabeledDataset train_r = train, test_r = test;
    const EigenDecomposition wd = sym_eig(scatter.w);
    if (wd.values(wd.values.size() - 1) <= 1e-10 * std::max(wd.values(0), 0.0)) {
      const RangeBasis range = range_projection(scatter.w);
      gamma = range.gamma;
      reduced.b = gamma.transpose() * scatter.b * gamma;
      reduced.w = gamma.transpose() * scatter.w * gamma;
      reduced.s_pooled = gamma.transpose() * scatter.s_pooled * gamma;
      train_r.x = train.x * gamma;
      test_r.x = test.x * gamma;
    }

    for (int k = 1; k <= max_k; ++k) {
      try {
        if (k > reduced.p()) {
          throw std::runtime_error("reduced space has fewer than k dimensions");
        }
        const Projection proj = (cfg.method == ReduceMethod::tr) ? solve_tr(reduced, k)
                                                                 : fda(reduced, k);
        const ClassifierModel clf = robust_projected_train(
            train_r, proj, cfg.robust,
            fold_key.with(kClassifyWord).with(static_cast<std::uint64_t>(k)));
        out.accuracy[static_cast<std::size_t>(k - 1)] = accuracy(clf, test_r);
      } catch (const std::exception& ex) {
        out.errors[static_cast<std::size_t>(k - 1)] = ex.what();
      }
    }

    try {
      const ClassifierModel clf = robust_projected_train(
          train_r, identity_projection(train_r.p()), cfg.robust, fold_key.with(kBaselineWord));
      out.baseline = accuracy(clf, test_r);
    } catch (const std::exception& ex) {
      out.baseline_error = ex.what();
    }
  };

  const int n_threads = std::min(resolve_threads(cfg.threads), cfg.folds);
  if (n_threads <= 1) {
    for (int f = 0; f < cfg.folds; ++f) run_fold(f);
  } else {
    std::atomic<int> next{0};
    const auto worker = [&] {
      for (;;) {
        const int f = next.fetch_add(1);
        if (f >= cfg.folds) return;
        run_fold(f);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CvResult result;
  result.max_k = max_k;
  for (int k = 1; k <= max_k; ++k) {
    CvCell cell;
    cell.k = k;
    std::vector<double> acc;
    for (int f = 0; f < cfg.folds; ++f) {
      const FoldOutcome& out = outcomes[static_cast<std::size_t>(f)];
      if (out.errors[static_cast<std::size_t>(k - 1)].empty()) {
        acc.push_back(out.accuracy[static_cast<std::size_t>(k - 1)]);
      } else {
        ++cell.n_failed_folds;
        result.fold_errors.push_back("fold " + std::to_string(f) + ", k=" + std::to_string(k) +
                                     ": " + out.errors[static_cast<std::size_t>(k - 1)]);
      }
    }
    cell.median_accuracy = lower_median(std::move(acc));
    result.per_k.push_back(cell);
  }
  std::vector<double> base;
  for (int f = 0; f < cfg.folds; ++f) {
    const FoldOutcome& out = outcomes[static_cast<std::size_t>(f)];
    if (out.baseline_error.empty()) {
      base.push_back(out.baseline);
    } else {
      ++result.baseline_failed_folds;
      result.fold_errors.push_back("fold " + std::to_string(f) +
                                   ", baseline: " + out.baseline_error);
    }
  }
  result.baseline_accuracy = lower_median(std::move(base));
  return result;
}

std::string crossval_csv(const CvResult& result, const CvConfig& cfg) {
  std::string out = "method,estimator,k,median_accuracy,failed_folds\n";
  char buf[64];
  const auto acc_field = [&buf](double v) -> std::string {
    if (std::isnan(v)) return "";
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  };
  for (const CvCell& cell : result.per_k) {
    out += to_string(cfg.method) + "," + to_string(cfg.estimator) + "," +
           std::to_string(cell.k) + "," + acc_field(cell.median_accuracy) + "," +
           std::to_string(cell.n_failed_folds) + "\n";
  }
  out += "rlda,robust,," + acc_field(result.baseline_accuracy) + "," +
         std::to_string(result.baseline_failed_folds) + "\n";
  return out;
}

}  // namespace trda
