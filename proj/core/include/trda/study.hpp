#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trda/robust.hpp"
#include "trda/scenarios.hpp"

namespace trda {

// Sample-based and population-based variants of the two reducers plus the
// full-space quadratic benchmark.
enum class Method { ctr, cfda, rtr, rfda, ttr, tfda, tqda };

Method parse_method(const std::string& s);
std::string to_string(Method m);
bool is_theoretical(Method m);

struct StudyConfig {
  ScenarioId scenario = ScenarioId::I;
  int q = 0;
  std::vector<double> epsilons = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  int n_train = 400;  // per group
  int n_test = 40;    // per group, never contaminated
  int replications = 200;
  std::vector<Method> methods = {Method::ctr, Method::cfda, Method::rtr, Method::rfda,
                                 Method::ttr, Method::tfda, Method::tqda};
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = TRDA_THREADS env var, then hardware concurrency
  RobustConfig robust;
};

StudyConfig study_config_from_json(const std::string& text);
std::string study_config_to_json(const StudyConfig& cfg);

struct StudyRow {
  Method method = Method::ctr;
  double epsilon = 0.0;
  int replication = 0;
  double accuracy = 0.0;  // NaN when the cell failed
  double angle = 0.0;     // vs the theoretical subspace; NaN for tQDA / failures
  bool failed = false;
  std::string error;
};

struct StudyReport {
  StudyConfig config;
  std::vector<StudyRow> rows;  // ordered by (replication, epsilon, method)
  int n_failed = 0;
};

// Deterministic replication engine: every row's RNG stream is keyed by
// (seed, scenario, q, replication, draw kind), so the report is identical
// for any thread count and execution order. Test draws are shared across
// epsilons, which makes the population-based methods epsilon-independent.
StudyReport run_study(const StudyConfig& cfg);

struct SummaryCell {
  Method method = Method::ctr;
  double epsilon = 0.0;
  int n = 0;
  int n_failed = 0;
  double median_accuracy = 0.0;
  double q1_accuracy = 0.0;
  double q3_accuracy = 0.0;
  double median_angle = 0.0;  // NaN when the method has no subspace
};

// Lower-median / lower-quantile convention over the non-failed rows of each
// (method, epsilon) cell.
std::vector<SummaryCell> summarize(const StudyReport& report);

double lower_median(std::vector<double> values);

// Long-format rows: scenario, method, epsilon, q, replication, accuracy,
// angle. Failed cells leave accuracy/angle empty.
std::string report_csv(const StudyReport& report);
std::string summary_json(const StudyReport& report);

void write_report_csv(const StudyReport& report, const std::string& path);
void write_summary_json(const StudyReport& report, const std::string& path);

// Requested value if positive, else the TRDA_THREADS environment variable,
// else hardware concurrency (at least 1).
int resolve_threads(int requested);

}  // namespace trda
