#include "trda/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "trda/classify.hpp"
#include "trda/dataio.hpp"

namespace trda {
namespace {

constexpr std::uint64_t kTestWord = 0x54455354u;      // test draw
constexpr std::uint64_t kTrainWord = 0x5452414eu;     // train draw
constexpr std::uint64_t kRobustWord = 0x524f4253u;    // robust scatter
constexpr std::uint64_t kRobustClfWord = 0x52434c46u; // robust classifier

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void fail_row(StudyRow& row, const std::string& message) {
  row.failed = true;
  row.error = message;
  row.accuracy = kNan;
  row.angle = kNan;
}

double quantile_sorted(const std::vector<double>& sorted, int quarter) {
  if (sorted.empty()) return kNan;
  const std::size_t idx = (static_cast<std::size_t>(quarter) * (sorted.size() - 1)) / 4;
  return sorted[idx];
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "cTR") return Method::ctr;
  if (s == "cFDA") return Method::cfda;
  if (s == "rTR") return Method::rtr;
  if (s == "rFDA") return Method::rfda;
  if (s == "tTR") return Method::ttr;
  if (s == "tFDA") return Method::tfda;
  if (s == "tQDA") return Method::tqda;
  throw std::invalid_argument("unknown method: " + s);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::ctr: return "cTR";
    case Method::cfda: return "cFDA";
    case Method::rtr: return "rTR";
    case Method::rfda: return "rFDA";
    case Method::ttr: return "tTR";
    case Method::tfda: return "tFDA";
    case Method::tqda: return "tQDA";
  }
  throw std::logic_error("unreachable");
}

bool is_theoretical(Method m) {
  return m == Method::ttr || m == Method::tfda || m == Method::tqda;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TRDA_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) return kNan;
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

StudyConfig study_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("study config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("study config: top level must be an object");

  StudyConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") {
      cfg.scenario = parse_scenario_id(value.get<std::string>());
    } else if (key == "q") {
      cfg.q = value.get<int>();
    } else if (key == "epsilons") {
      cfg.epsilons = value.get<std::vector<double>>();
    } else if (key == "n_train") {
      cfg.n_train = value.get<int>();
    } else if (key == "n_test") {
      cfg.n_test = value.get<int>();
    } else if (key == "replications") {
      cfg.replications = value.get<int>();
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& m : value) cfg.methods.push_back(parse_method(m.get<std::string>()));
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      cfg.threads = value.get<int>();
    } else if (key == "robust") {
      for (const auto& [rk, rv] : value.items()) {
        if (rk == "alpha") {
          cfg.robust.alpha = rv.get<double>();
        } else if (rk == "n_initial_subsets") {
          cfg.robust.n_initial_subsets = rv.get<int>();
        } else if (rk == "n_cstep_candidates") {
          cfg.robust.n_cstep_candidates = rv.get<int>();
        } else if (rk == "condition_cap") {
          cfg.robust.condition_cap = rv.get<double>();
        } else if (rk == "rho_grid") {
          cfg.robust.rho_grid = rv.get<std::vector<double>>();
        } else {
          throw std::invalid_argument("study config: unknown robust key '" + rk + "'");
        }
      }
    } else {
      throw std::invalid_argument("study config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

std::string study_config_to_json(const StudyConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = to_string(cfg.scenario);
  j["q"] = cfg.q;
  j["epsilons"] = cfg.epsilons;
  j["n_train"] = cfg.n_train;
  j["n_test"] = cfg.n_test;
  j["replications"] = cfg.replications;
  std::vector<std::string> names;
  for (Method m : cfg.methods) names.push_back(to_string(m));
  j["methods"] = names;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["robust"] = {{"alpha", cfg.robust.alpha},
                 {"n_initial_subsets", cfg.robust.n_initial_subsets},
                 {"n_cstep_candidates", cfg.robust.n_cstep_candidates},
                 {"condition_cap", cfg.robust.condition_cap}};
  if (!cfg.robust.rho_grid.empty()) j["robust"]["rho_grid"] = cfg.robust.rho_grid;
  return j.dump(2);
}

namespace {

void validate_config(const StudyConfig& cfg) {
  if (cfg.replications < 1) throw std::invalid_argument("study: replications must be positive");
  if (cfg.n_train < 2) throw std::invalid_argument("study: n_train must be at least 2");
  if (cfg.n_test < 1) throw std::invalid_argument("study: n_test must be positive");
  if (cfg.epsilons.empty()) throw std::invalid_argument("study: epsilon grid is empty");
  for (double e : cfg.epsilons) {
    if (e < 0.0 || e >= 1.0) {
      throw std::invalid_argument("study: epsilon must lie in [0, 1)");
    }
  }
  if (cfg.methods.empty()) throw std::invalid_argument("study: no methods selected");
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    for (std::size_t l = i + 1; l < cfg.methods.size(); ++l) {
      if (cfg.methods[i] == cfg.methods[l]) {
        throw std::invalid_argument("study: duplicate method " + to_string(cfg.methods[i]));
      }
    }
  }
}

struct StudyContext {
  const StudyConfig& cfg;
  ScenarioSpec spec;
  Projection theo_fda;
  Projection theo_tr;
  Matrix theo_fda_basis;
  Matrix theo_tr_basis;
  ClassifierModel tfda_model;
  ClassifierModel ttr_model;
  bool need_classical = false;
  bool need_robust = false;
  bool need_theoretical = false;
};

const Matrix& benchmark_basis(const StudyContext& ctx, Method m) {
  switch (m) {
    case Method::ctr:
    case Method::rtr:
    case Method::ttr:
      return ctx.theo_tr_basis;
    default:
      return ctx.theo_fda_basis;
  }
}

void run_replication(const StudyContext& ctx, int rep, StudyRow* rows) {
  const StudyConfig& cfg = ctx.cfg;
  const int g = ctx.spec.g();
  const std::size_t n_eps = cfg.epsilons.size();
  const std::size_t n_methods = cfg.methods.size();
  const StreamKey rep_key{{cfg.seed, static_cast<std::uint64_t>(ctx.spec.id) + 1,
                           static_cast<std::uint64_t>(cfg.q), static_cast<std::uint64_t>(rep)}};

  LabeledDataset test = sample_contaminated(ctx.spec.clean, contamination(ctx.spec, 0.0),
                                            std::vector<int>(static_cast<std::size_t>(g), cfg.n_test),
                                            rep_key.with(kTestWord))
                            .data;

  double acc_tqda = kNan, acc_ttr = kNan, acc_tfda = kNan;
  if (ctx.need_theoretical) {
    for (Method m : cfg.methods) {
      if (m == Method::tqda) {
        const std::vector<int> pred = qda_rule(test.x, ctx.spec.clean);
        Eigen::Index hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
          if (pred[i] == test.labels[i]) ++hits;
        }
        acc_tqda = static_cast<double>(hits) / static_cast<double>(test.n());
      } else if (m == Method::ttr) {
        acc_ttr = accuracy(ctx.ttr_model, test);
      } else if (m == Method::tfda) {
        acc_tfda = accuracy(ctx.tfda_model, test);
      }
    }
  }

  for (std::size_t e = 0; e < n_eps; ++e) {
    const double eps = cfg.epsilons[e];
    StudyRow* cell = rows + (static_cast<std::size_t>(rep) * n_eps + e) * n_methods;
    for (std::size_t m = 0; m < n_methods; ++m) {
      cell[m].method = cfg.methods[m];
      cell[m].epsilon = eps;
      cell[m].replication = rep;
    }

    LabeledDataset train;
    std::string train_error;
    if (ctx.need_classical || ctx.need_robust) {
      try {
        train = sample_contaminated(ctx.spec.clean, contamination(ctx.spec, eps),
                                    std::vector<int>(static_cast<std::size_t>(g), cfg.n_train),
                                    rep_key.with(kTrainWord).with(e))
                    .data;
      } catch (const std::exception& ex) {
        train_error = ex.what();
      }
    }

    ScatterPair classical, robust;
    std::string classical_error = train_error, robust_error = train_error;
    if (ctx.need_classical && classical_error.empty()) {
      try {
        classical = classical_scatter(train);
      } catch (const std::exception& ex) {
        classical_error = ex.what();
      }
    }
    if (ctx.need_robust && robust_error.empty()) {
      try {
        robust = robust_scatter(train, cfg.robust, rep_key.with(kRobustWord).with(e));
      } catch (const std::exception& ex) {
        robust_error = ex.what();
      }
    }

    for (std::size_t m = 0; m < n_methods; ++m) {
      StudyRow& row = cell[m];
      const Method method = cfg.methods[m];
      try {
        switch (method) {
          case Method::tqda:
            row.accuracy = acc_tqda;
            row.angle = kNan;
            break;
          case Method::ttr:
            row.accuracy = acc_ttr;
            row.angle = 0.0;
            break;
          case Method::tfda:
            row.accuracy = acc_tfda;
            row.angle = 0.0;
            break;
          case Method::ctr:
          case Method::cfda: {
            if (!classical_error.empty()) {
              fail_row(row, classical_error);
              break;
            }
            const Projection proj = (method == Method::ctr)
                                        ? solve_tr(classical, ctx.spec.k)
                                        : fda(classical, ctx.spec.k);
            const ClassifierModel clf = nearest_projected_mean_train(train, proj);
            row.accuracy = accuracy(clf, test);
            row.angle = subspace_angle(orthonormalized(proj.v), benchmark_basis(ctx, method));
            break;
          }
          case Method::rtr:
          case Method::rfda: {
            if (!robust_error.empty()) {
              fail_row(row, robust_error);
              break;
            }
            const Projection proj = (method == Method::rtr) ? solve_tr(robust, ctx.spec.k)
                                                            : fda(robust, ctx.spec.k);
            const ClassifierModel clf = robust_projected_train(
                train, proj, cfg.robust,
                rep_key.with(kRobustClfWord).with(e).with(static_cast<std::uint64_t>(m)));
            row.accuracy = accuracy(clf, test);
            row.angle = subspace_angle(orthonormalized(proj.v), benchmark_basis(ctx, method));
            break;
          }
        }
      } catch (const std::exception& ex) {
        fail_row(row, ex.what());
      }
    }
  }
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
  validate_config(cfg);

  StudyContext ctx{cfg,
                   build_scenario(cfg.scenario, cfg.q),
                   {},
                   {},
                   {},
                   {},
                   {},
                   {},
                   false,
                   false,
                   false};
  auto [theo_fda, theo_tr] = theoretical_solutions(ctx.spec);
  ctx.theo_fda = std::move(theo_fda);
  ctx.theo_tr = std::move(theo_tr);
  ctx.theo_fda_basis = orthonormalized(ctx.theo_fda.v);
  ctx.theo_tr_basis = orthonormalized(ctx.theo_tr.v);
  ctx.tfda_model = nearest_projected_mean_from_models(ctx.spec.clean, ctx.theo_fda);
  ctx.ttr_model = nearest_projected_mean_from_models(ctx.spec.clean, ctx.theo_tr);
  for (Method m : cfg.methods) {
    if (m == Method::ctr || m == Method::cfda) ctx.need_classical = true;
    if (m == Method::rtr || m == Method::rfda) ctx.need_robust = true;
    if (is_theoretical(m)) ctx.need_theoretical = true;
  }

  StudyReport report;
  report.config = cfg;
  report.rows.resize(static_cast<std::size_t>(cfg.replications) * cfg.epsilons.size() *
                     cfg.methods.size());

  const int n_threads = std::min(resolve_threads(cfg.threads), cfg.replications);
  std::atomic<int> next_rep{0};
  std::atomic<bool> aborted{false};
  std::string abort_message;
  std::mutex abort_mutex;

  const auto worker = [&] {
    for (;;) {
      const int rep = next_rep.fetch_add(1);
      if (rep >= cfg.replications || aborted.load()) return;
      try {
        run_replication(ctx, rep, report.rows.data());
      } catch (const std::exception& ex) {
        {
          const std::lock_guard<std::mutex> lock(abort_mutex);
          if (abort_message.empty()) abort_message = ex.what();
        }
        aborted.store(true);
        return;
      }
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (aborted.load()) {
    throw std::runtime_error("study: replication failed: " + abort_message);
  }

  for (const StudyRow& row : report.rows) {
    if (row.failed) ++report.n_failed;
  }
  return report;
}

std::vector<SummaryCell> summarize(const StudyReport& report) {
  const StudyConfig& cfg = report.config;
  std::vector<SummaryCell> cells;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
      SummaryCell cell;
      cell.method = cfg.methods[m];
      cell.epsilon = cfg.epsilons[e];
      std::vector<double> acc, ang;
      for (int rep = 0; rep < cfg.replications; ++rep) {
        const StudyRow& row =
            report.rows[(static_cast<std::size_t>(rep) * cfg.epsilons.size() + e) *
                            cfg.methods.size() +
                        m];
        ++cell.n;
        if (row.failed) {
          ++cell.n_failed;
          continue;
        }
        acc.push_back(row.accuracy);
        if (!std::isnan(row.angle)) ang.push_back(row.angle);
      }
      std::sort(acc.begin(), acc.end());
      cell.median_accuracy = quantile_sorted(acc, 2);
      cell.q1_accuracy = quantile_sorted(acc, 1);
      cell.q3_accuracy = quantile_sorted(acc, 3);
      cell.median_angle = lower_median(std::move(ang));
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::string report_csv(const StudyReport& report) {
  std::string out = "scenario,method,epsilon,q,replication,accuracy,angle\n";
  const std::string scenario = to_string(report.config.scenario);
  const std::string q = std::to_string(report.config.q);
  for (const StudyRow& row : report.rows) {
    out += scenario;
    out += ',';
    out += to_string(row.method);
    out += ',';
    out += format_double(row.epsilon);
    out += ',';
    out += q;
    out += ',';
    out += std::to_string(row.replication);
    out += ',';
    if (!std::isnan(row.accuracy)) out += format_double(row.accuracy);
    out += ',';
    if (!std::isnan(row.angle)) out += format_double(row.angle);
    out += '\n';
  }
  return out;
}

std::string summary_json(const StudyReport& report) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(study_config_to_json(report.config));
  j["n_failed"] = report.n_failed;
  nlohmann::json cells = nlohmann::json::array();
  for (const SummaryCell& cell : summarize(report)) {
    nlohmann::json c;
    c["method"] = to_string(cell.method);
    c["epsilon"] = cell.epsilon;
    c["n"] = cell.n;
    c["n_failed"] = cell.n_failed;
    const auto set = [&c](const char* key, double v) {
      if (std::isnan(v)) {
        c[key] = nullptr;
      } else {
        c[key] = v;
      }
    };
    set("median_accuracy", cell.median_accuracy);
    set("q1_accuracy", cell.q1_accuracy);
    set("q3_accuracy", cell.q3_accuracy);
    set("median_angle", cell.median_angle);
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j.dump(2);
}

void write_report_csv(const StudyReport& report, const std::string& path) {
  write_text_atomic(path, report_csv(report));
}

void write_summary_json(const StudyReport& report, const std::string& path) {
  write_text_atomic(path, summary_json(report));
}

}  // namespace trda
