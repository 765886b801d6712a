#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trda/classify.hpp"
#include "trda/contaminate.hpp"
#include "trda/crossval.hpp"
#include "trda/dataio.hpp"
#include "trda/study.hpp"

namespace {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

trda::Matrix parse_matrix(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ValidationError("pair file: '" + name + "' must be an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  trda::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
      throw ValidationError("pair file: ragged rows in '" + name + "'");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

trda::ScatterPair load_pair_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("pair file '" + path + "': " + e.what());
  }
  if (!j.contains("b") || !j.contains("w")) {
    throw ValidationError("pair file '" + path + "' needs 'b' and 'w' matrices");
  }
  trda::ScatterPair s;
  s.b = parse_matrix(j["b"], "b");
  s.w = parse_matrix(j["w"], "w");
  s.s_pooled = j.contains("s_pooled") ? parse_matrix(j["s_pooled"], "s_pooled") : s.w;
  s.source = trda::ScatterSource::theoretical;
  return s;
}

std::string matrix_csv(const trda::Matrix& m) {
  std::string out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out += (c ? ",v" : "v") + std::to_string(c + 1);
  }
  out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += fmt(m(r, c));
    }
    out += '\n';
  }
  return out;
}

int run_simulate(const std::string& config_path, CLI::App* cmd, trda::StudyConfig cfg,
                 const std::vector<std::string>& method_names, const std::string& out) {
  if (!config_path.empty()) {
    trda::StudyConfig file_cfg = trda::study_config_from_json(read_file(config_path));
    // command-line flags override the file
    const auto keep = cfg;
    cfg = file_cfg;
    if (cmd->count("--scenario")) cfg.scenario = keep.scenario;
    if (cmd->count("--q")) cfg.q = keep.q;
    if (cmd->count("--epsilons")) cfg.epsilons = keep.epsilons;
    if (cmd->count("--n-train")) cfg.n_train = keep.n_train;
    if (cmd->count("--n-test")) cfg.n_test = keep.n_test;
    if (cmd->count("--replications")) cfg.replications = keep.replications;
    if (cmd->count("--seed")) cfg.seed = keep.seed;
    if (cmd->count("--threads")) cfg.threads = keep.threads;
    if (cmd->count("--alpha")) cfg.robust.alpha = keep.robust.alpha;
  }
  if (cmd->count("--methods")) {
    cfg.methods.clear();
    for (const auto& name : method_names) cfg.methods.push_back(trda::parse_method(name));
  }

  const trda::StudyReport report = trda::run_study(cfg);
  trda::write_report_csv(report, out + ".csv");
  trda::write_summary_json(report, out + ".summary.json");
  std::cout << out << ".csv\n" << out << ".summary.json\n";
  return 0;
}

int run_crossval(const std::string& data_path, const std::string& label_column,
                 const trda::CvConfig& cfg, const std::string& out) {
  const trda::CsvLoadReport loaded = trda::load_csv(data_path, label_column);
  const trda::CvResult result = trda::crossval(loaded.data, cfg);
  trda::write_text_atomic(out, trda::crossval_csv(result, cfg));
  std::cout << out << '\n';
  if (loaded.n_rows_dropped > 0) {
    std::cerr << "dropped " << loaded.n_rows_dropped << " rows with missing values\n";
  }
  for (const auto& c : loaded.dropped_columns) {
    std::cerr << "dropped constant variable '" << c << "'\n";
  }
  for (const auto& e : result.fold_errors) std::cerr << e << '\n';
  return 0;
}

int run_reduce(const trda::ScatterPair& pair, trda::ReduceMethod method, int k,
               const std::string& out) {
  trda::Projection proj;
  if (method == trda::ReduceMethod::tr) {
    proj = trda::solve_tr(pair, k);
  } else {
    proj = trda::fda(pair, k);
  }
  trda::write_text_atomic(out + ".matrix.csv", matrix_csv(proj.v));

  std::string profile = "k,rho,tr_b,tr_w,gap\n";
  for (const trda::RhoProfileEntry& e : trda::rho_profile(pair, k)) {
    profile += std::to_string(e.k) + "," + fmt(e.rho) + "," + fmt(e.tr_b) + "," + fmt(e.tr_w) +
               "," + fmt(e.gap) + "\n";
  }
  trda::write_text_atomic(out + ".profile.csv", profile);
  std::cout << out << ".matrix.csv\n" << out << ".profile.csv\n";
  return 0;
}

int run_bound_check(trda::ScenarioId scenario, int q, const std::vector<double>& eps_grid,
                    int k, const std::string& out) {
  const trda::ScenarioSpec spec = trda::build_scenario(scenario, q);
  std::string csv =
      "epsilon,observed,bound_specialized,bound_general_fo,bound_general,"
      "observed_over_epsilon,sigma,gamma,tau,rho\n";
  for (double eps : eps_grid) {
    if (eps <= 0.0 || eps >= 1.0) {
      throw ValidationError("bound-check: epsilon must lie in (0, 1)");
    }
    const trda::PerturbationReport rep =
        trda::tr_perturbation_bound(spec.clean, trda::contamination(spec, eps), k);
    csv += fmt(eps) + "," + fmt(rep.observed_sin) + "," + fmt(rep.bound_specialized) + "," +
           fmt(rep.bound_general_fo) + "," + fmt(rep.bound_general) + "," +
           fmt(rep.observed_sin / eps) + "," + fmt(rep.sigma) + "," + fmt(rep.gamma) + "," +
           fmt(rep.tau) + "," + fmt(rep.rho) + "\n";
  }
  trda::write_text_atomic(out, csv);
  std::cout << out << '\n';
  return 0;
}

int run_scan_conjecture(int pencils, int dim, int rank, int k_max, std::uint64_t seed,
                        const std::string& out) {
  if (pencils < 1 || dim < 2 || rank < 1 || rank > dim || k_max < 2 || k_max > dim) {
    throw ValidationError("scan-conjecture: need pencils >= 1, 2 <= k_max <= dim, 1 <= rank <= dim");
  }
  std::string csv = "pencil,k,rho,tr_b,gap,decrease_next\n";
  int violations = 0;
  for (int i = 0; i < pencils; ++i) {
    trda::RngStream rng({seed, 0x5343414eu, static_cast<std::uint64_t>(i)});
    trda::Matrix a(dim, rank);
    for (Eigen::Index c = 0; c < a.cols(); ++c) a.col(c) = rng.normal_vector(dim);
    a.rowwise() -= a.colwise().mean();
    trda::Matrix g(dim, dim + 5);
    for (Eigen::Index c = 0; c < g.cols(); ++c) g.col(c) = rng.normal_vector(dim);

    trda::ScatterPair s;
    s.b = a * a.transpose();
    s.w = g * g.transpose() / static_cast<double>(dim + 5);
    s.s_pooled = s.w;
    s.source = trda::ScatterSource::theoretical;

    const auto profile = trda::rho_profile(s, k_max);
    const trda::ConjectureReport rep = trda::conjecture_scan(s, k_max);
    violations += static_cast<int>(rep.violations.size());
    for (std::size_t e = 0; e < profile.size(); ++e) {
      const bool dec =
          std::any_of(rep.violations.begin(), rep.violations.end(),
                      [&](const trda::ConjectureViolation& v) { return v.k == profile[e].k; });
      csv += std::to_string(i) + "," + std::to_string(profile[e].k) + "," + fmt(profile[e].rho) +
             "," + fmt(profile[e].tr_b) + "," + fmt(profile[e].gap) + "," +
             (dec ? "1" : "0") + "\n";
    }
  }
  trda::write_text_atomic(out, csv);
  std::cout << out << '\n';
  std::cout << "pencils=" << pencils << " between_trace_decreases=" << violations << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-ratio and Fisher discriminant reduction toolkit"};
  app.require_subcommand(1);

  // shared option storage
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;

  trda::StudyConfig study_cfg;
  std::string config_path;
  std::string scenario_name = "I";
  std::vector<std::string> method_names;
  auto* sim = app.add_subcommand("simulate", "Run a replication study from a config or flags");
  sim->add_option("--config", config_path, "JSON study configuration file");
  sim->add_option("--scenario", scenario_name, "Scenario id (I, II, III, IV)");
  sim->add_option("--q", study_cfg.q, "Irrelevant variables (scenario IV)");
  sim->add_option("--epsilons", study_cfg.epsilons, "Contamination levels")->delimiter(',');
  sim->add_option("--n-train", study_cfg.n_train, "Training draws per group");
  sim->add_option("--n-test", study_cfg.n_test, "Test draws per group");
  sim->add_option("--replications", study_cfg.replications, "Replication count");
  sim->add_option("--methods", method_names, "Subset of cTR,cFDA,rTR,rFDA,tTR,tFDA,tQDA")
      ->delimiter(',');
  sim->add_option("--alpha", study_cfg.robust.alpha, "Robust subset fraction");
  sim->add_option("--seed", seed, "Master seed");
  sim->add_option("--threads", threads, "Worker threads (0 = TRDA_THREADS or all cores)");
  sim->add_option("--out", out, "Output prefix: <out>.csv and <out>.summary.json")
      ->default_val("study");

  trda::CvConfig cv_cfg;
  std::string data_path, label_column, method_name = "tr", estimator_name = "classical";
  auto* cv = app.add_subcommand("crossval", "Stratified k-fold evaluation on a CSV dataset");
  cv->add_option("--data", data_path, "Input CSV with a header row")->required();
  cv->add_option("--label-column", label_column, "Name of the class column")->required();
  cv->add_option("--method", method_name, "Reducer: tr or fda");
  cv->add_option("--estimator", estimator_name, "Scatter estimates: classical or robust");
  cv->add_option("--folds", cv_cfg.folds, "Fold count");
  cv->add_option("--alpha", cv_cfg.robust.alpha, "Robust subset fraction");
  cv->add_option("--seed", seed, "Fold-assignment seed");
  cv->add_option("--threads", threads, "Worker threads (0 = TRDA_THREADS or all cores)");
  cv->add_option("--out", out, "Output CSV path")->default_val("crossval.csv");

  std::string pair_path;
  std::string reduce_scenario;
  int reduce_q = 0;
  int reduce_k = 2;
  std::string reduce_method_name = "tr";
  auto* red = app.add_subcommand("reduce", "Emit a projection matrix and its rho profile");
  red->add_option("--pair", pair_path, "JSON file with 'b' and 'w' matrices");
  red->add_option("--scenario", reduce_scenario, "Use a built-in population pair instead");
  red->add_option("--q", reduce_q, "Irrelevant variables (scenario IV)");
  red->add_option("--method", reduce_method_name, "Reducer: tr or fda");
  red->add_option("--k", reduce_k, "Reduced dimension");
  red->add_option("--seed", seed, "Seed (random restarts)");
  red->add_option("--threads", threads, "Worker threads");
  red->add_option("--out", out, "Output prefix: <out>.matrix.csv and <out>.profile.csv")
      ->default_val("reduce");

  std::string bc_scenario = "I";
  int bc_q = 0;
  int bc_k = 2;
  std::vector<double> bc_eps = {1e-4, 1e-3};
  auto* bc = app.add_subcommand("bound-check", "Subspace perturbation bound over an epsilon grid");
  bc->add_option("--scenario", bc_scenario, "Scenario id");
  bc->add_option("--q", bc_q, "Irrelevant variables (scenario IV)");
  bc->add_option("--eps", bc_eps, "Contamination levels")->delimiter(',');
  bc->add_option("--k", bc_k, "Reduced dimension");
  bc->add_option("--seed", seed, "Seed");
  bc->add_option("--threads", threads, "Worker threads");
  bc->add_option("--out", out, "Output CSV path")->default_val("bound_check.csv");

  int sc_pencils = 1000, sc_dim = 20, sc_rank = 10, sc_kmax = 8;
  auto* sc = app.add_subcommand("scan-conjecture",
                                "Scan random pencils for between-trace monotonicity in k");
  sc->add_option("--pencils", sc_pencils, "Number of random pencils");
  sc->add_option("--dim", sc_dim, "Pencil dimension");
  sc->add_option("--rank", sc_rank, "Rank of the between matrix");
  sc->add_option("--k-max", sc_kmax, "Profile depth");
  sc->add_option("--seed", seed, "Pencil seed");
  sc->add_option("--threads", threads, "Worker threads");
  sc->add_option("--out", out, "Output CSV path")->default_val("conjecture.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << trda::error_json("validation", e.what()) << '\n';
    return 1;
  }

  try {
    if (sim->parsed()) {
      study_cfg.scenario = trda::parse_scenario_id(scenario_name);
      study_cfg.seed = seed;
      study_cfg.threads = threads;
      return run_simulate(config_path, sim, study_cfg, method_names, out);
    }
    if (cv->parsed()) {
      cv_cfg.method = trda::parse_reduce_method(method_name);
      cv_cfg.estimator = trda::parse_estimator(estimator_name);
      cv_cfg.seed = seed;
      cv_cfg.threads = threads;
      return run_crossval(data_path, label_column, cv_cfg, out);
    }
    if (red->parsed()) {
      if (pair_path.empty() == reduce_scenario.empty()) {
        throw ValidationError("reduce: pass exactly one of --pair or --scenario");
      }
      const trda::ScatterPair pair =
          pair_path.empty()
              ? trda::theoretical_scatter(
                    trda::build_scenario(trda::parse_scenario_id(reduce_scenario), reduce_q).clean)
              : load_pair_file(pair_path);
      return run_reduce(pair, trda::parse_reduce_method(reduce_method_name), reduce_k, out);
    }
    if (bc->parsed()) {
      return run_bound_check(trda::parse_scenario_id(bc_scenario), bc_q, bc_eps, bc_k, out);
    }
    if (sc->parsed()) {
      return run_scan_conjecture(sc_pencils, sc_dim, sc_rank, sc_kmax, seed, out);
    }
    throw ValidationError("no subcommand selected");
  } catch (const ValidationError& e) {
    std::cerr << trda::error_json("validation", e.what()) << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << trda::error_json("validation", e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << trda::error_json("numerical", e.what()) << '\n';
    return 2;
  }
}
