#include "trda/contaminate.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace trda {
namespace {

constexpr std::uint64_t kPurposeFlag = 0x464c41u;
constexpr std::uint64_t kPurposeClean = 0x434c4eu;
constexpr std::uint64_t kPurposeContam = 0x434e54u;

void check_spec(const std::vector<GroupModel>& models, const ContaminationSpec& spec) {
  if (spec.epsilon < 0.0 || spec.epsilon >= 1.0 + 1e-15) {
    throw std::invalid_argument("contamination: epsilon must be in [0, 1]");
  }
  if (spec.contaminated.size() != models.size() ||
      spec.contaminating.size() != models.size()) {
    throw std::invalid_argument("contamination: spec size mismatch");
  }
}

std::vector<GroupModel> mixture_models(const std::vector<GroupModel>& models,
                                       const ContaminationSpec& spec) {
  std::vector<GroupModel> mixed = models;
  for (std::size_t j = 0; j < models.size(); ++j) {
    if (!spec.contaminated[j]) continue;
    auto [m, v] = contaminated_group_moments(models[j], spec.contaminating[j], spec.epsilon);
    mixed[j].mu = std::move(m);
    mixed[j].sigma = std::move(v);
  }
  return mixed;
}

}  // namespace

std::pair<Vector, Matrix> contaminated_group_moments(const GroupModel& clean,
                                                     const GroupModel& contam,
                                                     double epsilon) {
  const Vector delta = contam.mu - clean.mu;
  Vector mean = clean.mu + epsilon * delta;
  Matrix var = clean.sigma + epsilon * (contam.sigma - clean.sigma) +
               epsilon * (1.0 - epsilon) * (delta * delta.transpose());
  return {std::move(mean), std::move(var)};
}

ScatterPair contaminated_scatter(const std::vector<GroupModel>& models,
                                 const ContaminationSpec& spec) {
  check_spec(models, spec);
  ScatterPair sp = theoretical_scatter(mixture_models(models, spec));
  sp.source = ScatterSource::contaminated_theoretical;
  return sp;
}

std::pair<Matrix, Matrix> first_order_one_group(const std::vector<GroupModel>& models,
                                                const ContaminationSpec& spec) {
  check_spec(models, spec);
  for (std::size_t j = 1; j < spec.contaminated.size(); ++j) {
    if (spec.contaminated[j]) {
      throw std::invalid_argument("first_order_one_group: only group 0 may be contaminated");
    }
  }
  if (spec.contaminated.empty() || !spec.contaminated[0]) {
    throw std::invalid_argument("first_order_one_group: group 0 must be contaminated");
  }
  const Eigen::Index p = models[0].mu.size();
  Vector mu = Vector::Zero(p);
  for (const auto& m : models) mu += m.prior * m.mu;
  const double p0 = models[0].prior;
  const Vector delta = models[0].mu - mu;
  const Vector big_delta = spec.contaminating[0].mu - models[0].mu;
  const Matrix sig_diff = spec.contaminating[0].sigma - models[0].sigma;
  const double eps = spec.epsilon;

  Matrix dw = eps * p0 * (sig_diff + big_delta * big_delta.transpose());
  Matrix db = eps * p0 * (delta * big_delta.transpose() + big_delta * delta.transpose());
  return {std::move(db), std::move(dw)};
}

PerturbationReport tr_perturbation_bound(const std::vector<GroupModel>& models,
                                         const ContaminationSpec& spec, int k,
                                         const TrOptions& opts) {
  check_spec(models, spec);
  int contaminated_group = -1;
  for (std::size_t j = 0; j < spec.contaminated.size(); ++j) {
    if (!spec.contaminated[j]) continue;
    if (contaminated_group >= 0) {
      throw std::invalid_argument("tr_perturbation_bound: exactly one contaminated group required");
    }
    contaminated_group = static_cast<int>(j);
  }
  if (contaminated_group < 0) {
    throw std::invalid_argument("tr_perturbation_bound: no contaminated group");
  }
  const GroupModel& gm = models[contaminated_group];
  const GroupModel& cm = spec.contaminating[contaminated_group];
  if ((cm.sigma - gm.sigma).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + gm.sigma.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(
        "tr_perturbation_bound: the specialized bound requires an unchanged covariance");
  }

  const ScatterPair clean = theoretical_scatter(models);
  const Projection sol = solve_tr(clean, k, opts);
  if (sol.gap <= 1e-10 * (spectral_norm(clean.b) + spectral_norm(clean.w))) {
    throw std::runtime_error("tr_perturbation_bound: eigenvalue gap is numerically zero, "
                             "the solution is not unique and the bound does not apply");
  }

  const ScatterPair dirty = contaminated_scatter(models, spec);
  const Projection sol_dirty = solve_tr(dirty, k, opts);

  PerturbationReport rep;
  rep.delta_b = dirty.b - clean.b;
  rep.delta_w = dirty.w - clean.w;
  rep.rho = sol.rho;
  rep.gamma = sol.gap;
  const EigenDecomposition we = sym_eig(clean.w);
  rep.tau = we.values.tail(k).sum();
  rep.sigma = spectral_norm(rep.delta_b) + rep.rho * spectral_norm(rep.delta_w);

  rep.bound_general = (4.0 * rep.sigma / rep.gamma) *
                      (1.0 + (k / rep.tau) * spectral_norm(clean.w + rep.delta_w));

  const Eigen::Index p = models[0].mu.size();
  Vector mu = Vector::Zero(p);
  for (const auto& m : models) mu += m.prior * m.mu;
  const double p0 = gm.prior;
  const double nd = (gm.mu - mu).norm();        // ||delta||
  const double nD = (cm.mu - gm.mu).norm();     // ||Delta||
  const double eps = spec.epsilon;
  const double sigma_fo = eps * p0 * nD * (2.0 * nd + p0 * rep.rho * nD);
  rep.bound_general_fo = (4.0 * sigma_fo / rep.gamma) *
                         (1.0 + (k / rep.tau) * spectral_norm(clean.w));
  const double cond_w = we.values[0] / we.values[we.values.size() - 1];
  rep.bound_specialized = (4.0 / rep.gamma) * eps * p0 * nD *
                          (2.0 * nd + p0 * rep.rho * nD) * (1.0 + cond_w);

  rep.observed_sin = spectral_norm(sol.v * sol.v.transpose() -
                                   sol_dirty.v * sol_dirty.v.transpose());
  return rep;
}

ContaminatedSample sample_contaminated(const std::vector<GroupModel>& models,
                                       const ContaminationSpec& spec,
                                       const std::vector<int>& n_per_group,
                                       const StreamKey& base_key) {
  check_spec(models, spec);
  if (n_per_group.size() != models.size()) {
    throw std::invalid_argument("sample_contaminated: n_per_group size mismatch");
  }
  const Eigen::Index p = models[0].mu.size();
  Eigen::Index n_total = 0;
  for (int nj : n_per_group) {
    if (nj < 1) throw std::invalid_argument("sample_contaminated: n_per_group must be positive");
    n_total += nj;
  }

  ContaminatedSample out;
  out.data.x.resize(n_total, p);
  out.data.labels.resize(n_total);
  out.data.n_groups = static_cast<int>(models.size());
  out.observed_fraction.assign(models.size(), 0.0);

  std::vector<Eigen::LLT<Matrix>> clean_llt, contam_llt;
  for (std::size_t j = 0; j < models.size(); ++j) {
    clean_llt.emplace_back(models[j].sigma);
    if (clean_llt.back().info() != Eigen::Success) {
      throw std::invalid_argument("sample_contaminated: clean covariance is not SPD");
    }
    contam_llt.emplace_back(spec.contaminated[j] ? spec.contaminating[j].sigma : models[j].sigma);
    if (contam_llt.back().info() != Eigen::Success) {
      throw std::invalid_argument("sample_contaminated: contaminating covariance is not SPD");
    }
  }

  Eigen::Index row = 0;
  for (std::size_t j = 0; j < models.size(); ++j) {
    const int nj = n_per_group[j];
    RngStream flag = base_key.with(j).with(kPurposeFlag).stream();
    RngStream clean = base_key.with(j).with(kPurposeClean).stream();
    RngStream contam = base_key.with(j).with(kPurposeContam).stream();
    const Matrix lc = clean_llt[j].matrixL();
    const Matrix lo = contam_llt[j].matrixL();
    int n_out = 0;
    for (int i = 0; i < nj; ++i, ++row) {
      const bool outlier = spec.contaminated[j] && flag.bernoulli(spec.epsilon);
      if (outlier) {
        ++n_out;
        out.data.x.row(row) =
            (spec.contaminating[j].mu + lo * contam.normal_vector(p)).transpose();
      } else {
        out.data.x.row(row) = (models[j].mu + lc * clean.normal_vector(p)).transpose();
      }
      out.data.labels[row] = static_cast<int>(j);
    }
    out.observed_fraction[j] = static_cast<double>(n_out) / nj;
    if (spec.contaminated[j] && spec.epsilon > 0.0 && spec.epsilon < 1.0) {
      const double se = std::sqrt(spec.epsilon * (1.0 - spec.epsilon) / nj);
      if (std::abs(out.observed_fraction[j] - spec.epsilon) > 3.0 * se) {
        out.fraction_within_3se = false;
      }
    }
  }
  return out;
}

}  // namespace trda
