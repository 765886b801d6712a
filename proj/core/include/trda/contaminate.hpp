#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "trda/moments.hpp"
#include "trda/reduce.hpp"
#include "trda/rng.hpp"

namespace trda {

// Per-group Bernoulli(epsilon) mixture of a clean and a contaminating model.
// contaminating[j] is ignored when contaminated[j] is false (the group's
// mixture is then the clean model itself).
struct ContaminationSpec {
  double epsilon = 0.0;
  std::vector<GroupModel> contaminating;
  std::vector<bool> contaminated;
};

// Mean and covariance of the mixture (1-O)X + O X^c, O ~ Bernoulli(eps):
// E = mu + eps*delta, Var = Sigma + eps(Sigma_c - Sigma) + eps(1-eps) delta delta'.
std::pair<Vector, Matrix> contaminated_group_moments(const GroupModel& clean,
                                                     const GroupModel& contam,
                                                     double epsilon);

// Population scatter pair of the contaminated mixture (closed form).
ScatterPair contaminated_scatter(const std::vector<GroupModel>& models,
                                 const ContaminationSpec& spec);

// Linear-in-epsilon terms when only group 0 is contaminated:
// dW = eps*p_0 [(Sigma_c - Sigma) + Delta Delta'],
// dB = eps*p_0 (delta Delta' + Delta delta'), delta = mu_0 - mu.
std::pair<Matrix, Matrix> first_order_one_group(const std::vector<GroupModel>& models,
                                                const ContaminationSpec& spec);

struct PerturbationReport {
  Matrix delta_b;
  Matrix delta_w;
  double sigma = 0.0;        // ||dB|| + rho ||dW|| (spectral norms, exact perturbation)
  double gamma = 0.0;        // eigenvalue gap of B - rho W at the clean solution
  double tau = 0.0;          // sum of the k smallest eigenvalues of W
  double rho = 0.0;          // clean optimal trace ratio
  double bound_general = 0.0;       // (4 sigma / gamma)(1 + (k/tau)||W + dW||)
  double bound_general_fo = 0.0;    // same shape with the one-group sigma surrogate and ||W||
  double bound_specialized = 0.0;   // (4/gamma) eps p0 ||Delta||(2||delta|| + p0 rho ||Delta||)(1 + cond(W))
  double observed_sin = 0.0;        // ||VV' - V~V~'|| between clean and contaminated solutions
};

// Bound and observed subspace perturbation for one contaminated group with
// unchanged covariance. rho and gamma are evaluated at the clean problem.
PerturbationReport tr_perturbation_bound(const std::vector<GroupModel>& models,
                                         const ContaminationSpec& spec, int k,
                                         const TrOptions& opts = {});

struct ContaminatedSample {
  LabeledDataset data;
  std::vector<double> observed_fraction;  // per group
  bool fraction_within_3se = true;
};

// Draw n_per_group[j] rows for each group from its mixture. Streams are
// derived from base_key extended with (group, purpose) so draws are
// independent of evaluation order.
ContaminatedSample sample_contaminated(const std::vector<GroupModel>& models,
                                       const ContaminationSpec& spec,
                                       const std::vector<int>& n_per_group,
                                       const StreamKey& base_key);

}  // namespace trda
