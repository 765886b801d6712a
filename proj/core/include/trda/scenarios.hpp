#pragma once

#include <string>
#include <utility>
#include <vector>

#include "trda/contaminate.hpp"
#include "trda/moments.hpp"
#include "trda/reduce.hpp"

namespace trda {

enum class ScenarioId { I, II, III, IV };

ScenarioId parse_scenario_id(const std::string& s);
std::string to_string(ScenarioId id);

// Four-group Gaussian mixture family used by the simulation studies.
// Scenario IV appends q independent standard-normal coordinates to II.
struct ScenarioSpec {
  ScenarioId id = ScenarioId::I;
  int q = 0;
  int k = 2;
  int contaminated_group = 0;
  std::vector<GroupModel> clean;
  std::vector<GroupModel> contaminating;

  int g() const { return static_cast<int>(clean.size()); }
  int p() const { return static_cast<int>(clean.front().mu.size()); }
};

// q is only meaningful for scenario IV and must be one of {0,10,20,50,100}.
ScenarioSpec build_scenario(ScenarioId id, int q = 0);

// One-group mixture contamination at level epsilon (outlying mean, same
// covariance); epsilon = 0 yields a no-op spec.
ContaminationSpec contamination(const ScenarioSpec& spec, double epsilon);

// Population-level projections (FDA first, TR second) at spec.k, used as the
// benchmark subspaces for angle metrics.
std::pair<Projection, Projection> theoretical_solutions(const ScenarioSpec& spec);

}  // namespace trda
