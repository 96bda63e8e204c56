#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dsfm/submodular.hpp"

namespace dsfm {

struct SolveReport {
  std::string solver;
  std::vector<int> minimizer;
  double value = 0;
  // value - sum_v min((Ay)(v), 0); nonnegative, zero certifies optimality.
  double certificate_gap = 0;
  double continuous_objective = std::numeric_limits<double>::quiet_NaN();
  std::int64_t iterations = 0;
  std::int64_t oracle_calls = 0;
  std::array<std::int64_t, kNumKinds> oracle_calls_by_kind{};
  double wall_time_s = 0;
  // False when any oracle route is approximate (e.g. iteration-capped
  // Wolfe); the minimizer claim is then best-effort, the gap still honest.
  bool certified = true;
  bool converged = true;
  std::uint64_t seed = 0;
  std::int64_t augmentations = 0;
  std::int64_t capacity_queries = 0;
};

}  // namespace dsfm
