#pragma once

#include <functional>
#include <vector>

#include "offload/types.hpp"

namespace offload {

struct OapSolution {
  Assignment assignment;  // 0 unassigned, 1..K
  double value = 0;
};

// Reward gaps of an instance. delta_min is the compound gap between the
// optimal and the best sub-optimal assignment; delta_user_min the minimum
// per-user inter-server gap; delta1/delta2 the cross-user incremental gaps
// entering delta_prime_min = min{delta1, delta2, delta_user_min}.
struct GapSummary {
  double delta_min = 0;
  double delta_user_min = 0;
  double delta1_min = 0;
  double delta2_min = 0;
  double delta_prime_min = 0;
};

struct KnapsackSolution {
  std::vector<int> selected;  // original item indices, ascending
  double value = 0;
  long long nodes_expanded = 0;
  long long bound_prunes = 0;
};

// Capacity-constrained reward maximization with unit task slots, solved by
// Hungarian matching on the unit-expanded bipartite graph. Ties between
// optimal assignments break toward the lexicographically smallest vector.
OapSolution solve_oap(const Matrix& mu, const std::vector<int>& capacities);

// Optimal compound value only (single Hungarian solve).
double oap_value(const Matrix& mu, const std::vector<int>& capacities);

// Hungarian matching on ln(1 + beta * mu), returning the fair assignment and
// its total log-utility.
OapSolution solve_fair_oap(const Matrix& mu, const std::vector<int>& capacities, double beta);

// As solve_fair_oap but with a caller-supplied entry transform (identity
// recovers solve_oap; used to cross-check the fairness path).
OapSolution solve_oap_transformed(const Matrix& mu, const std::vector<int>& capacities,
                                  const std::function<double(double)>& transform);

// Gap computation by exhaustive assignment enumeration (guarded to N <= 12).
// Throws ConfigError on degenerate instances (any gap ~ 0).
GapSummary compute_gaps(const Matrix& mu, const std::vector<int>& capacities);

// The per-user and cross-user gap parts only (no assignment enumeration);
// delta_min is left at +infinity. Suited to heterogeneous instances.
GapSummary compute_user_gaps(const Matrix& mu);

// Exact 0/1 knapsack via best-first branch-and-bound with the fractional
// relaxation bound. Items with value <= 0 are excluded up front.
KnapsackSolution solve_knapsack_exact(const std::vector<double>& values,
                                      const std::vector<double>& weights, double capacity);

// Sequential per-server knapsack improvement over incremental rewards;
// guaranteed 2-approximate for the heterogeneous assignment problem when the
// sub-problems are solved exactly (they are).
OapSolution solve_gap_2approx(const Matrix& mu, const std::vector<double>& demands,
                              const std::vector<double>& capacities);

// Exact heterogeneous assignment optimum by depth-first search with residual
// capacity pruning and an additive bound. Guarded to N <= 12.
OapSolution solve_gap_exact(const Matrix& mu, const std::vector<double>& demands,
                            const std::vector<double>& capacities);

}  // namespace offload
