#include "offload/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace offload {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kValueTol = 1e-9;

// Minimum-cost assignment of n rows to m >= n columns (shortest augmenting
// paths with potentials). Returns per-row column index, 0-based.
std::vector<int> hungarian_min(const Matrix& cost) {
  const int n = cost.rows();
  const int m = cost.cols();
  std::vector<double> u(n + 1, 0), v(m + 1, 0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

void check_oap_feasible(const Matrix& mu, const std::vector<int>& capacities) {
  int m = 0;
  for (int c : capacities) m += c;
  if (mu.rows() > m) {
    throw ConfigError("assignment infeasible: " + std::to_string(mu.rows()) + " users exceed " +
                      std::to_string(m) + " task slots");
  }
  if (mu.cols() != static_cast<int>(capacities.size())) {
    throw ConfigError("assignment: capacity list does not match mu columns");
  }
}

// Optimal value of the unit-expanded matching for rows `users` (indices into
// mu) against the given residual capacities.
double oap_value_restricted(const Matrix& mu, const std::vector<int>& users,
                            const std::vector<int>& capacities) {
  if (users.empty()) return 0;
  UnitMap units(capacities);
  Matrix cost(static_cast<int>(users.size()), units.total_units());
  for (int r = 0; r < cost.rows(); ++r) {
    for (int c = 0; c < cost.cols(); ++c) {
      cost(r, c) = -mu(users[r], units.server_of(c + 1) - 1);
    }
  }
  const auto cols = hungarian_min(cost);
  double value = 0;
  for (int r = 0; r < cost.rows(); ++r) value += -cost(r, cols[r]);
  return value;
}

}  // namespace

double oap_value(const Matrix& mu, const std::vector<int>& capacities) {
  check_oap_feasible(mu, capacities);
  std::vector<int> all(mu.rows());
  std::iota(all.begin(), all.end(), 0);
  return oap_value_restricted(mu, all, capacities);
}

OapSolution solve_oap(const Matrix& mu, const std::vector<int>& capacities) {
  check_oap_feasible(mu, capacities);
  const int n = mu.rows();
  const double opt = oap_value(mu, capacities);

  // Fix users one at a time to the lowest server index that still permits an
  // optimal completion; this pins the lexicographically smallest optimum.
  OapSolution sol;
  sol.assignment.assign(n, 0);
  std::vector<int> residual = capacities;
  std::vector<int> rest(n);
  std::iota(rest.begin(), rest.end(), 0);
  double fixed_value = 0;
  for (int i = 0; i < n; ++i) {
    rest.erase(rest.begin());
    bool placed = false;
    for (int j = 0; j < mu.cols() && !placed; ++j) {
      if (residual[j] == 0) continue;
      residual[j] -= 1;
      const double completion = oap_value_restricted(mu, rest, residual);
      if (fixed_value + mu(i, j) + completion >= opt - kValueTol) {
        sol.assignment[i] = j + 1;
        fixed_value += mu(i, j);
        placed = true;
      } else {
        residual[j] += 1;
      }
    }
    if (!placed) throw SimulationError("solve_oap: no optimal completion found");
  }
  sol.value = assignment_value(mu, sol.assignment);
  return sol;
}

OapSolution solve_oap_transformed(const Matrix& mu, const std::vector<int>& capacities,
                                  const std::function<double(double)>& transform) {
  Matrix t(mu.rows(), mu.cols());
  for (int i = 0; i < mu.rows(); ++i) {
    for (int j = 0; j < mu.cols(); ++j) t(i, j) = transform(mu(i, j));
  }
  return solve_oap(t, capacities);
}

OapSolution solve_fair_oap(const Matrix& mu, const std::vector<int>& capacities, double beta) {
  if (!(beta > 0)) throw ConfigError("solve_fair_oap: beta must be positive");
  return solve_oap_transformed(mu, capacities,
                               [beta](double x) { return std::log1p(beta * x); });
}

GapSummary compute_user_gaps(const Matrix& mu) {
  const int n = mu.rows();
  const int k = mu.cols();
  GapSummary g;
  g.delta_min = kInf;
  g.delta_user_min = kInf;
  g.delta1_min = kInf;
  g.delta2_min = kInf;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int jp = 0; jp < k; ++jp) {
        if (j == jp) continue;
        g.delta_user_min = std::min(g.delta_user_min, std::abs(mu(i, j) - mu(i, jp)));
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int ip = 0; ip < n; ++ip) {
      if (i == ip) continue;
      for (int j = 0; j < k; ++j) {
        for (int kk = 0; kk < k; ++kk) {
          if (j == kk) continue;
          g.delta1_min =
              std::min(g.delta1_min, std::abs(mu(i, j) - (mu(ip, j) - mu(ip, kk))));
          for (int jp = 0; jp < k; ++jp) {
            if (jp == j) continue;
            g.delta2_min = std::min(
                g.delta2_min, std::abs((mu(i, j) - mu(i, jp)) - (mu(ip, j) - mu(ip, kk))));
          }
        }
      }
    }
  }
  g.delta_prime_min = std::min({g.delta1_min, g.delta2_min, g.delta_user_min});
  return g;
}

namespace {

// Enumerate feasible full assignments (every user placed), tracking the two
// highest distinct compound values.
void enumerate_assignments(const Matrix& mu, std::vector<int>& residual, Assignment& a, int i,
                           double value, double& best, double& second) {
  if (i == mu.rows()) {
    if (value > best + kValueTol) {
      second = best;
      best = value;
    } else if (value < best - kValueTol && value > second + kValueTol) {
      second = value;
    } else if (std::abs(value - best) <= kValueTol && best == -kInf) {
      best = value;
    }
    return;
  }
  for (int j = 0; j < mu.cols(); ++j) {
    if (residual[j] == 0) continue;
    residual[j] -= 1;
    a[i] = j + 1;
    enumerate_assignments(mu, residual, a, i + 1, value + mu(i, j), best, second);
    residual[j] += 1;
  }
}

}  // namespace

GapSummary compute_gaps(const Matrix& mu, const std::vector<int>& capacities) {
  check_oap_feasible(mu, capacities);
  if (mu.rows() > 12) {
    throw ConfigError("compute_gaps: exhaustive enumeration guarded to N <= 12");
  }
  GapSummary g = compute_user_gaps(mu);
  double best = -kInf, second = -kInf;
  std::vector<int> residual = capacities;
  Assignment a(mu.rows(), 0);
  enumerate_assignments(mu, residual, a, 0, 0.0, best, second);
  if (second == -kInf) {
    throw ConfigError("compute_gaps: fewer than two distinct assignment values");
  }
  g.delta_min = best - second;
  if (!(g.delta_min > kValueTol) || !(g.delta_user_min > kValueTol)) {
    throw ConfigError("degenerate instance: zero reward gap");
  }
  return g;
}

namespace {

struct KnapsackItem {
  int index;  // original index
  double value;
  double weight;
};

// Greedy fractional completion starting at sorted position `level`.
double fractional_bound(const std::vector<KnapsackItem>& items, int level, double value,
                        double remaining) {
  double bound = value;
  for (size_t q = level; q < items.size(); ++q) {
    if (items[q].weight <= remaining) {
      remaining -= items[q].weight;
      bound += items[q].value;
    } else {
      bound += items[q].value * (remaining / items[q].weight);
      break;
    }
  }
  return bound;
}

}  // namespace

KnapsackSolution solve_knapsack_exact(const std::vector<double>& values,
                                      const std::vector<double>& weights, double capacity) {
  KnapsackSolution sol;
  std::vector<KnapsackItem> items;
  for (size_t i = 0; i < values.size(); ++i) {
    if (weights[i] <= 0) throw ConfigError("knapsack: weights must be positive");
    if (values[i] <= 0) continue;  // never improves a maximum
    if (weights[i] > capacity + 1e-12) continue;
    items.push_back({static_cast<int>(i), values[i], weights[i]});
  }
  if (items.size() > 63) throw ConfigError("knapsack: more than 63 candidate items");
  std::sort(items.begin(), items.end(), [](const KnapsackItem& a, const KnapsackItem& b) {
    const double ra = a.value / a.weight, rb = b.value / b.weight;
    if (ra != rb) return ra > rb;
    return a.index < b.index;
  });

  struct Node {
    double bound;
    int level;
    double value;
    double weight;
    std::uint64_t taken;
  };
  auto node_less = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.level != b.level) return a.level < b.level;
    return a.taken > b.taken;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(node_less)> open(node_less);

  double best_value = 0;
  std::uint64_t best_taken = 0;
  open.push({fractional_bound(items, 0, 0, capacity), 0, 0, 0, 0});
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound <= best_value + kValueTol) {
      sol.bound_prunes += 1;
      continue;
    }
    sol.nodes_expanded += 1;
    if (node.level == static_cast<int>(items.size())) continue;
    const KnapsackItem& it = items[node.level];
    // Include branch.
    if (node.weight + it.weight <= capacity + 1e-12) {
      Node inc{0, node.level + 1, node.value + it.value, node.weight + it.weight,
               node.taken | (1ull << node.level)};
      inc.bound = fractional_bound(items, inc.level, inc.value, capacity - inc.weight);
      if (inc.value > best_value + kValueTol) {
        best_value = inc.value;
        best_taken = inc.taken;
      }
      if (inc.bound > best_value + kValueTol) {
        open.push(inc);
      } else {
        sol.bound_prunes += 1;
      }
    }
    // Exclude branch.
    Node exc{fractional_bound(items, node.level + 1, node.value, capacity - node.weight),
             node.level + 1, node.value, node.weight, node.taken};
    if (exc.bound > best_value + kValueTol) {
      open.push(exc);
    } else {
      sol.bound_prunes += 1;
    }
  }
  sol.value = best_value;
  for (size_t q = 0; q < items.size(); ++q) {
    if (best_taken & (1ull << q)) sol.selected.push_back(items[q].index);
  }
  std::sort(sol.selected.begin(), sol.selected.end());
  return sol;
}

OapSolution solve_gap_2approx(const Matrix& mu, const std::vector<double>& demands,
                              const std::vector<double>& capacities) {
  const int n = mu.rows();
  const int k = mu.cols();
  const double max_demand = *std::max_element(demands.begin(), demands.end());
  const double min_capacity = *std::min_element(capacities.begin(), capacities.end());
  if (max_demand > min_capacity + 1e-12) {
    throw ConfigError("gap 2-approx: max demand exceeds min server capacity");
  }

  Assignment indicator(n, 0);
  for (int j = 0; j < k; ++j) {
    std::vector<double> inc(n);
    for (int i = 0; i < n; ++i) {
      inc[i] = indicator[i] == 0 ? mu(i, j) : mu(i, j) - mu(i, indicator[i] - 1);
    }
    auto sub = solve_knapsack_exact(inc, demands, capacities[j]);
    for (int i : sub.selected) indicator[i] = j + 1;
  }
  return {indicator, assignment_value(mu, indicator)};
}

namespace {

struct GapSearch {
  const Matrix& mu;
  const std::vector<double>& demands;
  std::vector<double> residual;
  std::vector<double> suffix_best;  // suffix sums of per-user best rewards
  Assignment current;
  Assignment best_assignment;
  double best = -1;

  void dfs(int i, double value) {
    if (i == mu.rows()) {
      if (value > best + kValueTol) {
        best = value;
        best_assignment = current;
      }
      return;
    }
    if (value + suffix_best[i] <= best + kValueTol) return;
    for (int choice = 0; choice <= mu.cols(); ++choice) {
      if (choice == 0) {
        current[i] = 0;
        dfs(i + 1, value);
        continue;
      }
      const int j = choice - 1;
      if (demands[i] > residual[j] + 1e-12) continue;
      residual[j] -= demands[i];
      current[i] = choice;
      dfs(i + 1, value + mu(i, j));
      residual[j] += demands[i];
    }
    current[i] = 0;
  }
};

}  // namespace

OapSolution solve_gap_exact(const Matrix& mu, const std::vector<double>& demands,
                            const std::vector<double>& capacities) {
  const int n = mu.rows();
  if (n > 12) throw ConfigError("gap exact: search guarded to N <= 12");
  GapSearch search{mu, demands, capacities, {}, Assignment(n, 0), Assignment(n, 0), -1};
  search.suffix_best.assign(n + 1, 0);
  for (int i = n - 1; i >= 0; --i) {
    double row_best = 0;
    for (int j = 0; j < mu.cols(); ++j) row_best = std::max(row_best, mu(i, j));
    search.suffix_best[i] = search.suffix_best[i + 1] + row_best;
  }
  search.dfs(0, 0.0);
  return {search.best_assignment, search.best};
}

}  // namespace offload
