#include "bftopt/resilient.hpp"

namespace bftopt {

SubmittedCosts::SubmittedCosts(std::vector<QuadraticCost> submitted, int fault_budget)
    : costs(std::move(submitted)), f(fault_budget) {
  if (f < 0) throw std::invalid_argument("SubmittedCosts: f must be non-negative");
  if (n() <= 2 * f) {
    throw std::invalid_argument("SubmittedCosts: requires n > 2f (got n=" + std::to_string(n()) +
                                ", f=" + std::to_string(f) + ")");
  }
  if (!costs.empty()) {
    const int d = costs.front().dimension();
    for (const auto& c : costs) {
      if (c.dimension() != d) throw std::invalid_argument("SubmittedCosts: dimension mismatch");
    }
  }
}

ResilientSolution resilient_solve(const SubmittedCosts& submitted,
                                  const ResilientOptions& options) {
  const int n = submitted.n();
  const int f = submitted.f;
  if (n > options.max_agents && !options.force) {
    throw std::invalid_argument("resilient_solve: n=" + std::to_string(n) +
                                " exceeds the guard (" + std::to_string(options.max_agents) +
                                "); pass force to run this exhaustive enumeration anyway");
  }
  std::span<const QuadraticCost> costs(submitted.costs);

  std::map<AgentSet, Vector> minimizers;
  auto minimizer_of = [&](const AgentSet& subset) -> const Vector& {
    auto it = minimizers.find(subset);
    if (it == minimizers.end()) it = minimizers.emplace(subset, aggregate_minimizer(costs, subset)).first;
    return it->second;
  };

  ResilientSolution solution;
  bool have_best = false;
  double best_r = 0.0;

  for_each_subset(full_agent_set(n), n - f, [&](const AgentSet& candidate) {
    const Vector& x_candidate = minimizer_of(candidate);
    double r = 0.0;
    // f = 0 leaves no proper (n-2f)-subsets; the max over an empty family
    // is 0 and the single candidate (everyone) wins.
    for_each_subset(candidate, n - 2 * f, [&](const AgentSet& inner) {
      if (inner.size() == candidate.size()) return;
      r = std::max(r, (x_candidate - minimizer_of(inner)).norm());
    });
    solution.r_values[candidate] = r;
    if (!have_best || r < best_r || (r == best_r && candidate < solution.chosen_set)) {
      have_best = true;
      best_r = r;
      solution.chosen_set = candidate;
      solution.x_hat = x_candidate;
    }
  });

  return solution;
}

}  // namespace bftopt
