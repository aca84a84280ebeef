#include "bftopt/redundancy.hpp"

#include <limits>

namespace bftopt {

namespace {

class MemoizedMinimizers {
 public:
  explicit MemoizedMinimizers(std::span<const QuadraticCost> costs) : costs_(costs) {}

  const Vector& at(const AgentSet& subset) {
    auto it = cache_.find(subset);
    if (it == cache_.end()) {
      it = cache_.emplace(subset, aggregate_minimizer(costs_, subset)).first;
    }
    return it->second;
  }

  std::map<AgentSet, Vector>&& take() { return std::move(cache_); }

 private:
  std::span<const QuadraticCost> costs_;
  std::map<AgentSet, Vector> cache_;
};

}  // namespace

double point_set_distance(const Vector& x, std::span<const Vector> set) {
  if (set.empty()) throw std::invalid_argument("point_set_distance: empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : set) {
    require_dimension(y, x.size(), "point_set_distance");
    best = std::min(best, (x - y).norm());
  }
  return best;
}

double hausdorff_distance(std::span<const Vector> x_set, std::span<const Vector> y_set) {
  if (x_set.empty() || y_set.empty()) throw std::invalid_argument("hausdorff_distance: empty set");
  double sup = 0.0;
  for (const auto& x : x_set) sup = std::max(sup, point_set_distance(x, y_set));
  for (const auto& y : y_set) sup = std::max(sup, point_set_distance(y, x_set));
  return sup;
}

RedundancyReport measure_redundancy(std::span<const QuadraticCost> costs, int f,
                                    const RedundancyOptions& options) {
  const int n = static_cast<int>(costs.size());
  if (f < 0) throw std::invalid_argument("measure_redundancy: f must be non-negative");
  if (n <= 2 * f) {
    throw std::invalid_argument("measure_redundancy: requires n > 2f (got n=" + std::to_string(n) +
                                ", f=" + std::to_string(f) + ")");
  }
  if (n > options.max_agents && !options.force) {
    double solves = 0.0;
    for (int k = 0; k <= f; ++k) solves += binomial(n - f, k);
    solves *= binomial(n, f);
    throw std::invalid_argument("measure_redundancy: n=" + std::to_string(n) +
                                " exceeds the guard (" + std::to_string(options.max_agents) +
                                "); the enumeration needs about " +
                                std::to_string(static_cast<long long>(solves)) +
                                " minimizer solves -- pass force to run anyway");
  }

  MemoizedMinimizers minimizers(costs);
  RedundancyReport report;
  bool have_witness = false;

  for_each_subset(full_agent_set(n), n - f, [&](const AgentSet& superset) {
    const Vector& x_super = minimizers.at(superset);
    double eps_super = 0.0;
    // |S-hat| ranges over n-2f .. n-f; the S-hat = S case contributes 0 but
    // seeds the witness for exactly-redundant instances.
    for (int size = n - 2 * f; size <= n - f; ++size) {
      for_each_subset(superset, size, [&](const AgentSet& subset) {
        const double dist = (x_super - minimizers.at(subset)).norm();
        eps_super = std::max(eps_super, dist);
        const bool better =
            dist > report.epsilon ||
            (dist == report.epsilon &&
             (!have_witness || std::make_pair(superset, subset) <
                                   std::make_pair(report.witness_superset, report.witness_subset)));
        if (better) {
          report.epsilon = dist;
          report.witness_superset = superset;
          report.witness_subset = subset;
          have_witness = true;
        }
      });
    }
    report.per_superset[superset] = eps_super;
  });

  // Instance-level coefficients: mu over every agent, gamma as the worst
  // (smallest) value over the (n-f)-sets, so both assumptions hold for every
  // candidate honest set.
  double mu = 0.0;
  for (const auto& c : costs) mu = std::max(mu, lipschitz_coefficient(c));
  double gamma = std::numeric_limits<double>::infinity();
  for (const auto& [superset, unused] : report.per_superset) {
    const auto sc = strong_convexity_coefficient(costs, superset);
    if (!sc.strongly_convex) {
      throw RankDeficiencyError("measure_redundancy: an (n-f)-set is not strongly convex");
    }
    gamma = std::min(gamma, sc.gamma);
  }
  report.curvature = {mu, gamma};
  report.minimizers = minimizers.take();
  return report;
}

double superset_epsilon(std::span<const QuadraticCost> costs, const AgentSet& base, int f) {
  if (f < 0) throw std::invalid_argument("superset_epsilon: f must be non-negative");
  if (static_cast<int>(base.size()) <= f) {
    throw std::invalid_argument("superset_epsilon: base set must have more than f members");
  }
  MemoizedMinimizers minimizers(costs);
  const Vector& x_base = minimizers.at(base);
  double eps = 0.0;
  const int low = static_cast<int>(base.size()) - f;
  for (int size = low; size <= static_cast<int>(base.size()); ++size) {
    for_each_subset(base, size, [&](const AgentSet& subset) {
      eps = std::max(eps, (x_base - minimizers.at(subset)).norm());
    });
  }
  return eps;
}

}  // namespace bftopt
