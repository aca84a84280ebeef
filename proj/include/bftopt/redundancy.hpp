#pragma once

#include <map>
#include <span>

#include "bftopt/costmodel.hpp"

namespace bftopt {

/// min over y in X of ||x - y||. X must be non-empty.
double point_set_distance(const Vector& x, std::span<const Vector> set);

/// max{ sup_x dist(x, Y), sup_y dist(y, X) } over finite sets; equals the
/// Euclidean distance for singletons.
double hausdorff_distance(std::span<const Vector> x_set, std::span<const Vector> y_set);

/// Redundancy measurement for one problem instance: how far the aggregate
/// minimizer of any (n-f)-set can drift when up to f more agents are
/// removed. All minimizers here are unique (full-rank gate), so the set
/// distance collapses to a point distance.
struct RedundancyReport {
  double epsilon = 0.0;
  AgentSet witness_superset;  // S attaining the max
  AgentSet witness_subset;    // S-hat attaining the max
  std::map<AgentSet, double> per_superset;  // eps_S for every |S| = n-f
  std::map<AgentSet, Vector> minimizers;    // x_T for every enumerated subset
  CurvatureCoefficients curvature{};        // mu over all agents, min gamma over (n-f)-sets
};

struct RedundancyOptions {
  // The enumeration costs C(n,f) * sum_{k<=f} C(n-f,k) minimizer solves;
  // refuse to start above this size unless force is set.
  int max_agents = 20;
  bool force = false;
};

/// Enumerates every S with |S| = n-f and every S-hat subseteq S with
/// |S-hat| >= n-2f, and returns epsilon = max ||x_S - x_Shat|| with the
/// lexicographically smallest witness pair on ties. Minimizers are memoized
/// per subset (keyed by the sorted id list) and returned in the report.
/// Throws RankDeficiencyError if any enumerated subset lacks a unique
/// minimizer, and std::invalid_argument unless n > 2f >= 0.
RedundancyReport measure_redundancy(std::span<const QuadraticCost> costs, int f,
                                    const RedundancyOptions& options = {});

/// epsilon restricted to one superset: max over S-hat subseteq base with
/// |S-hat| >= |base| - f of ||x_base - x_Shat||. This is the quantity the
/// resilience guarantee compares against when base is an honest set.
double superset_epsilon(std::span<const QuadraticCost> costs, const AgentSet& base, int f);

}  // namespace bftopt
