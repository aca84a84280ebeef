#pragma once

#include <optional>

#include "bftopt/resilient.hpp"
#include "bftopt/simengine.hpp"

namespace bftopt {

/// Asymptotic resilience bound for the CGE filter. The filter is covered by
/// the sufficient condition only when alpha > 0; the margin depends on f/n
/// and the conditioning ratio mu/gamma (which is convention-free).
struct CgeBound {
  int n = 0;
  int f = 0;
  double mu = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;

  double alpha = 0.0;                     // 1 - (f/n)(1 + 2 mu/gamma)
  std::optional<double> amplification;    // D = 4 mu f / (alpha gamma), iff alpha > 0
  std::optional<double> distance_bound;   // D * epsilon

  bool applicable() const { return amplification.has_value(); }
};

CgeBound cge_bound(int n, int f, double mu, double gamma, double epsilon);

/// Asymptotic resilience bound for the CWTM filter; applicable only when
/// the gradient-dissimilarity coefficient satisfies lambda < gamma/(mu sqrt(d)).
struct CwtmBound {
  int d = 0;
  int n = 0;
  double mu = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;

  double lambda_threshold = 0.0;          // gamma / (mu sqrt(d))
  std::optional<double> amplification;    // D' = 2 sqrt(d) n mu lambda / (gamma - sqrt(d) mu lambda)
  std::optional<double> distance_bound;   // D' * epsilon

  bool applicable() const { return amplification.has_value(); }
};

CwtmBound cwtm_bound(int d, int n, double mu, double gamma, double lambda, double epsilon);

/// Empirical lower bound on the gradient-dissimilarity coefficient: the max
/// of ||grad Q_i(x) - grad Q_j(x)|| / max(||grad Q_i(x)||, ||grad Q_j(x)||)
/// over honest pairs at sampled points (low-discrepancy Halton points plus
/// the box corners). Sampling cannot certify the true sup over W, so treat
/// the result as a lower bound; it never exceeds 2 (triangle inequality).
double estimate_lambda(std::span<const QuadraticCost> costs, const BoxRegion& region,
                       int samples = 10000, std::uint64_t seed = 0);

/// Indistinguishable pair of executions showing that (f, epsilon)-resilience
/// needs (2f, epsilon)-redundancy: the two scenarios submit byte-identical
/// scalar costs but disagree on which agents are honest, and the two honest
/// minimizers sit exactly 2*epsilon + 2*delta apart. Any deterministic
/// output is therefore at least epsilon + delta away from one of them.
struct NecessityScenario {
  SubmittedCosts scenario_a;  // identical submissions ...
  SubmittedCosts scenario_b;  // ... as seen by the server
  AgentSet honest_a;
  AgentSet honest_b;
  double x_s = 0.0;   // honest minimizer under labeling A
  double x_bs = 0.0;  // honest minimizer under labeling B
};

NecessityScenario necessity_scenario(double epsilon, double delta);

}  // namespace bftopt
