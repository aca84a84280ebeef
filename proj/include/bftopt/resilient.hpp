#pragma once

#include <map>
#include <span>

#include "bftopt/costmodel.hpp"

namespace bftopt {

/// The cost functions as received by the server. Honest agents send their
/// true quadratic; faulty agents may send any quadratic they like. The
/// server cannot tell which is which.
struct SubmittedCosts {
  std::vector<QuadraticCost> costs;
  int f = 0;

  SubmittedCosts(std::vector<QuadraticCost> submitted, int fault_budget);
  int n() const { return static_cast<int>(costs.size()); }
};

struct ResilientSolution {
  Vector x_hat;           // minimizer of the winning candidate set
  AgentSet chosen_set;    // the candidate set S with the smallest r_S
  std::map<AgentSet, double> r_values;  // r_T for every candidate |T| = n-f
};

struct ResilientOptions {
  int max_agents = 20;  // exhaustive: C(n, f) * C(n-f, f) minimizer solves
  bool force = false;
};

/// Exhaustive resilient aggregation.
///
/// For each candidate set T with |T| = n-f, computes x_T and
/// r_T = max over T-hat subset T, |T-hat| = n-2f of ||x_T - x_That||,
/// then outputs x_S for the T minimizing r_T (ties: lexicographically
/// smallest id list). Note |T-hat| is exactly n-2f here, unlike the
/// redundancy measurement which sweeps every size >= n-2f; the two
/// procedures are intentionally different.
///
/// If the honest costs have (2f, eps)-redundancy, the output is within
/// 2*eps of every honest (n-f)-set's minimizer, whatever the faulty agents
/// submitted; with eps = 0 the honest minimizer is recovered exactly.
ResilientSolution resilient_solve(const SubmittedCosts& submitted,
                                  const ResilientOptions& options = {});

}  // namespace bftopt
