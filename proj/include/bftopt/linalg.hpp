#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace bftopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted list of 1-based agent ids identifying a subset of agents.
using AgentSet = std::vector<int>;

/// Thrown when a stacked design matrix is numerically rank-deficient and the
/// requested operation needs a unique minimizer.
class RankDeficiencyError : public std::runtime_error {
 public:
  explicit RankDeficiencyError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": entries must be finite");
  }
}

inline void require_dimension(const Vector& v, Eigen::Index d, const char* what) {
  if (v.size() != d) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(v.size()) + ", expected " + std::to_string(d) +
                                ")");
  }
}

/// Mixed absolute/relative comparison; tol applies to both scales.
inline bool approx_equal(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline bool approx_equal(const Vector& a, const Vector& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  return (a - b).norm() <= tol * (1.0 + std::max(a.norm(), b.norm()));
}

/// Invokes fn(AgentSet) for every k-element subset of pool, in lexicographic
/// order of the id lists. pool must be sorted ascending.
template <typename Fn>
void for_each_subset(const AgentSet& pool, int k, Fn&& fn) {
  const int n = static_cast<int>(pool.size());
  if (k < 0 || k > n) return;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    AgentSet subset(k);
    for (int i = 0; i < k; ++i) subset[i] = pool[pick[i]];
    fn(subset);
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

inline AgentSet full_agent_set(int n) {
  AgentSet ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i + 1;
  return ids;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace bftopt
