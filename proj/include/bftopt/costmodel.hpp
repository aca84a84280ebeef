#pragma once

#include <span>
#include <vector>

#include "bftopt/linalg.hpp"

namespace bftopt {

/// A differentiable local cost Q_i : R^d -> R.
class CostFunction {
 public:
  virtual ~CostFunction() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual int dimension() const = 0;
};

/// Scalar-response regression cost Q_i(x) = (b_i - a_i . x)^2.
///
/// The row a_i must be finite with at least one nonzero entry; the Hessian is
/// the constant rank-one matrix 2 a_i a_i^T.
class QuadraticCost final : public CostFunction {
 public:
  QuadraticCost(Vector row, double response);

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;  // -2 a_i (b_i - a_i . x)
  int dimension() const override { return static_cast<int>(row_.size()); }

  const Vector& row() const { return row_; }
  double response() const { return response_; }

 private:
  Vector row_;
  double response_;
};

/// Smoothness / strong-convexity pair for a set of costs. Values follow the
/// Hessian-consistent convention: the Hessian of (b - a.x)^2 is 2 a a^T, so
/// both coefficients carry the factor 2. Ratios such as mu/gamma are
/// identical under either convention.
struct CurvatureCoefficients {
  double mu;     // max_i 2 * lambda_max(a_i a_i^T) over the set
  double gamma;  // (2/|S|) * lambda_min(A_S^T A_S)
};

struct StrongConvexityResult {
  double gamma = 0.0;
  bool strongly_convex = false;  // false iff A_S is rank-deficient
};

/// Unique least-squares minimizer of sum_i (b_i - a_i . x)^2 over the given
/// costs. Normal equations for d <= 8, column-pivoted QR above. Throws
/// RankDeficiencyError when the stacked rows are numerically rank-deficient
/// (smallest singular value <= 1e-10 times the largest).
Vector aggregate_minimizer(std::span<const QuadraticCost> costs);

/// Same, restricted to the 1-based ids in subset.
Vector aggregate_minimizer(std::span<const QuadraticCost> costs, const AgentSet& subset);

/// 2 * largest eigenvalue of a_i^T a_i, i.e. 2 ||a_i||^2.
double lipschitz_coefficient(const QuadraticCost& cost);

/// (2/|S|) * smallest eigenvalue of A_S^T A_S; strongly_convex is false (and
/// gamma 0) when A_S does not have full column rank.
StrongConvexityResult strong_convexity_coefficient(std::span<const QuadraticCost> costs);
StrongConvexityResult strong_convexity_coefficient(std::span<const QuadraticCost> costs,
                                                   const AgentSet& subset);

/// mu = max lipschitz_coefficient over the subset, gamma for the subset's
/// aggregate. Throws RankDeficiencyError when gamma is undefined.
CurvatureCoefficients curvature_for_set(std::span<const QuadraticCost> costs,
                                        const AgentSet& subset);

/// Stacks rows/responses of the selected costs; subset ids are 1-based.
void stack_costs(std::span<const QuadraticCost> costs, const AgentSet& subset, Matrix& a_out,
                 Vector& b_out);

}  // namespace bftopt
