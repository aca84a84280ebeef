#include "bftopt/costmodel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace bftopt {

namespace {

constexpr double kRankTolerance = 1e-10;  // relative to the largest singular value

void check_subset(std::span<const QuadraticCost> costs, const AgentSet& subset) {
  int prev = 0;
  for (int id : subset) {
    if (id <= prev) throw std::invalid_argument("subset ids must be sorted ascending and unique");
    if (id > static_cast<int>(costs.size())) {
      throw std::invalid_argument("subset id " + std::to_string(id) + " out of range");
    }
    prev = id;
  }
}

int common_dimension(std::span<const QuadraticCost> costs) {
  if (costs.empty()) throw std::invalid_argument("empty cost list");
  const int d = costs.front().dimension();
  for (const auto& c : costs) {
    if (c.dimension() != d) throw std::invalid_argument("costs disagree on dimension");
  }
  return d;
}

bool full_column_rank(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() < a.cols()) return false;
  return sv(sv.size() - 1) > kRankTolerance * sv(0);
}

}  // namespace

QuadraticCost::QuadraticCost(Vector row, double response)
    : row_(std::move(row)), response_(response) {
  require_finite(row_, "QuadraticCost row");
  if (!std::isfinite(response_)) throw std::invalid_argument("QuadraticCost response must be finite");
  if (row_.size() == 0 || row_.isZero(0.0)) {
    throw std::invalid_argument("QuadraticCost row needs at least one nonzero entry");
  }
}

double QuadraticCost::value(const Vector& x) const {
  require_dimension(x, row_.size(), "QuadraticCost::value");
  const double residual = response_ - row_.dot(x);
  return residual * residual;
}

Vector QuadraticCost::gradient(const Vector& x) const {
  require_dimension(x, row_.size(), "QuadraticCost::gradient");
  const double residual = response_ - row_.dot(x);
  return -2.0 * residual * row_;
}

void stack_costs(std::span<const QuadraticCost> costs, const AgentSet& subset, Matrix& a_out,
                 Vector& b_out) {
  check_subset(costs, subset);
  if (subset.empty()) throw std::invalid_argument("empty subset");
  const int d = costs[subset.front() - 1].dimension();
  a_out.resize(static_cast<Eigen::Index>(subset.size()), d);
  b_out.resize(static_cast<Eigen::Index>(subset.size()));
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const auto& c = costs[subset[r] - 1];
    if (c.dimension() != d) throw std::invalid_argument("costs disagree on dimension");
    a_out.row(static_cast<Eigen::Index>(r)) = c.row().transpose();
    b_out(static_cast<Eigen::Index>(r)) = c.response();
  }
}

Vector aggregate_minimizer(std::span<const QuadraticCost> costs) {
  return aggregate_minimizer(costs, full_agent_set(static_cast<int>(costs.size())));
}

Vector aggregate_minimizer(std::span<const QuadraticCost> costs, const AgentSet& subset) {
  Matrix a;
  Vector b;
  stack_costs(costs, subset, a, b);
  if (!full_column_rank(a)) {
    throw RankDeficiencyError("non-unique minimizer: stacked rows are rank-deficient");
  }
  if (a.cols() <= 8) {
    // Normal equations; A^T A is well conditioned at these sizes given the
    // rank gate above.
    return (a.transpose() * a).ldlt().solve(a.transpose() * b);
  }
  return a.colPivHouseholderQr().solve(b);
}

double lipschitz_coefficient(const QuadraticCost& cost) {
  // a a^T is rank one, so its only nonzero eigenvalue is ||a||^2.
  return 2.0 * cost.row().squaredNorm();
}

StrongConvexityResult strong_convexity_coefficient(std::span<const QuadraticCost> costs) {
  return strong_convexity_coefficient(costs, full_agent_set(static_cast<int>(costs.size())));
}

StrongConvexityResult strong_convexity_coefficient(std::span<const QuadraticCost> costs,
                                                   const AgentSet& subset) {
  Matrix a;
  Vector b;
  stack_costs(costs, subset, a, b);
  if (!full_column_rank(a)) return {0.0, false};
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a);
  const double lambda_min = eig.eigenvalues()(0);
  return {2.0 * lambda_min / static_cast<double>(subset.size()), true};
}

CurvatureCoefficients curvature_for_set(std::span<const QuadraticCost> costs,
                                        const AgentSet& subset) {
  check_subset(costs, subset);
  common_dimension(costs);
  const auto sc = strong_convexity_coefficient(costs, subset);
  if (!sc.strongly_convex) {
    throw RankDeficiencyError("set is not strongly convex: rank-deficient rows");
  }
  double mu = 0.0;
  for (int id : subset) mu = std::max(mu, lipschitz_coefficient(costs[id - 1]));
  return {mu, sc.gamma};
}

}  // namespace bftopt
