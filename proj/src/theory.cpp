#include "bftopt/theory.hpp"

#include <cmath>

namespace bftopt {

namespace {

void check_coefficients(double mu, double gamma) {
  if (!(gamma > 0.0) || !(mu > 0.0) || !std::isfinite(mu) || !std::isfinite(gamma)) {
    throw std::invalid_argument("curvature coefficients must be positive and finite");
  }
  if (gamma > mu) {
    throw std::invalid_argument("gamma <= mu must hold for a smooth strongly convex aggregate");
  }
}

// Van der Corput radical inverse; bases are the first primes per dimension.
double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double factor = inv;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % static_cast<std::uint64_t>(base)) * factor;
    index /= static_cast<std::uint64_t>(base);
    factor *= inv;
  }
  return result;
}

constexpr int kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

}  // namespace

CgeBound cge_bound(int n, int f, double mu, double gamma, double epsilon) {
  if (f < 0 || n <= 2 * f) throw std::invalid_argument("cge_bound: requires n > 2f >= 0");
  if (epsilon < 0.0) throw std::invalid_argument("cge_bound: epsilon must be non-negative");
  check_coefficients(mu, gamma);

  CgeBound result;
  result.n = n;
  result.f = f;
  result.mu = mu;
  result.gamma = gamma;
  result.epsilon = epsilon;
  result.alpha = 1.0 - (static_cast<double>(f) / n) * (1.0 + 2.0 * mu / gamma);
  if (result.alpha > 0.0) {
    result.amplification = 4.0 * mu * f / (result.alpha * gamma);
    result.distance_bound = *result.amplification * epsilon;
  }
  return result;
}

CwtmBound cwtm_bound(int d, int n, double mu, double gamma, double lambda, double epsilon) {
  if (d < 1 || n < 1) throw std::invalid_argument("cwtm_bound: requires d >= 1, n >= 1");
  if (lambda < 0.0 || epsilon < 0.0) {
    throw std::invalid_argument("cwtm_bound: lambda and epsilon must be non-negative");
  }
  check_coefficients(mu, gamma);

  CwtmBound result;
  result.d = d;
  result.n = n;
  result.mu = mu;
  result.gamma = gamma;
  result.lambda = lambda;
  result.epsilon = epsilon;
  result.lambda_threshold = gamma / (mu * std::sqrt(static_cast<double>(d)));
  if (lambda < result.lambda_threshold) {
    const double root_d = std::sqrt(static_cast<double>(d));
    result.amplification = 2.0 * root_d * n * mu * lambda / (gamma - root_d * mu * lambda);
    result.distance_bound = *result.amplification * epsilon;
  }
  return result;
}

double estimate_lambda(std::span<const QuadraticCost> costs, const BoxRegion& region,
                       int samples, std::uint64_t seed) {
  if (costs.size() < 2) throw std::invalid_argument("estimate_lambda: need at least two costs");
  if (samples < 1) throw std::invalid_argument("estimate_lambda: need at least one sample");
  const int d = region.dimension();
  for (const auto& c : costs) {
    if (c.dimension() != d) throw std::invalid_argument("estimate_lambda: dimension mismatch");
  }
  if (d > static_cast<int>(std::size(kHaltonPrimes))) {
    throw std::invalid_argument("estimate_lambda: dimension too large for the Halton bases");
  }

  constexpr double kNormFloor = 1e-12;
  double best = 0.0;
  auto consider = [&](const Vector& x) {
    std::vector<Vector> grads(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) grads[i] = costs[i].gradient(x);
    for (std::size_t i = 0; i < costs.size(); ++i) {
      for (std::size_t j = i + 1; j < costs.size(); ++j) {
        const double scale = std::max(grads[i].norm(), grads[j].norm());
        if (scale < kNormFloor) continue;  // both gradients vanish here
        best = std::max(best, (grads[i] - grads[j]).norm() / scale);
      }
    }
  };

  // Halton points, offset deterministically by the seed.
  const std::uint64_t offset = splitmix64(seed) % 100000;
  Vector x(d);
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < d; ++k) {
      const double u = radical_inverse(offset + 1 + static_cast<std::uint64_t>(s), kHaltonPrimes[k]);
      x(k) = region.lower(k) + u * (region.upper(k) - region.lower(k));
    }
    consider(x);
  }

  // Corners of W; the sup of a ratio of piecewise-linear gradient norms
  // often sits on the boundary. Skipped above ~20 dims (2^d corners).
  if (d <= 20) {
    for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
      for (int k = 0; k < d; ++k) {
        x(k) = (mask >> k) & 1 ? region.upper(k) : region.lower(k);
      }
      consider(x);
    }
  }
  return best;
}

NecessityScenario necessity_scenario(double epsilon, double delta) {
  if (epsilon < 0.0) throw std::invalid_argument("necessity_scenario: epsilon must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("necessity_scenario: delta must be > 0");

  // Scalar instance with n = 3, f = 1. Unit rows, so each cost (b - x)^2
  // minimizes at b and any pair's aggregate minimizes at the midpoint.
  //   agent 1: b = 0
  //   agent 2: b = 2(eps + delta)   -> {1,2} minimizes at  eps + delta
  //   agent 3: b = -2(eps + delta)  -> {1,3} minimizes at -(eps + delta)
  // Labeling A says {1,2} are honest; labeling B says {1,3} are. The server
  // sees the same three costs either way, and the honest minimizers are
  // separated by exactly 2*eps + 2*delta.
  const double spread = 2.0 * (epsilon + delta);
  const Vector unit = Vector::Constant(1, 1.0);
  std::vector<QuadraticCost> submitted;
  submitted.emplace_back(unit, 0.0);
  submitted.emplace_back(unit, spread);
  submitted.emplace_back(unit, -spread);

  NecessityScenario scenario{SubmittedCosts(submitted, 1), SubmittedCosts(submitted, 1),
                             {1, 2},   {1, 3},
                             spread / 2.0, -spread / 2.0};
  return scenario;
}

}  // namespace bftopt
