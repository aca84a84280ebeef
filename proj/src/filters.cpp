#include "bftopt/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bftopt {

namespace {

// Orders values ascending with NaN after every number, ties by index.
// Byzantine inputs may be NaN; pushing them last means CGE drops them
// whenever f > 0 and CWTM trims them with the top slice.
bool value_index_less(double a, int ia, double b, int ib) {
  const bool na = std::isnan(a);
  const bool nb = std::isnan(b);
  if (na != nb) return nb;
  if (!na && a != b) return a < b;
  return ia < ib;
}

}  // namespace

GradientBundle::GradientBundle(std::vector<Vector> gradients, int f)
    : gradients_(std::move(gradients)), f_(f) {
  if (gradients_.empty()) throw std::invalid_argument("GradientBundle: need at least one gradient");
  if (f_ < 0) throw std::invalid_argument("GradientBundle: f must be non-negative");
  const Eigen::Index d = gradients_.front().size();
  if (d == 0) throw std::invalid_argument("GradientBundle: zero-dimensional gradients");
  for (const auto& g : gradients_) {
    if (g.size() != d) throw std::invalid_argument("GradientBundle: gradients disagree on dimension");
  }
  if (2 * f_ >= n()) {
    throw std::invalid_argument("GradientBundle: requires 2f < n (got n=" + std::to_string(n()) +
                                ", f=" + std::to_string(f_) + ")");
  }
}

Vector filter_average(const GradientBundle& bundle) {
  Vector sum = Vector::Zero(bundle.dimension());
  for (const auto& g : bundle.gradients()) sum += g;
  return sum / static_cast<double>(bundle.n());
}

Vector filter_cge(const GradientBundle& bundle) {
  const auto& grads = bundle.gradients();
  const int n = bundle.n();
  const int f = bundle.f();

  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) norms[i] = grads[i].norm();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return value_index_less(norms[a], a, norms[b], b); });

  // Sum in ascending-norm order: the n-f smallest-norm gradients, smallest
  // first.
  Vector sum = Vector::Zero(bundle.dimension());
  for (int j = 0; j < n - f; ++j) sum += grads[order[j]];
  return sum;
}

Vector filter_cwtm(const GradientBundle& bundle) {
  const auto& grads = bundle.gradients();
  const int n = bundle.n();
  const int f = bundle.f();
  const int d = bundle.dimension();

  Vector out(d);
  std::vector<int> order(n);
  for (int k = 0; k < d; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return value_index_less(grads[a](k), a, grads[b](k), b);
    });
    double sum = 0.0;
    for (int j = f; j < n - f; ++j) sum += grads[order[j]](k);
    out(k) = sum / static_cast<double>(n - 2 * f);
  }
  return out;
}

FilterKind filter_from_name(std::string_view name) {
  if (name == "average") return FilterKind::average;
  if (name == "cge") return FilterKind::cge;
  if (name == "cwtm") return FilterKind::cwtm;
  throw std::invalid_argument("unknown filter '" + std::string(name) +
                              "' (expected average|cge|cwtm)");
}

std::string filter_name(FilterKind kind) {
  switch (kind) {
    case FilterKind::average: return "average";
    case FilterKind::cge: return "cge";
    case FilterKind::cwtm: return "cwtm";
  }
  throw std::logic_error("unreachable filter kind");
}

Vector apply_filter(FilterKind kind, const GradientBundle& bundle) {
  switch (kind) {
    case FilterKind::average: return filter_average(bundle);
    case FilterKind::cge: return filter_cge(bundle);
    case FilterKind::cwtm: return filter_cwtm(bundle);
  }
  throw std::logic_error("unreachable filter kind");
}

}  // namespace bftopt
