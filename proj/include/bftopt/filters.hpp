#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bftopt/linalg.hpp"

namespace bftopt {

/// The n gradients received by the server in one round, plus the fault
/// budget f the filters should defend against.
///
/// Entries may contain NaN/Inf: Byzantine agents send arbitrary values and
/// the filters must cope rather than crash. Construction enforces n >= 1,
/// a shared dimension, and 2f < n.
class GradientBundle {
 public:
  GradientBundle(std::vector<Vector> gradients, int f);

  int n() const { return static_cast<int>(gradients_.size()); }
  int f() const { return f_; }
  int dimension() const { return static_cast<int>(gradients_.front().size()); }
  const std::vector<Vector>& gradients() const { return gradients_; }

 private:
  std::vector<Vector> gradients_;
  int f_;
};

/// Coordinate-wise arithmetic mean of all n gradients.
Vector filter_average(const GradientBundle& bundle);

/// Comparative gradient elimination: the vector sum of the n-f gradients of
/// smallest Euclidean norm. Ties and NaN norms are ordered by ascending
/// agent id, NaN last, so the result is deterministic. Note this is a sum,
/// not a mean -- the step size absorbs the scale, but the effective learning
/// rate differs from CWTM's by roughly a factor n-f.
Vector filter_cge(const GradientBundle& bundle);

/// Coordinate-wise trimmed mean: per coordinate, drop the f smallest and f
/// largest values (ties by agent id, NaN last) and average the middle n-2f.
Vector filter_cwtm(const GradientBundle& bundle);

enum class FilterKind { average, cge, cwtm };

FilterKind filter_from_name(std::string_view name);  // "average" | "cge" | "cwtm"
std::string filter_name(FilterKind kind);
Vector apply_filter(FilterKind kind, const GradientBundle& bundle);

}  // namespace bftopt
