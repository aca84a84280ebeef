#pragma once

#include <filesystem>

#include "bftopt/costmodel.hpp"

namespace bftopt {

/// Thrown for unreadable or malformed dataset files; carries the 1-based
/// line number when one is known.
class DatasetError : public std::runtime_error {
 public:
  explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

struct DatasetOptions {
  bool header = false;  // skip the first line
};

/// Reads one agent per row from a CSV with columns a_1,...,a_d,b. Every row
/// must have the same column count and d >= 1.
std::vector<QuadraticCost> load_dataset(const std::filesystem::path& path,
                                        const DatasetOptions& options = {});

/// Writes the same CSV layout with 17 significant digits, enough for doubles
/// to round-trip exactly.
void save_dataset(const std::filesystem::path& path, std::span<const QuadraticCost> costs);

struct SyntheticDataset {
  std::vector<QuadraticCost> costs;
  Vector ground_truth;  // the x* used to generate responses
};

/// Regression instance with rows on the unit sphere and responses
/// b = a . x* + noise, noise ~ N(0, noise_std) from a seeded deterministic
/// stream. For d = 2 the rows sit at evenly spaced half-circle angles
/// k*pi/n, the same design family as the bundled 6-agent dataset; for other
/// d they are seeded random unit vectors. x* is the all-ones vector.
/// Requires n > d.
SyntheticDataset generate_synthetic(int n, int d, double noise_std, std::uint64_t seed);

}  // namespace bftopt
