#pragma once

#include <vector>

#include "bftopt/dataset.hpp"
#include "bftopt/rng.hpp"

namespace testsupport {

inline std::vector<bftopt::QuadraticCost> regression6() {
  return bftopt::load_dataset(BFTOPT_DATA_DIR "/regression6.csv");
}

inline bftopt::Vector random_vector(bftopt::CounterRng& rng, int d, double scale = 1.0) {
  bftopt::Vector v(d);
  for (int k = 0; k < d; ++k) v(k) = rng.next_gaussian(0.0, scale);
  return v;
}

/// Random full-rank regression instance: unit-ish rows plus noise so every
/// large-enough subset stays well conditioned.
inline std::vector<bftopt::QuadraticCost> random_instance(bftopt::CounterRng& rng, int n, int d,
                                                          double noise_std) {
  std::vector<bftopt::QuadraticCost> costs;
  const bftopt::Vector truth = bftopt::Vector::Ones(d);
  for (int i = 0; i < n; ++i) {
    bftopt::Vector row;
    do {
      row = random_vector(rng, d);
    } while (row.norm() < 0.3);
    const double response = row.dot(truth) + rng.next_gaussian(0.0, noise_std);
    costs.emplace_back(row, response);
  }
  return costs;
}

}  // namespace testsupport
