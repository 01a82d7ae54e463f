#pragma once

#include <cstddef>
#include <vector>

namespace rafs {

// Diagonal regularization matrix Gamma over the flattened parameter vector
// (weights and biases). Entries are non-negative.
struct RegMatrix {
  std::vector<double> diagonal;

  std::size_t size() const { return diagonal.size(); }

  static RegMatrix zeros(std::size_t n) { return RegMatrix{std::vector<double>(n, 0.0)}; }
  static RegMatrix constant(std::size_t n, double value) {
    return RegMatrix{std::vector<double>(n, value)};
  }
};

}  // namespace rafs
