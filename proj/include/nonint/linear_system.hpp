#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "nonint/field_tower.hpp"
#include "nonint/rational_function.hpp"

namespace nonint {

using Matrix = std::vector<std::vector<FieldElement>>;

/// Rank by exact Gaussian elimination.
inline std::size_t rank(Matrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && m[pivot][c].is_zero()) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[r]);
    const FieldElement inv = m[r][c].inverse();
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c].is_zero()) continue;
      const FieldElement factor = m[i][c] * inv;
      for (std::size_t k = c; k < cols; ++k) m[i][k] -= factor * m[r][k];
    }
    ++r;
  }
  return r;
}

/// Dimension of { c : sum_k c_k images[k] == 0 } for rational functions images[k].
inline std::size_t kernel_dimension(const std::vector<RatFunc>& images) {
  if (images.empty()) return 0;
  Poly common(FieldElement(1));
  for (const auto& f : images) {
    const Poly& d = f.denominator();
    common = common * (d / gcd(common, d));
  }
  std::vector<Poly> numerators;
  int top = -1;
  for (const auto& f : images) {
    numerators.push_back(f.numerator() * (common / f.denominator()));
    top = std::max(top, numerators.back().degree());
  }
  if (top < 0) return images.size();
  Matrix m(static_cast<std::size_t>(top) + 1, std::vector<FieldElement>(images.size()));
  for (std::size_t k = 0; k < numerators.size(); ++k) {
    for (int j = 0; j <= numerators[k].degree(); ++j) {
      m[static_cast<std::size_t>(j)][k] = numerators[k].coefficient(static_cast<std::size_t>(j));
    }
  }
  return images.size() - rank(std::move(m));
}

}  // namespace nonint
