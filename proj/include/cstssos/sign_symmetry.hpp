#ifndef CSTSSOS_SIGN_SYMMETRY_HPP
#define CSTSSOS_SIGN_SYMMETRY_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cstssos/exponent.hpp"

namespace cstssos {

using BitVector = std::vector<std::uint8_t>;

namespace gf2 {

/// In-place reduced row echelon form over GF(2); returns pivot columns.
inline std::vector<std::size_t> rref(std::vector<BitVector>& rows, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && !rows[p][c]) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && rows[i][c])
        for (std::size_t k = c; k < ncols; ++k) rows[i][k] ^= rows[r][k];
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

inline bool dot(std::span<const std::uint8_t> r, const Exponent& a) {
  unsigned s = 0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r[i] * (a[i] & 1u);
  return s & 1u;
}

}  // namespace gf2

/// Basis of the sign symmetries of a support set, i.e. of (A)_2^perp, in
/// reduced row echelon form.
struct SignSymmetryBasis {
  std::size_t n = 0;
  std::vector<BitVector> vectors;

  /// R^T alpha == 0 (mod 2).
  bool respects(const Exponent& a) const {
    for (const auto& r : vectors)
      if (gf2::dot(r, a)) return false;
    return true;
  }
};

inline SignSymmetryBasis sign_symmetries(std::size_t n, std::span<const Exponent> support) {
  std::vector<BitVector> rows;
  rows.reserve(support.size());
  for (const auto& a : support) {
    BitVector r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = a[i] & 1u;
    rows.push_back(std::move(r));
  }
  const auto pivots = gf2::rref(rows, n);
  std::vector<bool> is_pivot(n, false);
  for (auto p : pivots) is_pivot[p] = true;

  std::vector<BitVector> null;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    BitVector v(n, 0);
    v[f] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k)
      if (rows[k][f]) v[pivots[k]] = 1;
    null.push_back(std::move(v));
  }
  gf2::rref(null, n);
  return {n, std::move(null)};
}

}  // namespace cstssos

#endif  // CSTSSOS_SIGN_SYMMETRY_HPP
