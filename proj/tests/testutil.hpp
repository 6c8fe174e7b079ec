#pragma once

// Shared helpers for the unit tests: seeded RNG, random integer matrices,
// small determinants, and an independent minor-gcd invariant-factor oracle.

#include "poscoh/intmat.hpp"

#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline std::uint64_t seed_from_env() {
  if (const char* s = std::getenv("POSCOH_SEED")) return std::stoull(s);
  return 20260823ull;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(seed_from_env());
  return gen;
}

inline poscoh::Int rand_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return poscoh::Int(d(rng()));
}

inline poscoh::IntMatrix random_matrix(std::size_t r, std::size_t c, int lo = -9,
                                       int hi = 9) {
  poscoh::IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rand_int(lo, hi);
  return m;
}

inline std::vector<poscoh::Int> random_vec(std::size_t n, int lo = -9, int hi = 9) {
  std::vector<poscoh::Int> v(n);
  for (auto& x : v) x = rand_int(lo, hi);
  return v;
}

// Laplace-expansion determinant; test-only, fine for tiny matrices.
inline poscoh::Int det(const poscoh::IntMatrix& m) {
  if (m.rows() != m.cols()) throw poscoh::ShapeError("det of non-square");
  std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m.at(0, 0);
  poscoh::Int acc = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m.at(0, j) == 0) continue;
    poscoh::IntMatrix sub(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        sub.at(i - 1, cc++) = m.at(i, k);
      }
    }
    poscoh::Int term = m.at(0, j) * det(sub);
    if (j % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

// Advance idx to the next k-combination of {0..n-1}; false when exhausted.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  std::size_t k = idx.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (idx[i] + (k - i) < n) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// gcd of all k-by-k minors; zero when every minor vanishes.
inline poscoh::Int minor_gcd(const poscoh::IntMatrix& m, std::size_t k) {
  if (k == 0) return 1;
  if (k > m.rows() || k > m.cols()) return 0;
  poscoh::Int g = 0;
  std::vector<std::size_t> rows(k), cols(k);
  for (std::size_t i = 0; i < k; ++i) rows[i] = i;
  do {
    for (std::size_t i = 0; i < k; ++i) cols[i] = i;
    do {
      poscoh::IntMatrix sub(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub.at(i, j) = m.at(rows[i], cols[j]);
      g = boost::multiprecision::gcd(g, det(sub));
    } while (next_combination(cols, m.cols()));
  } while (next_combination(rows, m.rows()));
  return g;
}

// Invariant factors d1 | d2 | ... via ratios of minor gcds, ones included.
inline std::vector<poscoh::Int> minor_invariant_factors(const poscoh::IntMatrix& m) {
  std::vector<poscoh::Int> out;
  poscoh::Int prev = 1;
  for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
    poscoh::Int g = minor_gcd(m, k);
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

}  // namespace testutil
