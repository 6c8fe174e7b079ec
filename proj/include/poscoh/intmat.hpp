#pragma once

// Exact integer matrices plus the two lattice engines everything else sits on:
// a dense Smith normal form (with transform tracking) for presentation
// normalization, and a sparse row-Hermite reduction for kernels and linear
// solves over row lattices.  All arithmetic is arbitrary precision.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace poscoh {

using Int = boost::multiprecision::cpp_int;

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(
      std::initializer_list<std::initializer_list<long long>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    IntMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw ShapeError("ragged row list");
      std::size_t j = 0;
      for (long long v : row) m.at(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<Int> row(std::size_t i) const {
    return std::vector<Int>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
  }

  void set_row(std::size_t i, const std::vector<Int>& v) {
    if (v.size() != cols_) throw ShapeError("set_row: width mismatch");
    std::copy(v.begin(), v.end(), a_.begin() + i * cols_);
  }

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  IntMatrix operator*(const IntMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw ShapeError("matrix product: inner dims differ");
    IntMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Int& x = at(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < rhs.cols_; ++j) {
          const Int& y = rhs.at(k, j);
          if (y != 0) out.at(i, j) += x * y;
        }
      }
    return out;
  }

  IntMatrix operator+(const IntMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
      throw ShapeError("matrix sum: shape mismatch");
    IntMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + rhs.a_[i];
    return out;
  }

  IntMatrix operator-(const IntMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
      throw ShapeError("matrix difference: shape mismatch");
    IntMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - rhs.a_[i];
    return out;
  }

  IntMatrix operator-() const {
    IntMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = -a_[i];
    return out;
  }

  bool operator==(const IntMatrix& rhs) const {
    return rows_ == rhs.rows_ && cols_ == rhs.cols_ && a_ == rhs.a_;
  }
  bool operator!=(const IntMatrix& rhs) const { return !(*this == rhs); }

 private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

inline IntMatrix vstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.cols() && a.rows() != 0 && b.rows() != 0)
    throw ShapeError("vstack: width mismatch");
  std::size_t c = a.rows() == 0 ? b.cols() : a.cols();
  IntMatrix out(a.rows() + b.rows(), c);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(a.rows() + i, j) = b.at(i, j);
  return out;
}

// Quotient with balanced remainder: a - q*b in (-|b|/2, |b|/2].
inline Int balanced_quot(const Int& a, const Int& b) {
  Int q = a / b;  // truncated
  Int r = a - q * b;
  if (r != 0) {
    Int ab = abs(b);
    if (2 * abs(r) > ab) {
      if ((r < 0) == (b < 0))
        q += 1;
      else
        q -= 1;
    }
  }
  return q;
}

// u * m * v = d, u and v unimodular, d diagonal with d1 | d2 | ... >= 0.
struct SmithNormalForm {
  IntMatrix u, d, v, v_inv;
};

inline SmithNormalForm smith_normal_form(const IntMatrix& m) {
  std::size_t r = m.rows(), c = m.cols();
  IntMatrix a = m;
  IntMatrix u = IntMatrix::identity(r);
  IntMatrix v = IntMatrix::identity(c);
  IntMatrix vinv = IntMatrix::identity(c);

  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < c; ++k) std::swap(a.at(i, k), a.at(j, k));
    for (std::size_t k = 0; k < r; ++k) std::swap(u.at(i, k), u.at(j, k));
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < r; ++k) std::swap(a.at(k, i), a.at(k, j));
    for (std::size_t k = 0; k < c; ++k) std::swap(v.at(k, i), v.at(k, j));
    for (std::size_t k = 0; k < c; ++k) std::swap(vinv.at(i, k), vinv.at(j, k));
  };
  // row i -= q * row t
  auto row_sub = [&](std::size_t i, std::size_t t, const Int& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < c; ++k) a.at(i, k) -= q * a.at(t, k);
    for (std::size_t k = 0; k < r; ++k) u.at(i, k) -= q * u.at(t, k);
  };
  // col j -= q * col t;  v_inv row t += q * v_inv row j
  auto col_sub = [&](std::size_t j, std::size_t t, const Int& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < r; ++k) a.at(k, j) -= q * a.at(k, t);
    for (std::size_t k = 0; k < c; ++k) v.at(k, j) -= q * v.at(k, t);
    for (std::size_t k = 0; k < c; ++k) vinv.at(t, k) += q * vinv.at(j, k);
  };
  // col j += col t (used by the divisibility fixup)
  auto col_add = [&](std::size_t j, std::size_t t) {
    for (std::size_t k = 0; k < r; ++k) a.at(k, j) += a.at(k, t);
    for (std::size_t k = 0; k < c; ++k) v.at(k, j) += v.at(k, t);
    for (std::size_t k = 0; k < c; ++k) vinv.at(t, k) -= vinv.at(j, k);
  };

  std::size_t n = std::min(r, c);
  for (std::size_t t = 0; t < n; ++t) {
    // pivot: smallest nonzero magnitude in the remaining block
    std::size_t pi = t, pj = t;
    bool found = false;
    Int best;
    for (std::size_t i = t; i < r; ++i)
      for (std::size_t j = t; j < c; ++j) {
        const Int& x = a.at(i, j);
        if (x == 0) continue;
        Int ax = abs(x);
        if (!found || ax < best) {
          found = true;
          best = ax;
          pi = i;
          pj = j;
          if (best == 1) goto pivot_done;
        }
      }
  pivot_done:
    if (!found) break;
    row_swap(t, pi);
    col_swap(t, pj);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        if (a.at(i, t) == 0) continue;
        Int q = balanced_quot(a.at(i, t), a.at(t, t));
        row_sub(i, t, q);
        if (a.at(i, t) != 0) {
          row_swap(t, i);  // strictly smaller remainder becomes pivot
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        if (a.at(t, j) == 0) continue;
        Int q = balanced_quot(a.at(t, j), a.at(t, t));
        col_sub(j, t, q);
        if (a.at(t, j) != 0) {
          col_swap(t, j);
          clean = false;
        }
      }
      if (!clean) continue;
      // pivot divides every remaining entry?
      bool fixed = false;
      for (std::size_t i = t + 1; i < r && !fixed; ++i)
        for (std::size_t j = t + 1; j < c && !fixed; ++j)
          if (a.at(i, j) % a.at(t, t) != 0) {
            // pull the offending row into reach via a column op
            col_add(t, j);
            fixed = true;
          }
      if (!fixed) break;
    }
    if (a.at(t, t) < 0) {
      for (std::size_t k = t; k < c; ++k) a.at(t, k) = -a.at(t, k);
      for (std::size_t k = 0; k < r; ++k) u.at(t, k) = -u.at(t, k);
    }
  }
  return SmithNormalForm{std::move(u), std::move(a), std::move(v), std::move(vinv)};
}

// Divisibility-chain normalization of a multiset of moduli (> 0 entries),
// via pairwise gcd/lcm exchanges; 1s are dropped.
inline std::vector<Int> invariant_chain(std::vector<Int> moduli) {
  std::vector<Int> m;
  for (auto& x : moduli)
    if (x < 0)
      m.push_back(-x);
    else
      m.push_back(x);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = i + 1; j < m.size(); ++j) {
        if (m[i] == 0 || m[j] == 0) continue;
        if (m[j] % m[i] == 0) continue;
        Int g = gcd(m[i], m[j]);
        Int l = m[i] / g * m[j];
        m[i] = g;
        m[j] = l;
        changed = true;
      }
  }
  std::vector<Int> out;
  for (auto& x : m)
    if (x > 1) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

// Row-Hermite reduction of the lattice spanned by the rows of b.  Produces a
// unimodular transform h = u * b in echelon form; exposes the kernel
// {x : x b = 0} and a deterministic canonical solve of x b = target.
class LatticeSolver {
 public:
  explicit LatticeSolver(const IntMatrix& b) : nrows_(b.rows()), ncols_(b.cols()) {
    struct Work {
      std::vector<std::pair<int, Int>> a;  // sorted by column
      std::vector<std::pair<int, Int>> u;
    };
    std::vector<Work> pool(nrows_);
    for (std::size_t i = 0; i < nrows_; ++i) {
      for (std::size_t j = 0; j < ncols_; ++j)
        if (b.at(i, j) != 0) pool[i].a.emplace_back(int(j), b.at(i, j));
      pool[i].u.emplace_back(int(i), Int(1));
    }

    auto merge_sub = [](std::vector<std::pair<int, Int>>& x,
                        const std::vector<std::pair<int, Int>>& y, const Int& q) {
      // x -= q * y
      std::vector<std::pair<int, Int>> out;
      out.reserve(x.size() + y.size());
      std::size_t i = 0, j = 0;
      while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
          out.push_back(std::move(x[i++]));
        } else if (i == x.size() || y[j].first < x[i].first) {
          out.emplace_back(y[j].first, -q * y[j].second);
          ++j;
        } else {
          Int v = x[i].second - q * y[j].second;
          if (v != 0) out.emplace_back(x[i].first, std::move(v));
          ++i;
          ++j;
        }
      }
      x = std::move(out);
    };

    std::vector<std::vector<int>> bucket(ncols_ + 1);
    for (std::size_t i = 0; i < nrows_; ++i) {
      int lead = pool[i].a.empty() ? int(ncols_) : pool[i].a.front().first;
      bucket[lead].push_back(int(i));
    }

    for (std::size_t col = 0; col < ncols_; ++col) {
      auto& rows = bucket[col];
      while (rows.size() > 1) {
        // reduce everything against the row with the smallest lead magnitude
        std::size_t best = 0;
        for (std::size_t k = 1; k < rows.size(); ++k) {
          const Int& a = pool[rows[k]].a.front().second;
          const Int& b2 = pool[rows[best]].a.front().second;
          if (abs(a) < abs(b2) || (abs(a) == abs(b2) && rows[k] < rows[best]))
            best = k;
        }
        std::swap(rows[0], rows[best]);
        Work& piv = pool[rows[0]];
        std::vector<int> keep{rows[0]};
        for (std::size_t k = 1; k < rows.size(); ++k) {
          Work& w = pool[rows[k]];
          Int q = balanced_quot(w.a.front().second, piv.a.front().second);
          merge_sub(w.a, piv.a, q);
          merge_sub(w.u, piv.u, q);
          int lead = w.a.empty() ? int(ncols_) : w.a.front().first;
          if (lead == int(col))
            keep.push_back(rows[k]);
          else
            bucket[lead].push_back(rows[k]);
        }
        rows = std::move(keep);
      }
      if (!rows.empty()) {
        Work& piv = pool[rows[0]];
        if (piv.a.front().second < 0) {
          for (auto& e : piv.a) e.second = -e.second;
          for (auto& e : piv.u) e.second = -e.second;
        }
        pivot_col_.push_back(int(col));
        h_.push_back(std::move(piv.a));
        hu_.push_back(std::move(piv.u));
      }
    }
    for (int i : bucket[ncols_]) {
      std::vector<Int> dense(nrows_, Int(0));
      for (auto& e : pool[i].u) dense[e.first] = e.second;
      kernel_.push_back(std::move(dense));
    }
  }

  // Rows spanning {x in Z^rows(b) : x b = 0}.
  const std::vector<std::vector<Int>>& kernel() const { return kernel_; }

  std::size_t rank() const { return h_.size(); }

  // Deterministic solution of x b = target, if one exists.
  std::optional<std::vector<Int>> solve(const std::vector<Int>& target) const {
    if (target.size() != ncols_) throw ShapeError("solve: width mismatch");
    std::vector<Int> res = target;
    std::vector<Int> x(nrows_, Int(0));
    for (std::size_t i = 0; i < h_.size(); ++i) {
      int c = pivot_col_[i];
      if (res[c] == 0) continue;
      const Int& p = h_[i].front().second;
      if (res[c] % p != 0) return std::nullopt;
      Int q = res[c] / p;
      for (const auto& e : h_[i]) res[e.first] -= q * e.second;
      for (const auto& e : hu_[i]) x[e.first] += q * e.second;
    }
    for (const auto& v : res)
      if (v != 0) return std::nullopt;
    return x;
  }

 private:
  std::size_t nrows_, ncols_;
  std::vector<std::vector<std::pair<int, Int>>> h_, hu_;
  std::vector<int> pivot_col_;
  std::vector<std::vector<Int>> kernel_;
};

}  // namespace poscoh
