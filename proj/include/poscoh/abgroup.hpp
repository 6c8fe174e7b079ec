#pragma once

// Finitely generated abelian groups presented by integer relation matrices,
// their elements in canonical form, homomorphisms with exact kernels,
// cokernels and image-membership certificates.

#include "poscoh/intmat.hpp"

#include <cassert>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace poscoh {

struct NotWellDefined : std::invalid_argument {
  std::size_t relation_index;
  NotWellDefined(const std::string& what, std::size_t idx)
      : std::invalid_argument(what), relation_index(idx) {}
};

class GroupElement;
class GroupHom;

// Z^n modulo the row lattice of `relations`.  Copies share state; elements
// are only composable when they reference the same presentation.
class FgAbelianGroup {
 public:
  FgAbelianGroup() : FgAbelianGroup(0, IntMatrix(0, 0)) {}

  FgAbelianGroup(std::size_t ngens, IntMatrix relations) {
    if (relations.rows() > 0 && relations.cols() != ngens)
      throw ShapeError("relations width must equal generator count");
    auto d = std::make_shared<Data>();
    d->ngens = ngens;
    d->relations = std::move(relations);
    if (d->relations.cols() != ngens) d->relations = IntMatrix(0, ngens);

    // Fast path: every relation row touches at most one generator.  All the
    // big direct-sum groups in the complexes land here.
    bool diag = true;
    for (std::size_t i = 0; i < d->relations.rows() && diag; ++i) {
      int nz = 0;
      for (std::size_t j = 0; j < ngens; ++j)
        if (d->relations.at(i, j) != 0) ++nz;
      if (nz > 1) diag = false;
    }
    d->diagonal = diag;
    if (diag) {
      d->moduli.assign(ngens, Int(0));
      for (std::size_t i = 0; i < d->relations.rows(); ++i)
        for (std::size_t j = 0; j < ngens; ++j) {
          const Int& v = d->relations.at(i, j);
          if (v != 0) d->moduli[j] = gcd(d->moduli[j], abs(v));
        }
    } else {
      d->snf = smith_normal_form(d->relations);
      d->moduli.assign(ngens, Int(0));
      std::size_t k = std::min(d->relations.rows(), ngens);
      for (std::size_t i = 0; i < k; ++i) d->moduli[i] = d->snf.d.at(i, i);
    }

    std::vector<Int> tors;
    std::size_t free_rank = 0;
    for (const auto& m : d->moduli) {
      if (m == 0)
        ++free_rank;
      else if (m > 1)
        tors.push_back(m);
    }
    d->free_rank = free_rank;
    d->invariants = invariant_chain(std::move(tors));
    d_ = std::move(d);
  }

  static FgAbelianGroup free_group(std::size_t n) {
    return FgAbelianGroup(n, IntMatrix(0, n));
  }

  // Diagonal presentation Z^rank + Z/t1 + ... (torsion generators first).
  static FgAbelianGroup from_invariants(std::size_t rank, const std::vector<Int>& torsion) {
    std::size_t n = rank + torsion.size();
    IntMatrix rel(torsion.size(), n);
    for (std::size_t i = 0; i < torsion.size(); ++i) rel.at(i, i) = torsion[i];
    return FgAbelianGroup(n, std::move(rel));
  }

  std::size_t ngens() const { return d_->ngens; }
  const IntMatrix& relations() const { return d_->relations; }
  std::size_t free_rank() const { return d_->free_rank; }
  const std::vector<Int>& invariant_factors() const { return d_->invariants; }
  bool is_trivial() const { return d_->free_rank == 0 && d_->invariants.empty(); }

  // Per-generator modulus in the group's own coordinates; only meaningful for
  // diagonal presentations (0 = free generator).
  const std::vector<Int>& diagonal_moduli() const { return d_->moduli; }
  bool has_diagonal_relations() const { return d_->diagonal; }

  bool same_presentation(const FgAbelianGroup& o) const {
    return d_ == o.d_ || (d_->ngens == o.d_->ngens && d_->relations == o.d_->relations);
  }

  // Abstract isomorphism comparison.
  bool operator==(const FgAbelianGroup& o) const {
    return d_->free_rank == o.d_->free_rank && d_->invariants == o.d_->invariants;
  }
  bool operator!=(const FgAbelianGroup& o) const { return !(*this == o); }

  std::vector<Int> reduce(std::vector<Int> coords) const {
    if (coords.size() != d_->ngens) throw ShapeError("coords length mismatch");
    if (d_->diagonal) {
      for (std::size_t j = 0; j < coords.size(); ++j) reduce_mod(coords[j], d_->moduli[j]);
      return coords;
    }
    const IntMatrix& v = d_->snf.v;
    const IntMatrix& vinv = d_->snf.v_inv;
    std::size_t n = d_->ngens;
    std::vector<Int> y(n, Int(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (coords[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) y[j] += coords[i] * v.at(i, j);
    }
    for (std::size_t j = 0; j < n; ++j) reduce_mod(y[j], d_->moduli[j]);
    std::vector<Int> out(n, Int(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) out[j] += y[i] * vinv.at(i, j);
    }
    return out;
  }

  GroupElement element(std::vector<Int> coords) const;
  GroupElement zero() const;
  GroupElement generator(std::size_t i) const;

  // "Z^r + Z/d1 + ... + Z/dk"; the zero group prints "0".
  std::string to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (d_->free_rank > 0) {
      os << "Z^" << d_->free_rank;
      first = false;
    }
    for (const auto& t : d_->invariants) {
      if (!first) os << " + ";
      os << "Z/" << t;
      first = false;
    }
    return os.str();
  }

  // Membership of a raw coordinate vector in the relation lattice.
  bool lattice_member(const std::vector<Int>& coords) const {
    auto r = reduce(coords);
    return std::all_of(r.begin(), r.end(), [](const Int& x) { return x == 0; });
  }

 private:
  struct Data {
    std::size_t ngens = 0;
    IntMatrix relations;
    bool diagonal = false;
    std::vector<Int> moduli;  // per coordinate after change of basis (0 = free)
    SmithNormalForm snf;      // only when !diagonal
    std::size_t free_rank = 0;
    std::vector<Int> invariants;
  };

  static void reduce_mod(Int& x, const Int& m) {
    if (m == 0) return;
    x %= m;
    if (x < 0) x += m;
  }

  std::shared_ptr<const Data> d_;
};

class GroupElement {
 public:
  GroupElement(FgAbelianGroup group, std::vector<Int> coords)
      : g_(std::move(group)), c_(g_.reduce(std::move(coords))) {}

  const FgAbelianGroup& group() const { return g_; }
  const std::vector<Int>& coords() const { return c_; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Int& x) { return x == 0; });
  }

  GroupElement operator+(const GroupElement& o) const {
    check(o);
    std::vector<Int> s(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) s[i] = c_[i] + o.c_[i];
    return GroupElement(g_, std::move(s));
  }
  GroupElement operator-(const GroupElement& o) const {
    check(o);
    std::vector<Int> s(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) s[i] = c_[i] - o.c_[i];
    return GroupElement(g_, std::move(s));
  }
  GroupElement operator-() const {
    std::vector<Int> s(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) s[i] = -c_[i];
    return GroupElement(g_, std::move(s));
  }
  GroupElement operator*(const Int& k) const {
    std::vector<Int> s(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) s[i] = k * c_[i];
    return GroupElement(g_, std::move(s));
  }
  bool operator==(const GroupElement& o) const {
    check(o);
    return c_ == o.c_;
  }
  bool operator!=(const GroupElement& o) const { return !(*this == o); }

 private:
  void check(const GroupElement& o) const {
    if (!g_.same_presentation(o.g_))
      throw ShapeError("group elements from different presentations");
  }
  FgAbelianGroup g_;
  std::vector<Int> c_;
};

inline GroupElement FgAbelianGroup::element(std::vector<Int> coords) const {
  return GroupElement(*this, std::move(coords));
}
inline GroupElement FgAbelianGroup::zero() const {
  return GroupElement(*this, std::vector<Int>(ngens(), Int(0)));
}
inline GroupElement FgAbelianGroup::generator(std::size_t i) const {
  std::vector<Int> c(ngens(), Int(0));
  if (i >= ngens()) throw ShapeError("generator index out of range");
  c[i] = 1;
  return GroupElement(*this, std::move(c));
}

// Homomorphism given by generator images (row i = image of source generator i).
// Construction verifies the map kills every source relation.
class GroupHom {
 public:
  GroupHom(FgAbelianGroup src, FgAbelianGroup tgt, IntMatrix mat)
      : src_(std::move(src)), tgt_(std::move(tgt)), m_(std::move(mat)) {
    if (m_.rows() != src_.ngens() || m_.cols() != tgt_.ngens())
      throw ShapeError("hom matrix shape mismatch");
    const IntMatrix& rel = src_.relations();
    for (std::size_t i = 0; i < rel.rows(); ++i) {
      std::vector<Int> img(tgt_.ngens(), Int(0));
      for (std::size_t k = 0; k < src_.ngens(); ++k) {
        if (rel.at(i, k) == 0) continue;
        for (std::size_t j = 0; j < tgt_.ngens(); ++j)
          img[j] += rel.at(i, k) * m_.at(k, j);
      }
      if (!tgt_.lattice_member(img))
        throw NotWellDefined("hom does not preserve relation", i);
    }
  }

  static GroupHom zero(FgAbelianGroup src, FgAbelianGroup tgt) {
    IntMatrix m(src.ngens(), tgt.ngens());
    return GroupHom(std::move(src), std::move(tgt), std::move(m));
  }
  static GroupHom identity(FgAbelianGroup g) {
    IntMatrix m = IntMatrix::identity(g.ngens());
    return GroupHom(g, g, std::move(m));
  }

  const FgAbelianGroup& src() const { return src_; }
  const FgAbelianGroup& tgt() const { return tgt_; }
  const IntMatrix& matrix() const { return m_; }

  GroupElement apply(const GroupElement& x) const {
    if (!x.group().same_presentation(src_))
      throw ShapeError("hom applied to element of the wrong group");
    std::vector<Int> img(tgt_.ngens(), Int(0));
    const auto& c = x.coords();
    for (std::size_t k = 0; k < src_.ngens(); ++k) {
      if (c[k] == 0) continue;
      for (std::size_t j = 0; j < tgt_.ngens(); ++j) img[j] += c[k] * m_.at(k, j);
    }
    return GroupElement(tgt_, std::move(img));
  }
  GroupElement operator()(const GroupElement& x) const { return apply(x); }

  // this followed by next
  GroupHom then(const GroupHom& next) const {
    if (!tgt_.same_presentation(next.src_))
      throw ShapeError("hom composition mismatch");
    return GroupHom(src_, next.tgt_, m_ * next.m_);
  }

  bool is_zero() const {
    for (std::size_t i = 0; i < src_.ngens(); ++i)
      if (!tgt_.lattice_member(m_.row(i))) return false;
    return true;
  }

  GroupHom operator+(const GroupHom& o) const {
    if (!src_.same_presentation(o.src_) || !tgt_.same_presentation(o.tgt_))
      throw ShapeError("hom sum mismatch");
    return GroupHom(src_, tgt_, m_ + o.m_);
  }
  GroupHom operator-(const GroupHom& o) const {
    if (!src_.same_presentation(o.src_) || !tgt_.same_presentation(o.tgt_))
      throw ShapeError("hom difference mismatch");
    return GroupHom(src_, tgt_, m_ - o.m_);
  }

 private:
  FgAbelianGroup src_, tgt_;
  IntMatrix m_;
};

// Subgroup of `ambient` generated by the given coordinate rows, presented on
// those rows with all relations they satisfy in the ambient group.
struct Subgroup {
  FgAbelianGroup group;
  GroupHom incl;  // group -> ambient
};

inline Subgroup subgroup_from_rows(const FgAbelianGroup& ambient, const IntMatrix& rows) {
  if (rows.cols() != ambient.ngens() && rows.rows() > 0)
    throw ShapeError("subgroup rows width mismatch");
  IntMatrix gens = rows.rows() == 0 ? IntMatrix(0, ambient.ngens()) : rows;
  LatticeSolver rel_solver(vstack(gens, ambient.relations()));
  const auto& ker = rel_solver.kernel();
  IntMatrix rel(ker.size(), gens.rows());
  for (std::size_t i = 0; i < ker.size(); ++i)
    for (std::size_t j = 0; j < gens.rows(); ++j) rel.at(i, j) = ker[i][j];
  FgAbelianGroup sub(gens.rows(), std::move(rel));
  GroupHom incl(sub, ambient, gens);
  return Subgroup{std::move(sub), std::move(incl)};
}

struct KernelResult {
  FgAbelianGroup group;
  GroupHom incl;  // group -> src(h)
};

inline KernelResult hom_kernel(const GroupHom& h) {
  std::size_t n = h.src().ngens();
  // {x : x M in target relation lattice} as x-parts of a stacked kernel
  LatticeSolver pre(vstack(h.matrix(), h.tgt().relations()));
  const auto& ker = pre.kernel();
  IntMatrix p(ker.size(), n);
  for (std::size_t i = 0; i < ker.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) p.at(i, j) = ker[i][j];
  Subgroup s = subgroup_from_rows(h.src(), p);
  return KernelResult{std::move(s.group), std::move(s.incl)};
}

struct CokernelResult {
  FgAbelianGroup group;
  GroupHom proj;  // tgt(h) -> group
};

inline CokernelResult hom_cokernel(const GroupHom& h) {
  FgAbelianGroup c(h.tgt().ngens(), vstack(h.tgt().relations(), h.matrix()));
  GroupHom proj(h.tgt(), c, IntMatrix::identity(h.tgt().ngens()));
  return CokernelResult{std::move(c), std::move(proj)};
}

struct MembershipWitness {
  bool in_image = false;
  std::optional<GroupElement> preimage;       // h(preimage) == y when in_image
  std::vector<Int> cokernel_coords;           // canonical class of y in coker(h) otherwise
  std::string cokernel_shape;                 // rendered cokernel group
};

inline MembershipWitness solve_image_membership(const GroupHom& h, const GroupElement& y) {
  if (!y.group().same_presentation(h.tgt()))
    throw ShapeError("membership target in the wrong group");
  LatticeSolver sol(vstack(h.matrix(), h.tgt().relations()));
  auto x = sol.solve(y.coords());
  MembershipWitness w;
  if (x) {
    std::vector<Int> pre(x->begin(), x->begin() + h.src().ngens());
    w.in_image = true;
    w.preimage = h.src().element(std::move(pre));
    return w;
  }
  CokernelResult ck = hom_cokernel(h);
  w.in_image = false;
  w.cokernel_coords = ck.group.reduce(y.coords());
  w.cokernel_shape = ck.group.to_string();
  return w;
}

struct DirectSum {
  FgAbelianGroup group;
  std::vector<GroupHom> incl;   // part i -> sum
  std::vector<GroupHom> proj;   // sum -> part i
  std::vector<std::size_t> offset;
};

inline DirectSum direct_sum(const std::vector<FgAbelianGroup>& parts) {
  std::size_t n = 0, r = 0;
  std::vector<std::size_t> offset;
  for (const auto& p : parts) {
    offset.push_back(n);
    n += p.ngens();
    r += p.relations().rows();
  }
  IntMatrix rel(r, n);
  std::size_t ri = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const IntMatrix& pr = parts[k].relations();
    for (std::size_t i = 0; i < pr.rows(); ++i, ++ri)
      for (std::size_t j = 0; j < pr.cols(); ++j) rel.at(ri, offset[k] + j) = pr.at(i, j);
  }
  FgAbelianGroup sum(n, std::move(rel));
  DirectSum out;
  out.offset = offset;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    IntMatrix mi(parts[k].ngens(), n);
    for (std::size_t i = 0; i < parts[k].ngens(); ++i) mi.at(i, offset[k] + i) = 1;
    out.incl.emplace_back(parts[k], sum, std::move(mi));
    IntMatrix mp(n, parts[k].ngens());
    for (std::size_t i = 0; i < parts[k].ngens(); ++i) mp.at(offset[k] + i, i) = 1;
    out.proj.emplace_back(sum, parts[k], std::move(mp));
  }
  out.group = std::move(sum);
  return out;
}

}  // namespace poscoh
