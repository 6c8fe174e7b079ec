#pragma once

// Cohomology of finite groups acting on f.g. abelian coefficient modules,
// computed from the unnormalized cochain complex C^n = Map(G^n, M), plus the
// periodic-resolution shortcut for cyclic groups and inflation along a
// quotient map.

#include "poscoh/chaincx.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace poscoh {

// Multiplication-table group on elements 0..size-1; element 0 is the identity.
class FiniteGroup {
 public:
  explicit FiniteGroup(std::vector<std::vector<std::size_t>> table)
      : mul_(std::move(table)) {
    std::size_t n = mul_.size();
    if (n == 0) throw ShapeError("empty group table");
    for (const auto& row : mul_) {
      if (row.size() != n) throw ShapeError("ragged group table");
      for (auto v : row)
        if (v >= n) throw ShapeError("group table entry out of range");
    }
    for (std::size_t a = 0; a < n; ++a)
      if (mul_[0][a] != a || mul_[a][0] != a)
        throw MathPrecondition("element 0 is not an identity");
    inv_.assign(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b)
        if (mul_[a][b] == 0 && mul_[b][a] == 0) inv_[a] = b;
      if (inv_[a] == n) throw MathPrecondition("element lacks an inverse");
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (mul_[mul_[a][b]][c] != mul_[a][mul_[b][c]])
            throw MathPrecondition("group table is not associative");
  }

  static FiniteGroup cyclic(std::size_t n) {
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
    return FiniteGroup(std::move(t));
  }

  static FiniteGroup product(const FiniteGroup& x, const FiniteGroup& y) {
    std::size_t nx = x.size(), ny = y.size();
    std::vector<std::vector<std::size_t>> t(nx * ny,
                                            std::vector<std::size_t>(nx * ny));
    for (std::size_t a = 0; a < nx * ny; ++a)
      for (std::size_t b = 0; b < nx * ny; ++b)
        t[a][b] = x.mul(a / ny, b / ny) * ny + y.mul(a % ny, b % ny);
    return FiniteGroup(std::move(t));
  }

  std::size_t size() const { return mul_.size(); }
  std::size_t identity() const { return 0; }
  std::size_t mul(std::size_t a, std::size_t b) const { return mul_.at(a).at(b); }
  std::size_t inv(std::size_t a) const { return inv_.at(a); }

  bool operator==(const FiniteGroup& o) const { return mul_ == o.mul_; }

 private:
  std::vector<std::vector<std::size_t>> mul_;
  std::vector<std::size_t> inv_;
};

// Left action of a finite group on an f.g. abelian group; act(g) is the hom
// x -> x.A_g, and act(g) after act(h) must equal act(gh).
class GroupModule {
 public:
  GroupModule(FiniteGroup group, FgAbelianGroup mod, std::vector<IntMatrix> action)
      : g_(std::move(group)), m_(std::move(mod)) {
    if (action.size() != g_.size())
      throw ShapeError("one action matrix per group element required");
    for (std::size_t g = 0; g < action.size(); ++g)
      hom_.emplace_back(m_, m_, std::move(action[g]));
    if (!(hom_[g_.identity()] - GroupHom::identity(m_)).is_zero())
      throw MathPrecondition("identity must act trivially");
    for (std::size_t g = 0; g < g_.size(); ++g)
      for (std::size_t h = 0; h < g_.size(); ++h)
        if (!(hom_[h].then(hom_[g]) - hom_[g_.mul(g, h)]).is_zero())
          throw MathPrecondition("action is not a left action");
  }

  static GroupModule trivial(const FiniteGroup& group, const FgAbelianGroup& mod) {
    std::vector<IntMatrix> a(group.size(), IntMatrix::identity(mod.ngens()));
    return GroupModule(group, mod, std::move(a));
  }

  const FiniteGroup& group() const { return g_; }
  const FgAbelianGroup& module() const { return m_; }
  const GroupHom& action_hom(std::size_t g) const { return hom_.at(g); }
  GroupElement act(std::size_t g, const GroupElement& x) const {
    return hom_.at(g).apply(x);
  }

 private:
  FiniteGroup g_;
  FgAbelianGroup m_;
  std::vector<GroupHom> hom_;
};

// Unnormalized cochain complex of a finite group in degrees 0..top.
// Level n is the direct power M^(|G|^n); tuples are ordered lexicographically
// with the first argument most significant.
class BarComplex {
 public:
  BarComplex(GroupModule mod, std::size_t top)
      : m_(std::move(mod)), top_(top), cx_(build(m_, top)) {}

  const GroupModule& coefficients() const { return m_; }
  const FiniteGroup& group() const { return m_.group(); }
  std::size_t top_degree() const { return top_; }
  const CochainComplex& complex() const { return cx_; }

  std::size_t tuple_count(std::size_t n) const {
    std::size_t s = group().size(), t = 1;
    for (std::size_t i = 0; i < n; ++i) t *= s;
    return t;
  }

  std::size_t tuple_index(const std::vector<std::size_t>& tuple) const {
    std::size_t s = group().size(), idx = 0;
    for (auto g : tuple) {
      if (g >= s) throw ShapeError("tuple entry out of range");
      idx = idx * s + g;
    }
    return idx;
  }

  std::vector<std::size_t> index_tuple(std::size_t n, std::size_t idx) const {
    std::size_t s = group().size();
    std::vector<std::size_t> t(n);
    for (std::size_t i = n; i > 0; --i) {
      t[i - 1] = idx % s;
      idx /= s;
    }
    return t;
  }

  // Assemble a degree-n cochain from its value at every tuple (tuple order).
  GroupElement cochain_from_values(std::size_t n,
                                   const std::vector<GroupElement>& values) const {
    std::size_t k = m_.module().ngens();
    std::size_t nt = tuple_count(n);
    if (values.size() != nt) throw ShapeError("one value per tuple required");
    std::vector<Int> coords(nt * k, Int(0));
    for (std::size_t t = 0; t < nt; ++t) {
      if (!values[t].group().same_presentation(m_.module()))
        throw ShapeError("cochain value outside the coefficient module");
      for (std::size_t j = 0; j < k; ++j) coords[t * k + j] = values[t].coords()[j];
    }
    return cx_.level(n).element(std::move(coords));
  }

  GroupElement value_at(std::size_t n, const GroupElement& cochain,
                        const std::vector<std::size_t>& tuple) const {
    if (!cochain.group().same_presentation(cx_.level(n)))
      throw ShapeError("cochain lives in the wrong level");
    if (tuple.size() != n) throw ShapeError("tuple arity mismatch");
    std::size_t k = m_.module().ngens();
    std::size_t t = tuple_index(tuple);
    std::vector<Int> v(cochain.coords().begin() + t * k,
                       cochain.coords().begin() + (t + 1) * k);
    return m_.module().element(std::move(v));
  }

 private:
  static CochainComplex build(const GroupModule& mod, std::size_t top) {
    const FiniteGroup& grp = mod.group();
    std::size_t s = grp.size();
    std::size_t k = mod.module().ngens();

    std::vector<FgAbelianGroup> levels;
    std::size_t nt = 1;
    for (std::size_t n = 0; n <= top; ++n) {
      std::vector<FgAbelianGroup> parts(nt, mod.module());
      levels.push_back(direct_sum(parts).group);
      nt *= s;
    }

    std::vector<GroupHom> diffs;
    std::size_t src_tuples = 1;
    for (std::size_t n = 0; n < top; ++n) {
      std::size_t tgt_tuples = src_tuples * s;
      IntMatrix d(src_tuples * k, tgt_tuples * k);
      std::vector<std::size_t> w(n + 1);
      for (std::size_t widx = 0; widx < tgt_tuples; ++widx) {
        std::size_t tmp = widx;
        for (std::size_t i = n + 1; i > 0; --i) {
          w[i - 1] = tmp % s;
          tmp /= s;
        }
        // first face: value moved by the leading group element
        {
          std::size_t u = 0;
          for (std::size_t i = 1; i <= n; ++i) u = u * s + w[i];
          const IntMatrix& a = mod.action_hom(w[0]).matrix();
          for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c)
              if (a.at(r, c) != 0) d.at(u * k + r, widx * k + c) += a.at(r, c);
        }
        // inner faces: merge adjacent arguments, alternating signs
        for (std::size_t i = 1; i <= n; ++i) {
          std::size_t u = 0;
          for (std::size_t j = 0; j <= n; ++j) {
            if (j == i) continue;
            std::size_t gj = (j == i - 1) ? grp.mul(w[i - 1], w[i]) : w[j];
            u = u * s + gj;
          }
          int sign = (i % 2 == 0) ? 1 : -1;
          for (std::size_t r = 0; r < k; ++r) d.at(u * k + r, widx * k + r) += sign;
        }
        // last face: drop the trailing argument
        {
          std::size_t u = 0;
          for (std::size_t i = 0; i < n; ++i) u = u * s + w[i];
          int sign = ((n + 1) % 2 == 0) ? 1 : -1;
          for (std::size_t r = 0; r < k; ++r) d.at(u * k + r, widx * k + r) += sign;
        }
      }
      diffs.emplace_back(levels[n], levels[n + 1], std::move(d));
      src_tuples = tgt_tuples;
    }
    return CochainComplex(std::move(levels), std::move(diffs));
  }

  GroupModule m_;
  std::size_t top_;
  CochainComplex cx_;
};

inline FgAbelianGroup group_cohomology(const GroupModule& mod, std::size_t n) {
  BarComplex bar(mod, n + 1);
  return bar.complex().cohomology(n).group();
}

// Periodic-resolution computation for a cyclic group acting through the
// matrix of its distinguished generator: independent of the complex above.
inline FgAbelianGroup cyclic_cohomology_oracle(std::size_t order,
                                               const FgAbelianGroup& mod,
                                               const IntMatrix& gen_action,
                                               std::size_t degree) {
  GroupHom rho(mod, mod, gen_action);
  GroupHom diff = rho - GroupHom::identity(mod);
  GroupHom norm = GroupHom::zero(mod, mod);
  GroupHom power = GroupHom::identity(mod);
  for (std::size_t i = 0; i < order; ++i) {
    norm = norm + power;
    power = power.then(rho);
  }
  std::vector<FgAbelianGroup> levels(degree + 2, mod);
  std::vector<GroupHom> diffs;
  for (std::size_t j = 0; j + 1 <= degree + 1; ++j)
    diffs.push_back(j % 2 == 0 ? diff : norm);
  CochainComplex cx(std::move(levels), std::move(diffs));
  return cx.cohomology(degree).group();
}

// Quotient data for inflating cochains: proj maps the big group onto the
// quotient, and the coefficient module is replaced by the invariants of the
// projection kernel.
struct InflationSetup {
  FiniteGroup big;
  FiniteGroup quot;
  std::vector<std::size_t> proj;   // big element -> quotient element
  GroupModule invariants;          // quotient module structure on M^K
  GroupHom incl;                   // invariants -> M as abelian groups
};

inline InflationSetup inflation_setup(const FiniteGroup& big,
                                      const FiniteGroup& quot,
                                      const std::vector<std::size_t>& proj,
                                      const GroupModule& mod) {
  if (!(mod.group() == big)) throw ShapeError("module is over the wrong group");
  if (proj.size() != big.size()) throw ShapeError("projection table size");
  std::vector<bool> hit(quot.size(), false);
  for (std::size_t a = 0; a < big.size(); ++a) {
    if (proj[a] >= quot.size()) throw ShapeError("projection out of range");
    hit[proj[a]] = true;
    for (std::size_t b = 0; b < big.size(); ++b)
      if (proj[big.mul(a, b)] != quot.mul(proj[a], proj[b]))
        throw MathPrecondition("projection is not a homomorphism");
  }
  for (bool h : hit)
    if (!h) throw MathPrecondition("projection is not surjective");

  const FgAbelianGroup& m = mod.module();
  std::vector<std::size_t> kernel_elems;
  for (std::size_t a = 0; a < big.size(); ++a)
    if (proj[a] == quot.identity()) kernel_elems.push_back(a);

  // Invariants of the kernel subgroup: common kernel of act(g) - id.
  IntMatrix stacked(m.ngens(), kernel_elems.size() * m.ngens());
  for (std::size_t idx = 0; idx < kernel_elems.size(); ++idx) {
    IntMatrix diff =
        (mod.action_hom(kernel_elems[idx]) - GroupHom::identity(m)).matrix();
    for (std::size_t r = 0; r < m.ngens(); ++r)
      for (std::size_t c = 0; c < m.ngens(); ++c)
        stacked.at(r, idx * m.ngens() + c) = diff.at(r, c);
  }
  // Kernel of x -> x.stacked taken relative to the target relations of each
  // copy of M: stack the target relations for every kernel element copy.
  std::size_t copies = kernel_elems.size();
  IntMatrix tgt_rel(copies * m.relations().rows(), copies * m.ngens());
  for (std::size_t idx = 0; idx < copies; ++idx)
    for (std::size_t r = 0; r < m.relations().rows(); ++r)
      for (std::size_t c = 0; c < m.ngens(); ++c)
        tgt_rel.at(idx * m.relations().rows() + r, idx * m.ngens() + c) =
            m.relations().at(r, c);
  FgAbelianGroup big_tgt(copies * m.ngens(), tgt_rel);
  GroupHom joint_hom(m, big_tgt, stacked);
  auto ker = hom_kernel(joint_hom);

  // Transport the action of quotient representatives to the invariants.
  LatticeSolver back(vstack(ker.incl.matrix(), m.relations()));
  std::vector<IntMatrix> action;
  for (std::size_t q = 0; q < quot.size(); ++q) {
    std::size_t rep = big.size();
    for (std::size_t a = 0; a < big.size(); ++a)
      if (proj[a] == q && a < rep) rep = a;
    IntMatrix aq(ker.group.ngens(), ker.group.ngens());
    for (std::size_t i = 0; i < ker.group.ngens(); ++i) {
      GroupElement moved = mod.act(rep, ker.incl.apply(ker.group.generator(i)));
      auto sol = back.solve(moved.coords());
      if (!sol)
        throw MathPrecondition("kernel invariants are not quotient-stable");
      for (std::size_t j = 0; j < ker.group.ngens(); ++j) aq.at(i, j) = (*sol)[j];
    }
    action.push_back(std::move(aq));
  }
  GroupModule inv(quot, ker.group, std::move(action));
  return InflationSetup{big, quot, proj, std::move(inv), ker.incl};
}

// Pull a quotient cochain back along the projection, degreewise.
inline GroupElement inflate_cochain(const InflationSetup& setup,
                                    const BarComplex& quot_bar,
                                    const BarComplex& big_bar, std::size_t n,
                                    const GroupElement& cochain) {
  std::size_t nt = big_bar.tuple_count(n);
  std::vector<GroupElement> values;
  values.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto tuple = big_bar.index_tuple(n, t);
    for (auto& g : tuple) g = setup.proj[g];
    values.push_back(
        setup.incl.apply(quot_bar.value_at(n, cochain, tuple)));
  }
  return big_bar.cochain_from_values(n, values);
}

// The induced map on degree-n cohomology, as an explicit hom computed on
// generators; constructing it validates that the map is well defined.
inline GroupHom inflation(const InflationSetup& setup, const BarComplex& quot_bar,
                          const BarComplex& big_bar, std::size_t n) {
  const CohomologyGroup& hq = quot_bar.complex().cohomology(n);
  const CohomologyGroup& hg = big_bar.complex().cohomology(n);
  IntMatrix m(hq.group().ngens(), hg.group().ngens());
  for (std::size_t i = 0; i < hq.group().ngens(); ++i) {
    GroupElement rep = hq.rep_of(hq.group().generator(i));
    GroupElement big = inflate_cochain(setup, quot_bar, big_bar, n, rep);
    GroupElement cls = hg.class_of(big);
    for (std::size_t j = 0; j < hg.group().ngens(); ++j)
      m.at(i, j) = cls.coords()[j];
  }
  return GroupHom(hq.group(), hg.group(), std::move(m));
}

}  // namespace poscoh
