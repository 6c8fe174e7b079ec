#pragma once

// Bounded cochain complexes of f.g. abelian groups: cohomology with
// class/representative accessors, coboundary solving with exact witnesses,
// and first-quadrant double complexes with totalization.

#include "poscoh/abgroup.hpp"

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace poscoh {

struct MathPrecondition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CohomologyGroup;

class CochainComplex {
 public:
  CochainComplex(std::vector<FgAbelianGroup> groups, std::vector<GroupHom> diffs)
      : d_(std::make_shared<Data>()) {
    if (groups.empty()) throw ShapeError("complex needs at least one level");
    if (diffs.size() + 1 != groups.size())
      throw ShapeError("complex needs one differential per adjacent pair");
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      if (!diffs[i].src().same_presentation(groups[i]) ||
          !diffs[i].tgt().same_presentation(groups[i + 1]))
        throw ShapeError("differential endpoints disagree with levels");
    }
    for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
      if (!diffs[i].then(diffs[i + 1]).is_zero())
        throw MathPrecondition("d after d is nonzero at degree " + std::to_string(i));
    }
    d_->c = std::move(groups);
    d_->d = std::move(diffs);
  }

  std::size_t top_degree() const { return d_->c.size() - 1; }
  const FgAbelianGroup& level(std::size_t n) const { return d_->c.at(n); }
  const GroupHom& diff(std::size_t n) const { return d_->d.at(n); }

  bool same_object(const CochainComplex& o) const { return d_ == o.d_; }

  const CohomologyGroup& cohomology(std::size_t n) const;

  // Solve d(w) = z at degree n (w in level n-1).  Returns the deterministic
  // canonical witness; witnesses satisfy d(w) = z exactly.
  struct Coboundary {
    bool is_coboundary = false;
    std::optional<GroupElement> witness;
  };
  Coboundary solve_coboundary(std::size_t n, const GroupElement& z) const {
    if (!z.group().same_presentation(level(n)))
      throw ShapeError("coboundary query in the wrong level");
    if (n < top_degree() && !diff(n).apply(z).is_zero())
      throw MathPrecondition("coboundary query on a non-cocycle");
    Coboundary out;
    if (n == 0) {
      out.is_coboundary = z.is_zero();
      return out;
    }
    auto& slot = d_->cob[n];
    if (!slot)
      slot = std::make_unique<LatticeSolver>(
          vstack(diff(n - 1).matrix(), level(n).relations()));
    auto sol = slot->solve(z.coords());
    if (!sol) return out;
    std::vector<Int> w(sol->begin(), sol->begin() + level(n - 1).ngens());
    out.is_coboundary = true;
    out.witness = level(n - 1).element(std::move(w));
    return out;
  }

 private:
  struct Data {
    std::vector<FgAbelianGroup> c;
    std::vector<GroupHom> d;
    std::map<std::size_t, std::unique_ptr<LatticeSolver>> cob;
    std::map<std::size_t, std::shared_ptr<const CohomologyGroup>> coh;
  };
  std::shared_ptr<Data> d_;
  friend class CohomologyGroup;
};

// H^n = ker d^n / im d^{n-1}, normalized to a diagonal presentation
// (torsion generators in divisibility order, then free generators).
class CohomologyGroup {
 public:
  CohomologyGroup(const CochainComplex& cx, std::size_t n)
      : n_(n), cn_(cx.level(n)) {
    if (n < cx.top_degree()) dnext_ = cx.diff(n);
    const FgAbelianGroup& cn = cn_;
    std::size_t nc = cn.ngens();

    IntMatrix ker_stack =
        n < cx.top_degree()
            ? vstack(cx.diff(n).matrix(), cx.level(n + 1).relations())
            : IntMatrix(0, 0);
    std::vector<std::vector<Int>> kernel_rows;
    if (n < cx.top_degree()) {
      LatticeSolver pre(ker_stack);
      kernel_rows = pre.kernel();
      for (auto& r : kernel_rows) r.resize(nc);
    } else {
      for (std::size_t i = 0; i < nc; ++i) {
        std::vector<Int> e(nc, Int(0));
        e[i] = 1;
        kernel_rows.push_back(std::move(e));
      }
    }
    p_ = IntMatrix(kernel_rows.size(), nc);
    for (std::size_t i = 0; i < kernel_rows.size(); ++i)
      p_.set_row(i, kernel_rows[i]);

    IntMatrix boundaries = n > 0 ? cx.diff(n - 1).matrix() : IntMatrix(0, nc);
    LatticeSolver relsol(vstack(p_, vstack(cn.relations(), boundaries)));
    const auto& relker = relsol.kernel();
    IntMatrix relmat(relker.size(), p_.rows());
    for (std::size_t i = 0; i < relker.size(); ++i)
      for (std::size_t j = 0; j < p_.rows(); ++j) relmat.at(i, j) = relker[i][j];

    snf_ = smith_normal_form(relmat);
    std::size_t s = p_.rows();
    std::vector<Int> moduli(s, Int(0));
    for (std::size_t i = 0; i < std::min(relmat.rows(), s); ++i)
      moduli[i] = snf_.d.at(i, i);
    std::vector<Int> kept_moduli;
    for (std::size_t i = 0; i < s; ++i) {
      if (moduli[i] == 1) continue;
      kept_.push_back(i);
      kept_moduli.push_back(moduli[i]);
    }
    std::size_t t = kept_.size();
    IntMatrix hrel(0, t);
    {
      std::vector<std::vector<Int>> rows;
      for (std::size_t i = 0; i < t; ++i) {
        if (kept_moduli[i] == 0) continue;
        std::vector<Int> r(t, Int(0));
        r[i] = kept_moduli[i];
        rows.push_back(std::move(r));
      }
      hrel = IntMatrix(rows.size(), t);
      for (std::size_t i = 0; i < rows.size(); ++i) hrel.set_row(i, rows[i]);
    }
    h_ = FgAbelianGroup(t, std::move(hrel));

    rep_ = IntMatrix(t, nc);
    for (std::size_t i = 0; i < t; ++i) {
      std::size_t j = kept_[i];
      std::vector<Int> row(nc, Int(0));
      for (std::size_t k = 0; k < s; ++k) {
        const Int& c = snf_.v_inv.at(j, k);
        if (c == 0) continue;
        for (std::size_t l = 0; l < nc; ++l) row[l] += c * p_.at(k, l);
      }
      rep_.set_row(i, row);
    }
    class_solver_ = std::make_unique<LatticeSolver>(vstack(p_, cn.relations()));
  }

  std::size_t degree() const { return n_; }
  const FgAbelianGroup& group() const { return h_; }

  bool is_cocycle(const GroupElement& z) const {
    if (!z.group().same_presentation(cn_))
      throw ShapeError("cocycle query in the wrong level");
    if (!dnext_) return true;
    return dnext_->apply(z).is_zero();
  }

  GroupElement class_of(const GroupElement& z) const {
    if (!is_cocycle(z)) throw MathPrecondition("class_of: not a cocycle");
    auto sol = class_solver_->solve(z.coords());
    if (!sol) throw MathPrecondition("class_of: cocycle outside kernel span");
    std::size_t s = p_.rows();
    std::vector<Int> y(s, Int(0));
    for (std::size_t i = 0; i < s; ++i) {
      if ((*sol)[i] == 0) continue;
      for (std::size_t j = 0; j < s; ++j) y[j] += (*sol)[i] * snf_.v.at(i, j);
    }
    std::vector<Int> cls(kept_.size(), Int(0));
    for (std::size_t i = 0; i < kept_.size(); ++i) cls[i] = y[kept_[i]];
    return h_.element(std::move(cls));
  }

  GroupElement rep_of(const GroupElement& cls) const {
    if (!cls.group().same_presentation(h_))
      throw ShapeError("rep_of: class in the wrong group");
    std::size_t nc = cn_.ngens();
    std::vector<Int> z(nc, Int(0));
    const auto& c = cls.coords();
    for (std::size_t i = 0; i < kept_.size(); ++i) {
      if (c[i] == 0) continue;
      for (std::size_t j = 0; j < nc; ++j) z[j] += c[i] * rep_.at(i, j);
    }
    return cn_.element(std::move(z));
  }

 private:
  std::size_t n_;
  FgAbelianGroup cn_;
  std::optional<GroupHom> dnext_;
  IntMatrix p_;     // kernel basis rows in level-n coordinates
  SmithNormalForm snf_;
  std::vector<std::size_t> kept_;
  FgAbelianGroup h_;
  IntMatrix rep_;
  std::unique_ptr<LatticeSolver> class_solver_;
};

inline const CohomologyGroup& CochainComplex::cohomology(std::size_t n) const {
  auto& slot = d_->coh[n];
  if (!slot) slot = std::make_shared<CohomologyGroup>(*this, n);
  return *slot;
}

inline const CohomologyGroup& cohomology(const CochainComplex& cx, std::size_t n) {
  return cx.cohomology(n);
}

inline CochainComplex::Coboundary is_coboundary(const CochainComplex& cx, std::size_t n,
                                                const GroupElement& z) {
  return cx.solve_coboundary(n, z);
}

// Commuting first-quadrant double complex; the sign (-1)^p enters only at
// totalization.
class DoubleComplex {
 public:
  DoubleComplex(std::vector<std::vector<FgAbelianGroup>> groups,
                std::vector<std::vector<GroupHom>> dh,
                std::vector<std::vector<GroupHom>> dv)
      : k_(std::move(groups)), dh_(std::move(dh)), dv_(std::move(dv)) {
    pmax_ = k_.size() - 1;
    qmax_ = k_.at(0).size() - 1;
    for (const auto& col : k_)
      if (col.size() != qmax_ + 1) throw ShapeError("ragged double complex");
    for (std::size_t p = 0; p <= pmax_; ++p)
      for (std::size_t q = 0; q <= qmax_; ++q) {
        if (p < pmax_) {
          const GroupHom& h = dh_.at(p).at(q);
          if (!h.src().same_presentation(k_[p][q]) ||
              !h.tgt().same_presentation(k_[p + 1][q]))
            throw ShapeError("horizontal differential endpoints");
        }
        if (q < qmax_) {
          const GroupHom& v = dv_.at(p).at(q);
          if (!v.src().same_presentation(k_[p][q]) ||
              !v.tgt().same_presentation(k_[p][q + 1]))
            throw ShapeError("vertical differential endpoints");
        }
      }
    for (std::size_t p = 0; p + 2 <= pmax_; ++p)
      for (std::size_t q = 0; q <= qmax_; ++q)
        if (!dh_[p][q].then(dh_[p + 1][q]).is_zero())
          throw MathPrecondition("horizontal d squared nonzero");
    for (std::size_t p = 0; p <= pmax_; ++p)
      for (std::size_t q = 0; q + 2 <= qmax_; ++q)
        if (!dv_[p][q].then(dv_[p][q + 1]).is_zero())
          throw MathPrecondition("vertical d squared nonzero");
    for (std::size_t p = 0; p < pmax_; ++p)
      for (std::size_t q = 0; q < qmax_; ++q)
        if (!(dh_[p][q].then(dv_[p + 1][q]) - dv_[p][q].then(dh_[p][q + 1])).is_zero())
          throw MathPrecondition("squares do not commute");
  }

  std::size_t pmax() const { return pmax_; }
  std::size_t qmax() const { return qmax_; }
  const FgAbelianGroup& at(std::size_t p, std::size_t q) const { return k_.at(p).at(q); }
  const GroupHom& dh(std::size_t p, std::size_t q) const { return dh_.at(p).at(q); }
  const GroupHom& dv(std::size_t p, std::size_t q) const { return dv_.at(p).at(q); }

 private:
  std::size_t pmax_, qmax_;
  std::vector<std::vector<FgAbelianGroup>> k_;
  std::vector<std::vector<GroupHom>> dh_, dv_;
};

struct TotalComplex {
  CochainComplex cx;
  // per total degree: the (p,q) blocks in ascending p, with generator offsets
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> blocks;
  std::vector<std::vector<std::size_t>> offsets;

  std::size_t block_offset(std::size_t n, std::size_t p) const {
    for (std::size_t i = 0; i < blocks.at(n).size(); ++i)
      if (blocks[n][i].first == p) return offsets[n][i];
    throw ShapeError("no such block in total degree");
  }
};

inline TotalComplex total_complex(const DoubleComplex& dc) {
  std::size_t top = dc.pmax() + dc.qmax();
  std::vector<FgAbelianGroup> levels;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> blocks(top + 1);
  std::vector<std::vector<std::size_t>> offsets(top + 1);
  for (std::size_t n = 0; n <= top; ++n) {
    std::vector<FgAbelianGroup> parts;
    for (std::size_t p = 0; p <= std::min(n, dc.pmax()); ++p) {
      std::size_t q = n - p;
      if (q > dc.qmax()) continue;
      blocks[n].emplace_back(p, q);
      parts.push_back(dc.at(p, q));
    }
    DirectSum ds = direct_sum(parts);
    offsets[n] = ds.offset;
    levels.push_back(ds.group);
  }
  std::vector<GroupHom> diffs;
  for (std::size_t n = 0; n < top; ++n) {
    IntMatrix m(levels[n].ngens(), levels[n + 1].ngens());
    for (std::size_t bi = 0; bi < blocks[n].size(); ++bi) {
      auto [p, q] = blocks[n][bi];
      std::size_t src_off = offsets[n][bi];
      if (p < dc.pmax()) {
        const IntMatrix& hm = dc.dh(p, q).matrix();
        std::size_t tgt_off = SIZE_MAX;
        for (std::size_t bj = 0; bj < blocks[n + 1].size(); ++bj)
          if (blocks[n + 1][bj] == std::make_pair(p + 1, q)) tgt_off = offsets[n + 1][bj];
        for (std::size_t i = 0; i < hm.rows(); ++i)
          for (std::size_t j = 0; j < hm.cols(); ++j)
            if (hm.at(i, j) != 0) m.at(src_off + i, tgt_off + j) += hm.at(i, j);
      }
      if (q < dc.qmax()) {
        const IntMatrix& vm = dc.dv(p, q).matrix();
        int sign = (p % 2 == 0) ? 1 : -1;
        std::size_t tgt_off = SIZE_MAX;
        for (std::size_t bj = 0; bj < blocks[n + 1].size(); ++bj)
          if (blocks[n + 1][bj] == std::make_pair(p, q + 1)) tgt_off = offsets[n + 1][bj];
        for (std::size_t i = 0; i < vm.rows(); ++i)
          for (std::size_t j = 0; j < vm.cols(); ++j)
            if (vm.at(i, j) != 0) m.at(src_off + i, tgt_off + j) += sign * vm.at(i, j);
      }
    }
    diffs.emplace_back(levels[n], levels[n + 1], std::move(m));
  }
  TotalComplex out{CochainComplex(std::move(levels), std::move(diffs)),
                   std::move(blocks), std::move(offsets)};
  return out;
}

}  // namespace poscoh
