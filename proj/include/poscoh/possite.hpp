// Finite posets with up-closed opens, sheaves of f.g. abelian groups on them,
// equivariant structure, the strict-chain cochain complex, pushforwards along
// monotone covers, and the torsor-twisted hom/contraction constructions.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "poscoh/chaincx.hpp"
#include "poscoh/gcoh.hpp"

namespace poscoh {

namespace detail {
inline std::vector<Int> row_times(const std::vector<Int>& v, const IntMatrix& m) {
  if (v.size() != m.rows()) throw ShapeError("row width mismatch");
  std::vector<Int> out(m.cols(), Int(0));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m.at(i, j);
  }
  return out;
}
}  // namespace detail

// Finite poset; opens are the up-closed subsets, so a point's smallest open
// neighborhood is its up-set.  Comparability is the reflexive-transitive
// closure of the declared pairs; antisymmetry of the closure is enforced.
class PosetSite {
 public:
  PosetSite(std::vector<std::string> names,
            std::vector<std::pair<std::size_t, std::size_t>> below)
      : names_(std::move(names)) {
    std::size_t n = names_.size();
    if (n == 0) throw ShapeError("poset needs at least one point");
    {
      std::set<std::string> seen;
      for (const auto& s : names_)
        if (!seen.insert(s).second)
          throw ShapeError("duplicate point name: " + s);
    }
    leq_.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) leq_[i][i] = true;
    for (auto [a, b] : below) {
      if (a >= n || b >= n) throw ShapeError("relation endpoint out of range");
      leq_[a][b] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (leq_[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (leq_[k][j]) leq_[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (leq_[i][j] && leq_[j][i])
          throw MathPrecondition("points " + names_[i] + " and " + names_[j] +
                                 " are mutually below each other");
    // All strict chains, by length; lexicographic in point indices.
    chains_.push_back({});
    for (std::size_t x = 0; x < n; ++x) chains_[0].push_back({x});
    while (true) {
      std::vector<std::vector<std::size_t>> next;
      for (const auto& c : chains_.back())
        for (std::size_t y = 0; y < n; ++y)
          if (lt(c.back(), y)) {
            auto e = c;
            e.push_back(y);
            next.push_back(std::move(e));
          }
      if (next.empty()) break;
      chains_.push_back(std::move(next));
    }
    chain_idx_.resize(chains_.size());
    for (std::size_t q = 0; q < chains_.size(); ++q)
      for (std::size_t i = 0; i < chains_[q].size(); ++i)
        chain_idx_[q][chains_[q][i]] = i;
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::size_t index(const std::string& s) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == s) return i;
    throw ShapeError("unknown point name: " + s);
  }

  bool leq(std::size_t a, std::size_t b) const { return leq_.at(a).at(b); }
  bool lt(std::size_t a, std::size_t b) const { return a != b && leq_.at(a).at(b); }

  std::vector<std::size_t> up_set(std::size_t x) const {
    std::vector<std::size_t> u;
    for (std::size_t y = 0; y < size(); ++y)
      if (leq(x, y)) u.push_back(y);
    return u;
  }

  // First pair (x in pts, y above x missing from pts), if any.
  std::optional<std::pair<std::size_t, std::size_t>> up_closure_gap(
      const std::vector<std::size_t>& pts) const {
    std::vector<bool> in(size(), false);
    for (auto p : pts) in.at(p) = true;
    for (auto p : pts)
      for (std::size_t y = 0; y < size(); ++y)
        if (lt(p, y) && !in[y]) return std::make_pair(p, y);
    return std::nullopt;
  }
  bool is_up_closed(const std::vector<std::size_t>& pts) const {
    return !up_closure_gap(pts).has_value();
  }

  std::size_t max_chain_degree() const { return chains_.size() - 1; }
  const std::vector<std::vector<std::size_t>>& chains(std::size_t q) const {
    static const std::vector<std::vector<std::size_t>> none;
    return q < chains_.size() ? chains_[q] : none;
  }
  std::size_t chain_index(std::size_t q, const std::vector<std::size_t>& c) const {
    auto it = q < chain_idx_.size() ? chain_idx_[q].find(c) : chain_idx_.back().end();
    if (q >= chain_idx_.size() || it == chain_idx_[q].end())
      throw ShapeError("chain not present at this length");
    return it->second;
  }

  std::vector<std::size_t> minimal_points() const {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < size(); ++x) {
      bool min = true;
      for (std::size_t y = 0; y < size(); ++y)
        if (lt(y, x)) min = false;
      if (min) out.push_back(x);
    }
    return out;
  }

  bool operator==(const PosetSite& o) const {
    return names_ == o.names_ && leq_ == o.leq_;
  }
  bool operator!=(const PosetSite& o) const { return !(*this == o); }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<bool>> leq_;
  std::vector<std::vector<std::vector<std::size_t>>> chains_;
  std::vector<std::map<std::vector<std::size_t>, std::size_t>> chain_idx_;
};

// Expresses ambient-coordinate vectors in the coordinates of a presented
// subgroup; a returned element maps to the queried one under the inclusion.
class SubgroupExpr {
 public:
  SubgroupExpr(FgAbelianGroup sub, const FgAbelianGroup& ambient,
               const GroupHom& incl)
      : sub_(std::move(sub)),
        solver_(vstack(incl.matrix(), ambient.relations())) {}

  std::optional<GroupElement> coords(const std::vector<Int>& ambient_coords) const {
    auto x = solver_.solve(ambient_coords);
    if (!x) return std::nullopt;
    std::vector<Int> c(x->begin(), x->begin() + sub_.ngens());
    return sub_.element(std::move(c));
  }
  std::optional<GroupElement> coords(const GroupElement& e) const {
    return coords(e.coords());
  }

 private:
  FgAbelianGroup sub_;
  LatticeSolver solver_;
};

// Sheaf of f.g. abelian groups: one stalk per point, one restriction map per
// strict comparable pair, functorial across chains of length two.
class Sheaf {
 public:
  Sheaf(PosetSite site, std::vector<FgAbelianGroup> stalks,
        const std::map<std::pair<std::size_t, std::size_t>, IntMatrix>& restr)
      : site_(std::move(site)), stalk_(std::move(stalks)) {
    std::size_t n = site_.size();
    if (stalk_.size() != n) throw ShapeError("one stalk per point required");
    for (const auto& [key, mat] : restr) {
      auto [x, y] = key;
      if (x >= n || y >= n) throw ShapeError("restriction endpoint out of range");
      if (!site_.lt(x, y))
        throw ShapeError("restriction for non-comparable pair " + site_.name(x) +
                         "," + site_.name(y));
      r_.emplace(key, GroupHom(stalk_[x], stalk_[y], mat));
    }
    for (std::size_t x = 0; x < n; ++x) {
      r_.emplace(std::make_pair(x, x), GroupHom::identity(stalk_[x]));
      for (std::size_t y = 0; y < n; ++y)
        if (site_.lt(x, y) && !r_.count({x, y}))
          throw ShapeError("missing restriction for pair " + site_.name(x) + "," +
                           site_.name(y));
    }
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (site_.lt(x, y))
          for (std::size_t z = 0; z < n; ++z)
            if (site_.lt(y, z) &&
                !(restriction(x, y).then(restriction(y, z)) - restriction(x, z))
                     .is_zero())
              throw MathPrecondition("restrictions are not functorial along " +
                                     site_.name(x) + "," + site_.name(y) + "," +
                                     site_.name(z));
  }

  const PosetSite& site() const { return site_; }
  const FgAbelianGroup& stalk(std::size_t x) const { return stalk_.at(x); }
  const GroupHom& restriction(std::size_t x, std::size_t y) const {
    auto it = r_.find({x, y});
    if (it == r_.end())
      throw ShapeError("restriction requested for non-comparable pair " +
                       site_.name(x) + "," + site_.name(y));
    return it->second;
  }

 private:
  PosetSite site_;
  std::vector<FgAbelianGroup> stalk_;
  std::map<std::pair<std::size_t, std::size_t>, GroupHom> r_;
};

inline Sheaf constant_sheaf(const PosetSite& site, const FgAbelianGroup& g) {
  std::vector<FgAbelianGroup> stalks(site.size(), g);
  std::map<std::pair<std::size_t, std::size_t>, IntMatrix> restr;
  for (std::size_t x = 0; x < site.size(); ++x)
    for (std::size_t y = 0; y < site.size(); ++y)
      if (site.lt(x, y)) restr.emplace(std::make_pair(x, y), IntMatrix::identity(g.ngens()));
  return Sheaf(site, std::move(stalks), restr);
}

// Pointwise map of sheaves on one site, commuting with all restrictions.
class SheafMorphism {
 public:
  SheafMorphism(Sheaf src, Sheaf tgt, const std::vector<IntMatrix>& maps)
      : src_(std::move(src)), tgt_(std::move(tgt)) {
    if (src_.site() != tgt_.site())
      throw ShapeError("morphism endpoints live on different sites");
    std::size_t n = src_.site().size();
    if (maps.size() != n) throw ShapeError("one component per point required");
    for (std::size_t x = 0; x < n; ++x)
      at_.emplace_back(src_.stalk(x), tgt_.stalk(x), maps[x]);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (src_.site().lt(x, y) &&
            !(at_[x].then(tgt_.restriction(x, y)) -
              src_.restriction(x, y).then(at_[y]))
                 .is_zero())
          throw MathPrecondition("morphism does not commute with restriction " +
                                 src_.site().name(x) + "," + src_.site().name(y));
  }

  const Sheaf& src() const { return src_; }
  const Sheaf& tgt() const { return tgt_; }
  const GroupHom& at(std::size_t x) const { return at_.at(x); }

 private:
  Sheaf src_, tgt_;
  std::vector<GroupHom> at_;
};

// Sheaf with a left action of a finite group on every stalk, commuting with
// the restrictions (the group leaves the underlying space fixed).
class EquivariantSheaf {
 public:
  EquivariantSheaf(Sheaf base, FiniteGroup group,
                   const std::vector<std::vector<IntMatrix>>& action)
      : base_(std::move(base)), g_(std::move(group)) {
    std::size_t n = base_.site().size();
    if (action.size() != g_.size())
      throw ShapeError("one action layer per group element required");
    for (const auto& layer : action)
      if (layer.size() != n)
        throw ShapeError("one action matrix per point required");
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<IntMatrix> per_g;
      per_g.reserve(g_.size());
      for (std::size_t g = 0; g < g_.size(); ++g) per_g.push_back(action[g][x]);
      pm_.emplace_back(g_, base_.stalk(x), std::move(per_g));
    }
    for (std::size_t g = 0; g < g_.size(); ++g)
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (base_.site().lt(x, y) &&
              !(pm_[x].action_hom(g).then(base_.restriction(x, y)) -
                base_.restriction(x, y).then(pm_[y].action_hom(g)))
                   .is_zero())
            throw MathPrecondition("action does not commute with restriction " +
                                   base_.site().name(x) + "," +
                                   base_.site().name(y));
  }

  static EquivariantSheaf trivial_action(Sheaf base, const FiniteGroup& group) {
    std::vector<std::vector<IntMatrix>> a(group.size());
    for (std::size_t g = 0; g < group.size(); ++g)
      for (std::size_t x = 0; x < base.site().size(); ++x)
        a[g].push_back(IntMatrix::identity(base.stalk(x).ngens()));
    return EquivariantSheaf(std::move(base), group, a);
  }

  const Sheaf& underlying() const { return base_; }
  const PosetSite& site() const { return base_.site(); }
  const FiniteGroup& group() const { return g_; }
  const FgAbelianGroup& stalk(std::size_t x) const { return base_.stalk(x); }
  const GroupHom& restriction(std::size_t x, std::size_t y) const {
    return base_.restriction(x, y);
  }
  const GroupModule& point_module(std::size_t x) const { return pm_.at(x); }
  const GroupHom& action(std::size_t g, std::size_t x) const {
    return pm_.at(x).action_hom(g);
  }
  GroupElement act(std::size_t g, std::size_t x, const GroupElement& v) const {
    return pm_.at(x).act(g, v);
  }

 private:
  Sheaf base_;
  FiniteGroup g_;
  std::vector<GroupModule> pm_;
};

// Transition data for a principal twist: one group element per comparable
// pair, composing along chains (missing pairs default to the identity).
class GTorsorCocycle {
 public:
  GTorsorCocycle(PosetSite site, FiniteGroup group,
                 const std::map<std::pair<std::size_t, std::size_t>, std::size_t>&
                     transitions)
      : site_(std::move(site)), g_(std::move(group)) {
    std::size_t n = site_.size();
    for (const auto& [key, val] : transitions) {
      auto [x, y] = key;
      if (x >= n || y >= n) throw ShapeError("transition endpoint out of range");
      if (!site_.lt(x, y))
        throw ShapeError("transition for non-comparable pair " + site_.name(x) +
                         "," + site_.name(y));
      if (val >= g_.size()) throw ShapeError("transition element out of range");
      c_.emplace(key, val);
    }
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (site_.lt(x, y) && !c_.count({x, y}))
          c_.emplace(std::make_pair(x, y), g_.identity());
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (site_.lt(x, y))
          for (std::size_t z = 0; z < n; ++z)
            if (site_.lt(y, z) &&
                g_.mul(at(y, z), at(x, y)) != at(x, z))
              throw MathPrecondition("transitions do not compose along " +
                                     site_.name(x) + "," + site_.name(y) + "," +
                                     site_.name(z));
  }

  static GTorsorCocycle trivial(PosetSite site, FiniteGroup group) {
    return GTorsorCocycle(std::move(site), std::move(group), {});
  }

  const PosetSite& site() const { return site_; }
  const FiniteGroup& group() const { return g_; }
  std::size_t at(std::size_t x, std::size_t y) const {
    if (x == y) return g_.identity();
    auto it = c_.find({x, y});
    if (it == c_.end())
      throw ShapeError("transition requested for non-comparable pair " +
                       site_.name(x) + "," + site_.name(y));
    return it->second;
  }

 private:
  PosetSite site_;
  FiniteGroup g_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> c_;
};

// Cochain complex on strict chains: level q is the sum of F(top point) over
// all chains of q+1 points; the differential drops interior points with
// alternating signs and restricts along the final face.
class SiteComplex {
 public:
  SiteComplex(const Sheaf& f, std::optional<std::size_t> top = std::nullopt)
      : sheaf_(f) {
    const PosetSite& site = f.site();
    std::size_t hi = top.value_or(site.max_chain_degree());
    std::vector<FgAbelianGroup> levels;
    for (std::size_t q = 0; q <= hi; ++q) {
      const auto& ch = site.chains(q);
      chains_.push_back(ch);
      std::vector<FgAbelianGroup> parts;
      parts.reserve(ch.size());
      for (const auto& c : ch) parts.push_back(f.stalk(c.back()));
      DirectSum ds = direct_sum(parts);
      off_.push_back(ds.offset);
      levels.push_back(std::move(ds.group));
    }
    std::vector<GroupHom> diffs;
    for (std::size_t q = 0; q < hi; ++q) {
      IntMatrix m(levels[q].ngens(), levels[q + 1].ngens());
      for (std::size_t wi = 0; wi < chains_[q + 1].size(); ++wi) {
        const auto& w = chains_[q + 1][wi];
        std::size_t ow = off_[q + 1][wi];
        std::size_t kw = f.stalk(w.back()).ngens();
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
          auto u = w;
          u.erase(u.begin() + i);
          std::size_t ou = off_[q][site.chain_index(q, u)];
          Int s = (i % 2 == 0) ? 1 : -1;
          for (std::size_t l = 0; l < kw; ++l) m.at(ou + l, ow + l) += s;
        }
        auto u = w;
        u.pop_back();
        std::size_t ou = off_[q][site.chain_index(q, u)];
        Int s = (w.size() % 2 == 0) ? -1 : 1;  // (-1)^(q+1), size q+2
        const IntMatrix& r = f.restriction(w[w.size() - 2], w.back()).matrix();
        for (std::size_t a = 0; a < r.rows(); ++a)
          for (std::size_t b = 0; b < r.cols(); ++b)
            m.at(ou + a, ow + b) += s * r.at(a, b);
      }
      diffs.emplace_back(levels[q], levels[q + 1], std::move(m));
    }
    cx_.emplace(std::move(levels), std::move(diffs));
  }

  const CochainComplex& complex() const { return *cx_; }
  const Sheaf& sheaf() const { return sheaf_; }
  std::size_t top() const { return cx_->top_degree(); }
  std::size_t chain_count(std::size_t q) const { return chains_.at(q).size(); }
  const std::vector<std::size_t>& chain(std::size_t q, std::size_t i) const {
    return chains_.at(q).at(i);
  }
  std::size_t offset(std::size_t q, std::size_t i) const { return off_.at(q).at(i); }

  GroupElement cochain_from_values(std::size_t q,
                                   const std::vector<GroupElement>& vals) const {
    if (vals.size() != chain_count(q))
      throw ShapeError("one value per chain required");
    std::vector<Int> c(cx_->level(q).ngens(), Int(0));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const FgAbelianGroup& st = sheaf_.stalk(chains_[q][i].back());
      if (!vals[i].group().same_presentation(st))
        throw ShapeError("value lives in the wrong stalk");
      for (std::size_t j = 0; j < st.ngens(); ++j)
        c[off_[q][i] + j] = vals[i].coords()[j];
    }
    return cx_->level(q).element(std::move(c));
  }

  GroupElement value_at(std::size_t q, const GroupElement& cochain,
                        std::size_t i) const {
    if (!cochain.group().same_presentation(cx_->level(q)))
      throw ShapeError("cochain lives in the wrong level");
    const FgAbelianGroup& st = sheaf_.stalk(chains_.at(q).at(i).back());
    std::vector<Int> v(cochain.coords().begin() + off_[q][i],
                       cochain.coords().begin() + off_[q][i] + st.ngens());
    return st.element(std::move(v));
  }

 private:
  Sheaf sheaf_;
  std::optional<CochainComplex> cx_;
  std::vector<std::vector<std::vector<std::size_t>>> chains_;
  std::vector<std::vector<std::size_t>> off_;
};

inline SiteComplex site_complex(const Sheaf& f,
                                std::optional<std::size_t> top = std::nullopt) {
  return SiteComplex(f, top);
}

// Site complex of an equivariant sheaf together with the levelwise group
// action (block-diagonal over chains); the differentials are equivariant.
class EquivariantSiteComplex {
 public:
  explicit EquivariantSiteComplex(const EquivariantSheaf& a,
                                  std::optional<std::size_t> top = std::nullopt)
      : a_(a), sc_(a.underlying(), top) {
    for (std::size_t q = 0; q <= sc_.top(); ++q) {
      const FgAbelianGroup& lvl = sc_.complex().level(q);
      std::vector<IntMatrix> per_g;
      for (std::size_t g = 0; g < a_.group().size(); ++g) {
        IntMatrix m(lvl.ngens(), lvl.ngens());
        for (std::size_t i = 0; i < sc_.chain_count(q); ++i) {
          std::size_t o = sc_.offset(q, i);
          const IntMatrix& b = a_.action(g, sc_.chain(q, i).back()).matrix();
          for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t c = 0; c < b.cols(); ++c)
              m.at(o + r, o + c) = b.at(r, c);
        }
        per_g.push_back(std::move(m));
      }
      mod_.emplace_back(a_.group(), lvl, std::move(per_g));
    }
    for (std::size_t q = 0; q < sc_.top(); ++q)
      for (std::size_t g = 0; g < a_.group().size(); ++g)
        if (!(mod_[q].action_hom(g).then(sc_.complex().diff(q)) -
              sc_.complex().diff(q).then(mod_[q + 1].action_hom(g)))
                 .is_zero())
          throw MathPrecondition("differential is not equivariant at level " +
                                 std::to_string(q));
  }

  const SiteComplex& base() const { return sc_; }
  const EquivariantSheaf& sheaf() const { return a_; }
  const GroupModule& level_module(std::size_t q) const { return mod_.at(q); }
  GroupElement act(std::size_t g, std::size_t q, const GroupElement& c) const {
    return mod_.at(q).act(g, c);
  }

 private:
  EquivariantSheaf a_;
  SiteComplex sc_;
  std::vector<GroupModule> mod_;
};

// Compatible families over an up-closed set of points, presented as the
// kernel of the pairwise compatibility map inside the ambient direct sum.
struct SectionsResult {
  std::vector<std::size_t> points;   // sorted
  std::vector<std::size_t> offset;   // ambient offset per listed point
  FgAbelianGroup ambient;            // sum of the stalks over `points`
  FgAbelianGroup group;              // the sections group
  GroupHom incl;                     // group -> ambient
  std::vector<GroupHom> proj;        // group -> stalk(points[i])
};

inline SectionsResult sections(const Sheaf& f, std::vector<std::size_t> pts) {
  const PosetSite& site = f.site();
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    throw ShapeError("duplicate point in sections domain");
  for (auto p : pts)
    if (p >= site.size()) throw ShapeError("sections point out of range");
  if (auto gap = site.up_closure_gap(pts))
    throw MathPrecondition("sections domain is not up-closed: contains " +
                           site.name(gap->first) + " but not " +
                           site.name(gap->second));

  std::vector<FgAbelianGroup> parts;
  parts.reserve(pts.size());
  for (auto p : pts) parts.push_back(f.stalk(p));
  DirectSum amb = direct_sum(parts);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // indices into pts
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (site.lt(pts[i], pts[j])) pairs.emplace_back(i, j);
  std::vector<FgAbelianGroup> tparts;
  for (auto [i, j] : pairs) tparts.push_back(f.stalk(pts[j]));
  DirectSum tgt = direct_sum(tparts);

  IntMatrix m(amb.group.ngens(), tgt.group.ngens());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    const IntMatrix& r = f.restriction(pts[i], pts[j]).matrix();
    for (std::size_t a = 0; a < r.rows(); ++a)
      for (std::size_t b = 0; b < r.cols(); ++b)
        m.at(amb.offset[i] + a, tgt.offset[k] + b) += r.at(a, b);
    for (std::size_t b = 0; b < f.stalk(pts[j]).ngens(); ++b)
      m.at(amb.offset[j] + b, tgt.offset[k] + b) -= 1;
  }
  KernelResult ker = hom_kernel(GroupHom(amb.group, tgt.group, std::move(m)));

  std::vector<GroupHom> proj;
  for (std::size_t i = 0; i < pts.size(); ++i)
    proj.push_back(ker.incl.then(amb.proj[i]));
  return SectionsResult{std::move(pts),      amb.offset,
                        std::move(amb.group), std::move(ker.group),
                        std::move(ker.incl),  std::move(proj)};
}

// Global sections of an equivariant sheaf as a module over the group.
struct GlobalSectionsModule {
  SectionsResult sec;
  GroupModule module;
};

inline GlobalSectionsModule global_sections(const EquivariantSheaf& a) {
  std::vector<std::size_t> all(a.site().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  SectionsResult sec = sections(a.underlying(), all);
  SubgroupExpr expr(sec.group, sec.ambient, sec.incl);
  std::vector<IntMatrix> mats;
  for (std::size_t g = 0; g < a.group().size(); ++g) {
    IntMatrix big(sec.ambient.ngens(), sec.ambient.ngens());
    for (std::size_t i = 0; i < sec.points.size(); ++i) {
      const IntMatrix& b = a.action(g, sec.points[i]).matrix();
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
          big.at(sec.offset[i] + r, sec.offset[i] + c) = b.at(r, c);
    }
    IntMatrix rows(sec.group.ngens(), sec.group.ngens());
    for (std::size_t i = 0; i < sec.group.ngens(); ++i) {
      std::vector<Int> v = detail::row_times(sec.incl.matrix().row(i), big);
      auto c = expr.coords(v);
      if (!c)
        throw MathPrecondition("action does not preserve compatible families");
      rows.set_row(i, c->coords());
    }
    mats.push_back(std::move(rows));
  }
  GroupModule mod(a.group(), sec.group, std::move(mats));
  return GlobalSectionsModule{std::move(sec), std::move(mod)};
}

// Pointwise fixed subsheaf of an equivariant sheaf, with its inclusion.
struct InvariantsSheaf {
  Sheaf sheaf;
  SheafMorphism incl;  // into the underlying plain sheaf
};

inline InvariantsSheaf invariants_sheaf(const EquivariantSheaf& a) {
  const PosetSite& site = a.site();
  std::size_t n = site.size();
  std::size_t ng = a.group().size();
  std::vector<FgAbelianGroup> inv;
  std::vector<GroupHom> incl;
  for (std::size_t x = 0; x < n; ++x) {
    const FgAbelianGroup& st = a.stalk(x);
    if (ng == 1) {
      inv.push_back(st);
      incl.push_back(GroupHom::identity(st));
      continue;
    }
    std::vector<FgAbelianGroup> copies(ng - 1, st);
    DirectSum tgt = direct_sum(copies);
    IntMatrix m(st.ngens(), tgt.group.ngens());
    for (std::size_t g = 1; g < ng; ++g) {
      IntMatrix diff = a.action(g, x).matrix() - IntMatrix::identity(st.ngens());
      for (std::size_t r = 0; r < diff.rows(); ++r)
        for (std::size_t c = 0; c < diff.cols(); ++c)
          m.at(r, tgt.offset[g - 1] + c) = diff.at(r, c);
    }
    KernelResult k = hom_kernel(GroupHom(st, tgt.group, std::move(m)));
    inv.push_back(k.group);
    incl.push_back(k.incl);
  }
  std::map<std::pair<std::size_t, std::size_t>, IntMatrix> restr;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (site.lt(x, y)) {
        SubgroupExpr expr(inv[y], a.stalk(y), incl[y]);
        IntMatrix m(inv[x].ngens(), inv[y].ngens());
        for (std::size_t i = 0; i < inv[x].ngens(); ++i) {
          std::vector<Int> v = detail::row_times(
              incl[x].matrix().row(i), a.restriction(x, y).matrix());
          auto c = expr.coords(v);
          if (!c)
            throw MathPrecondition(
                "restriction does not preserve fixed elements");
          m.set_row(i, c->coords());
        }
        restr.emplace(std::make_pair(x, y), std::move(m));
      }
  Sheaf sh(site, inv, restr);
  std::vector<IntMatrix> mats;
  for (std::size_t x = 0; x < n; ++x) mats.push_back(incl[x].matrix());
  SheafMorphism mor(sh, a.underlying(), mats);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t g = 0; g < ng; ++g)
      if (!(mor.at(x).then(a.action(g, x)) - mor.at(x)).is_zero())
        throw MathPrecondition("fixed subsheaf is not fixed by the action");
  return InvariantsSheaf{std::move(sh), std::move(mor)};
}

// Sheaf of G-indexed tuples of E-values with transition-twisted restrictions
// and the left translation action: stalk E(x)^G, restriction
// (r f)_k = r_E(f_{k * c}), action (g f)_k = f_{g^-1 k}.
inline EquivariantSheaf internal_hom_torsor(const Sheaf& e,
                                            const GTorsorCocycle& m) {
  if (e.site() != m.site())
    throw ShapeError("sheaf and transition data live on different sites");
  const PosetSite& site = e.site();
  const FiniteGroup& g = m.group();
  std::size_t n = site.size(), ng = g.size();

  std::vector<FgAbelianGroup> stalks;
  std::vector<std::vector<std::size_t>> off(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<FgAbelianGroup> copies(ng, e.stalk(x));
    DirectSum ds = direct_sum(copies);
    off[x] = ds.offset;
    stalks.push_back(std::move(ds.group));
  }
  std::map<std::pair<std::size_t, std::size_t>, IntMatrix> restr;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (site.lt(x, y)) {
        const IntMatrix& r = e.restriction(x, y).matrix();
        std::size_t c = m.at(x, y);
        IntMatrix big(stalks[x].ngens(), stalks[y].ngens());
        for (std::size_t k = 0; k < ng; ++k) {
          // source coordinate k feeds target coordinate k * c^-1
          std::size_t t = g.mul(k, g.inv(c));
          for (std::size_t a = 0; a < r.rows(); ++a)
            for (std::size_t b = 0; b < r.cols(); ++b)
              big.at(off[x][k] + a, off[y][t] + b) = r.at(a, b);
        }
        restr.emplace(std::make_pair(x, y), std::move(big));
      }
  Sheaf base(site, stalks, restr);

  std::vector<std::vector<IntMatrix>> action(ng);
  for (std::size_t gg = 0; gg < ng; ++gg)
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t k = e.stalk(x).ngens();
      IntMatrix big(stalks[x].ngens(), stalks[x].ngens());
      for (std::size_t d = 0; d < ng; ++d) {
        std::size_t t = g.mul(gg, d);
        for (std::size_t l = 0; l < k; ++l) big.at(off[x][d] + l, off[x][t] + l) = 1;
      }
      action[gg].push_back(std::move(big));
    }
  return EquivariantSheaf(std::move(base), g, action);
}

// Plain sheaf with the same stalks as `b` but restrictions precomposed with
// the action of the transition element for each pair.
inline Sheaf contracted_product(const EquivariantSheaf& b,
                                const GTorsorCocycle& m) {
  if (b.site() != m.site())
    throw ShapeError("sheaf and transition data live on different sites");
  if (!(b.group() == m.group()))
    throw ShapeError("sheaf and transition data have different groups");
  const PosetSite& site = b.site();
  std::vector<FgAbelianGroup> stalks;
  for (std::size_t x = 0; x < site.size(); ++x) stalks.push_back(b.stalk(x));
  std::map<std::pair<std::size_t, std::size_t>, IntMatrix> restr;
  for (std::size_t x = 0; x < site.size(); ++x)
    for (std::size_t y = 0; y < site.size(); ++y)
      if (site.lt(x, y))
        restr.emplace(std::make_pair(x, y),
                      b.action(m.at(x, y), x).matrix() *
                          b.restriction(x, y).matrix());
  return Sheaf(site, std::move(stalks), restr);
}

// Evaluation at the identity coordinate: contracting the tuple sheaf of E
// against the same transition data comes back to E.
inline SheafMorphism torsor_counit(const Sheaf& e, const GTorsorCocycle& m) {
  EquivariantSheaf em = internal_hom_torsor(e, m);
  Sheaf src = contracted_product(em, m);
  std::vector<IntMatrix> maps;
  for (std::size_t x = 0; x < e.site().size(); ++x) {
    std::size_t k = e.stalk(x).ngens();
    IntMatrix mm(src.stalk(x).ngens(), k);
    for (std::size_t l = 0; l < k; ++l) mm.at(l, l) = 1;  // identity block first
    maps.push_back(std::move(mm));
  }
  return SheafMorphism(std::move(src), e, maps);
}

// Monotone map of posets.
struct PosetMap {
  PosetSite src, tgt;
  std::vector<std::size_t> to;

  PosetMap(PosetSite s, PosetSite t, std::vector<std::size_t> m)
      : src(std::move(s)), tgt(std::move(t)), to(std::move(m)) {
    if (to.size() != src.size()) throw ShapeError("one image per point required");
    for (auto v : to)
      if (v >= tgt.size()) throw ShapeError("map image out of range");
    for (std::size_t x = 0; x < src.size(); ++x)
      for (std::size_t y = 0; y < src.size(); ++y)
        if (src.lt(x, y) && !tgt.leq(to[x], to[y]))
          throw MathPrecondition("map is not monotone on " + src.name(x) + "," +
                                 src.name(y));
  }
  std::size_t operator()(std::size_t x) const { return to.at(x); }
};

// Group of monotone automorphisms of the source commuting with a projection.
struct DeckAction {
  PosetMap proj;
  FiniteGroup group;
  std::vector<std::vector<std::size_t>> perm;  // perm[g][x]

  DeckAction(PosetMap p, FiniteGroup g, std::vector<std::vector<std::size_t>> ps)
      : proj(std::move(p)), group(std::move(g)), perm(std::move(ps)) {
    std::size_t n = proj.src.size();
    if (perm.size() != group.size())
      throw ShapeError("one permutation per group element required");
    for (const auto& pm : perm) {
      if (pm.size() != n) throw ShapeError("permutation size mismatch");
      std::vector<bool> hit(n, false);
      for (auto v : pm) {
        if (v >= n) throw ShapeError("permutation value out of range");
        hit[v] = true;
      }
      if (std::find(hit.begin(), hit.end(), false) != hit.end())
        throw MathPrecondition("deck map is not a bijection");
    }
    for (std::size_t x = 0; x < n; ++x)
      if (perm[group.identity()][x] != x)
        throw MathPrecondition("identity deck map must fix every point");
    for (std::size_t g = 0; g < group.size(); ++g) {
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (proj.src.lt(x, y) && !proj.src.lt(perm[g][x], perm[g][y]))
            throw MathPrecondition("deck map is not monotone");
      for (std::size_t x = 0; x < n; ++x)
        if (proj.to[perm[g][x]] != proj.to[x])
          throw MathPrecondition("deck map does not preserve fibers");
      for (std::size_t h = 0; h < group.size(); ++h)
        for (std::size_t x = 0; x < n; ++x)
          if (perm[g][perm[h][x]] != perm[group.mul(g, h)][x])
            throw MathPrecondition("deck maps do not compose as a left action");
    }
  }
};

// Direct image: the stalk at a base point is the sections of F over the
// preimage of its up-set; restrictions forget the extra points.
struct Pushforward {
  Sheaf sheaf;
  std::vector<SectionsResult> stalk_sections;  // per base point
};

inline Pushforward pushforward(const PosetMap& pi, const Sheaf& f) {
  if (!(f.site() == pi.src))
    throw ShapeError("sheaf does not live on the map source");
  const PosetSite& base = pi.tgt;
  std::vector<SectionsResult> secs;
  for (std::size_t b = 0; b < base.size(); ++b) {
    std::vector<std::size_t> pre;
    for (std::size_t t = 0; t < pi.src.size(); ++t)
      if (base.leq(b, pi(t))) pre.push_back(t);
    secs.push_back(sections(f, std::move(pre)));
  }
  std::vector<FgAbelianGroup> stalks;
  for (const auto& s : secs) stalks.push_back(s.group);
  std::map<std::pair<std::size_t, std::size_t>, IntMatrix> restr;
  for (std::size_t x = 0; x < base.size(); ++x)
    for (std::size_t y = 0; y < base.size(); ++y)
      if (base.lt(x, y)) {
        const SectionsResult& sx = secs[x];
        const SectionsResult& sy = secs[y];
        SubgroupExpr expr(sy.group, sy.ambient, sy.incl);
        IntMatrix m(sx.group.ngens(), sy.group.ngens());
        for (std::size_t i = 0; i < sx.group.ngens(); ++i) {
          std::vector<Int> amb(sy.ambient.ngens(), Int(0));
          for (std::size_t k = 0; k < sy.points.size(); ++k) {
            std::size_t p = sy.points[k];
            std::size_t kx =
                std::lower_bound(sx.points.begin(), sx.points.end(), p) -
                sx.points.begin();
            for (std::size_t l = 0; l < f.stalk(p).ngens(); ++l)
              amb[sy.offset[k] + l] = sx.incl.matrix().at(i, sx.offset[kx] + l);
          }
          auto c = expr.coords(amb);
          if (!c)
            throw MathPrecondition("restricted family is not compatible");
          m.set_row(i, c->coords());
        }
        restr.emplace(std::make_pair(x, y), std::move(m));
      }
  Sheaf sh(base, std::move(stalks), restr);
  return Pushforward{std::move(sh), std::move(secs)};
}

// Direct image with the deck-induced action.  `transport[g][x]` carries
// F(x) to F(g.x); omit it when all stalks share one presentation and the
// identity matrix is the intended transport (constant-like sheaves).
inline EquivariantSheaf equivariant_pushforward(
    const DeckAction& deck, const Sheaf& f,
    std::optional<std::vector<std::vector<IntMatrix>>> transport = std::nullopt) {
  const PosetSite& tot = deck.proj.src;
  std::size_t n = tot.size(), ng = deck.group.size();
  if (!(f.site() == tot))
    throw ShapeError("sheaf does not live on the covering poset");

  std::vector<std::vector<GroupHom>> tr(ng);
  for (std::size_t g = 0; g < ng; ++g)
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t gx = deck.perm[g][x];
      IntMatrix m = transport ? (*transport).at(g).at(x)
                              : IntMatrix::identity(f.stalk(x).ngens());
      tr[g].emplace_back(f.stalk(x), f.stalk(gx), std::move(m));
    }
  for (std::size_t x = 0; x < n; ++x)
    if (!(tr[deck.group.identity()][x] - GroupHom::identity(f.stalk(x))).is_zero())
      throw MathPrecondition("identity transport must be the identity");
  for (std::size_t g = 0; g < ng; ++g)
    for (std::size_t h = 0; h < ng; ++h)
      for (std::size_t x = 0; x < n; ++x)
        if (!(tr[h][x].then(tr[g][deck.perm[h][x]]) -
              tr[deck.group.mul(g, h)][x])
                 .is_zero())
          throw MathPrecondition("stalk transport does not compose");
  for (std::size_t g = 0; g < ng; ++g)
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (tot.lt(x, y) &&
            !(tr[g][x].then(f.restriction(deck.perm[g][x], deck.perm[g][y])) -
              f.restriction(x, y).then(tr[g][y]))
                 .is_zero())
          throw MathPrecondition("stalk transport does not commute with restrictions");

  Pushforward pf = pushforward(deck.proj, f);
  const PosetSite& base = deck.proj.tgt;
  std::vector<std::vector<IntMatrix>> action(ng);
  for (std::size_t g = 0; g < ng; ++g)
    for (std::size_t b = 0; b < base.size(); ++b) {
      const SectionsResult& sec = pf.stalk_sections[b];
      SubgroupExpr expr(sec.group, sec.ambient, sec.incl);
      std::size_t ginv = deck.group.inv(g);
      IntMatrix m(sec.group.ngens(), sec.group.ngens());
      for (std::size_t i = 0; i < sec.group.ngens(); ++i) {
        std::vector<Int> amb(sec.ambient.ngens(), Int(0));
        for (std::size_t k = 0; k < sec.points.size(); ++k) {
          std::size_t t = sec.points[k];
          std::size_t s = deck.perm[ginv][t];  // value at t comes from g^-1 t
          std::size_t ks =
              std::lower_bound(sec.points.begin(), sec.points.end(), s) -
              sec.points.begin();
          const IntMatrix& tm = tr[g][s].matrix();
          for (std::size_t a = 0; a < tm.rows(); ++a)
            for (std::size_t c = 0; c < tm.cols(); ++c)
              amb[sec.offset[k] + c] +=
                  sec.incl.matrix().at(i, sec.offset[ks] + a) * tm.at(a, c);
        }
        auto c = expr.coords(amb);
        if (!c)
          throw MathPrecondition("deck action does not preserve compatible families");
        m.set_row(i, c->coords());
      }
      action[g].push_back(std::move(m));
    }
  return EquivariantSheaf(std::move(pf.sheaf), deck.group, action);
}

// Per-point group cohomology of the stalks in one degree.
struct LocalVanishing {
  std::size_t degree = 0;
  std::vector<bool> vanishes;
  std::vector<std::string> group_at;  // rendered cohomology per point
  bool all = true;
};

inline LocalVanishing stalkwise_local_vanishing(const EquivariantSheaf& a,
                                                std::size_t degree) {
  if (degree == 0) throw ShapeError("vanishing degree must be positive");
  LocalVanishing out;
  out.degree = degree;
  for (std::size_t x = 0; x < a.site().size(); ++x) {
    FgAbelianGroup h = group_cohomology(a.point_module(x), degree);
    out.vanishes.push_back(h.is_trivial());
    out.group_at.push_back(h.to_string());
    if (!h.is_trivial()) out.all = false;
  }
  return out;
}

// Levelwise block maps induced by a pointwise morphism; a chain map.
inline std::vector<GroupHom> induced_cochain_maps(const SheafMorphism& f,
                                                  const SiteComplex& src,
                                                  const SiteComplex& tgt) {
  if (!(f.src().site() == src.sheaf().site()) || src.top() != tgt.top())
    throw ShapeError("complexes do not match the morphism");
  std::vector<GroupHom> maps;
  for (std::size_t q = 0; q <= src.top(); ++q) {
    IntMatrix m(src.complex().level(q).ngens(), tgt.complex().level(q).ngens());
    for (std::size_t i = 0; i < src.chain_count(q); ++i) {
      const IntMatrix& b = f.at(src.chain(q, i).back()).matrix();
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
          m.at(src.offset(q, i) + r, tgt.offset(q, i) + c) = b.at(r, c);
    }
    maps.emplace_back(src.complex().level(q), tgt.complex().level(q), std::move(m));
  }
  for (std::size_t q = 0; q < src.top(); ++q)
    if (!(maps[q].then(tgt.complex().diff(q)) -
          src.complex().diff(q).then(maps[q + 1]))
             .is_zero())
      throw MathPrecondition("induced maps do not commute with differentials");
  return maps;
}

inline GroupHom induced_on_cohomology(const SheafMorphism& f,
                                      const SiteComplex& src,
                                      const SiteComplex& tgt,
                                      std::size_t degree) {
  std::vector<GroupHom> maps = induced_cochain_maps(f, src, tgt);
  const CohomologyGroup& hs = src.complex().cohomology(degree);
  const CohomologyGroup& ht = tgt.complex().cohomology(degree);
  IntMatrix m(hs.group().ngens(), ht.group().ngens());
  for (std::size_t i = 0; i < hs.group().ngens(); ++i) {
    GroupElement img = maps[degree].apply(hs.rep_of(hs.group().generator(i)));
    m.set_row(i, ht.class_of(img).coords());
  }
  return GroupHom(hs.group(), ht.group(), std::move(m));
}

// Action induced on site cohomology in one degree.
inline GroupModule cohomology_action(const EquivariantSiteComplex& ec,
                                     std::size_t degree) {
  const CohomologyGroup& h = ec.base().complex().cohomology(degree);
  std::vector<IntMatrix> mats;
  for (std::size_t g = 0; g < ec.sheaf().group().size(); ++g) {
    IntMatrix m(h.group().ngens(), h.group().ngens());
    for (std::size_t i = 0; i < h.group().ngens(); ++i) {
      GroupElement img = ec.act(g, degree, h.rep_of(h.group().generator(i)));
      m.set_row(i, h.class_of(img).coords());
    }
    mats.push_back(std::move(m));
  }
  return GroupModule(ec.sheaf().group(), h.group(), std::move(mats));
}

}  // namespace poscoh
