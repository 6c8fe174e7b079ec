#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poscoh/abgroup.hpp"
#include "poscoh/chaincx.hpp"
#include "poscoh/descent.hpp"
#include "poscoh/gcoh.hpp"
#include "poscoh/intmat.hpp"
#include "poscoh/possite.hpp"

// Group cochains valued in site cochains, assembled into a double complex.
// The six connecting maps between low-degree cohomology of the fixed
// subsheaf, the full equivariant sheaf, and the acting group are implemented
// as explicit cochain chases whose witnesses are returned alongside the
// classes; exactness_report checks image = kernel at each node, and
// hs_low_degree_compare matches total cohomology against a plain sheaf.

namespace poscoh {

// Degree-2 input over the fixed subsheaf fails to trivialize over the full
// sheaf, so the connecting chase cannot start.
struct NotInKernel : MathPrecondition {
  using MathPrecondition::MathPrecondition;
};

namespace detail {

// Slice one block out of a direct-sum coordinate vector.
inline GroupElement block_value(const FgAbelianGroup& part,
                                const GroupElement& c, std::size_t idx) {
  std::size_t k = part.ngens();
  std::vector<Int> v(c.coords().begin() + idx * k,
                     c.coords().begin() + (idx + 1) * k);
  return part.element(std::move(v));
}

inline std::string coords_str(const GroupElement& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.coords().size(); ++i) {
    if (i) s += ", ";
    s += v.coords()[i].str();
  }
  return s + ")";
}

// Joint fixed points of the action, as a subgroup of the module.
inline KernelResult module_invariants(const GroupModule& mod) {
  const FgAbelianGroup& m = mod.module();
  std::size_t n = mod.group().size();
  std::vector<FgAbelianGroup> parts;
  for (std::size_t g = 1; g < n; ++g) parts.push_back(m);
  DirectSum tgt = direct_sum(parts);
  IntMatrix st(m.ngens(), tgt.group.ngens());
  for (std::size_t g = 1; g < n; ++g) {
    IntMatrix d = (mod.action_hom(g) - GroupHom::identity(m)).matrix();
    for (std::size_t i = 0; i < d.rows(); ++i)
      for (std::size_t j = 0; j < d.cols(); ++j)
        st.at(i, tgt.offset[g - 1] + j) = d.at(i, j);
  }
  return hom_kernel(GroupHom(m, tgt.group, std::move(st)));
}

}  // namespace detail

// --- the double complex -----------------------------------------------------

// K^{p,q} = group p-cochains valued in site q-cochains.  Horizontal maps are
// the bar differentials, vertical maps apply the site differential in every
// group-tuple slot; the site direction is padded to degree >= 2 so that the
// degree-2 chases below always have a home.
class LowDegreeComplex {
 public:
  explicit LowDegreeComplex(const EquivariantSheaf& a,
                            std::size_t group_levels = 4)
      : ptop_(group_levels),
        ec_(a, std::max<std::size_t>(a.site().max_chain_degree(), 2)) {
    if (group_levels < 2)
      throw ShapeError("group direction needs at least two levels");
  }

  const EquivariantSiteComplex& site() const { return ec_; }
  std::size_t group_levels() const { return ptop_; }
  std::size_t site_levels() const { return ec_.base().top(); }

  const DoubleComplex& double_complex() const {
    ensure_double();
    return *dc_;
  }

  const TotalComplex& total() const {
    ensure_double();
    if (!tot_) tot_ = total_complex(*dc_);
    return *tot_;
  }

  const CohomologyGroup& total_cohomology(std::size_t n) const {
    return total().cx.cohomology(n);
  }

  // H^p of row q: group cohomology of the module of site q-cochains
  const CohomologyGroup& row_cohomology(std::size_t q, std::size_t p) const {
    ensure_double();
    return rows_.at(q).complex().cohomology(p);
  }

  // H^q of column p: componentwise site cohomology
  const CohomologyGroup& column_cohomology(std::size_t p, std::size_t q) const {
    ensure_double();
    if (cols_.empty()) cols_.resize(ptop_ + 1);
    if (!cols_.at(p)) {
      std::size_t qtop = ec_.base().top();
      std::vector<FgAbelianGroup> levels;
      std::vector<GroupHom> diffs;
      for (std::size_t j = 0; j <= qtop; ++j) levels.push_back(dc_->at(p, j));
      for (std::size_t j = 0; j < qtop; ++j) diffs.push_back(dc_->dv(p, j));
      cols_[p].emplace(std::move(levels), std::move(diffs));
    }
    return cols_.at(p)->cohomology(q);
  }

  // group cohomology of the action induced on site cohomology
  FgAbelianGroup e2_term(std::size_t group_deg, std::size_t site_deg) const {
    if (site_deg > ec_.base().top()) return FgAbelianGroup();
    return group_cohomology(cohomology_action(ec_, site_deg), group_deg);
  }

 private:
  void ensure_double() const {
    if (dc_) return;
    std::size_t qtop = ec_.base().top();
    std::size_t n = ec_.sheaf().group().size();
    rows_.reserve(qtop + 1);
    for (std::size_t q = 0; q <= qtop; ++q)
      rows_.emplace_back(ec_.level_module(q), ptop_);
    std::vector<std::vector<FgAbelianGroup>> k(ptop_ + 1);
    std::vector<std::vector<GroupHom>> dh(ptop_), dv(ptop_ + 1);
    for (std::size_t p = 0; p <= ptop_; ++p)
      for (std::size_t q = 0; q <= qtop; ++q)
        k[p].push_back(rows_[q].complex().level(p));
    for (std::size_t p = 0; p < ptop_; ++p)
      for (std::size_t q = 0; q <= qtop; ++q)
        dh[p].push_back(rows_[q].complex().diff(p));
    for (std::size_t p = 0; p <= ptop_; ++p) {
      std::size_t copies = 1;
      for (std::size_t i = 0; i < p; ++i) copies *= n;
      for (std::size_t q = 0; q < qtop; ++q) {
        const IntMatrix& d = ec_.base().complex().diff(q).matrix();
        IntMatrix m(copies * d.rows(), copies * d.cols());
        for (std::size_t t = 0; t < copies; ++t)
          for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j)
              m.at(t * d.rows() + i, t * d.cols() + j) = d.at(i, j);
        dv[p].emplace_back(k[p][q], k[p][q + 1], std::move(m));
      }
    }
    dc_.emplace(std::move(k), std::move(dh), std::move(dv));
  }

  std::size_t ptop_;
  EquivariantSiteComplex ec_;
  mutable std::vector<BarComplex> rows_;
  mutable std::optional<DoubleComplex> dc_;
  mutable std::optional<TotalComplex> tot_;
  mutable std::vector<std::optional<CochainComplex>> cols_;
};

// --- the six connecting maps ------------------------------------------------

// Starting map: a group 1-cocycle valued in global sections descends to a
// degree-1 cocycle over the fixed subsheaf by solving, at every point,
// rho_g(s_x) + a_g|_x = s_x and taking t(x<=y) = s_y - r(s_x).
struct Theta1Result {
  std::optional<GroupElement> cocycle;           // over the fixed subsheaf
  std::optional<GroupElement> cohomology_class;  // its degree-1 class there
  std::optional<GroupElement> sections;          // the solved s as a 0-cochain
  std::vector<std::size_t> failed_points;
  std::vector<GroupElement> point_classes;  // local obstruction per failure
};

inline Theta1Result theta1(const EquivariantSiteComplex& ec,
                           const GroupElement& a) {
  detail::SectionsContext sc(ec);
  std::size_t n = ec.sheaf().group().size();
  BarComplex bar(sc.gs.module, 2);
  if (!a.group().same_presentation(bar.complex().level(1)))
    throw ShapeError("input does not live in group degree 1 over the sections");
  if (!bar.complex().diff(1).apply(a).is_zero())
    throw MathPrecondition("input is not a group cocycle");

  TorsorLift lift{ec.base().complex().level(1).zero(), {}};
  for (std::size_t g = 0; g < n; ++g)
    lift.cobounding.push_back(sc.to_level0(bar.value_at(1, a, {g})));
  FixedPointResult fp = fixed_point_torsor(ec, lift);

  Theta1Result out;
  out.failed_points = std::move(fp.failed_points);
  out.point_classes = std::move(fp.point_classes);
  out.sections = std::move(fp.sections);
  if (!fp.cocycle) return out;
  InvariantsSheaf inv = invariants_sheaf(ec.sheaf());
  SiteComplex isc(inv.sheaf, ec.base().top());
  out.cohomology_class = isc.complex().cohomology(1).class_of(*fp.cocycle);
  out.cocycle = std::move(fp.cocycle);
  return out;
}

// Obstruction to descending a stable degree-1 class, computed twice: once by
// the lift-and-cobound route and once as a chase through the double complex.
// Both cocycles and both classes are returned so callers can compare.
struct Theta3Result {
  GroupElement cocycle;           // group 2-cocycle over sections (lift route)
  GroupElement cohomology_class;  // its class
  GroupElement chase_cocycle;     // same data chased through the double complex
  GroupElement chase_class;
  TorsorLift lift;
  GroupElement chase_witness;  // preimage solved in bidegree (1,0)
};

inline Theta3Result theta3(const LowDegreeComplex& ldc, const GroupElement& t) {
  const EquivariantSiteComplex& ec = ldc.site();
  TorsorLiftSearch s = find_torsor_lift(ec, t);
  if (!s.lift)
    throw MathPrecondition("class moves under group element " +
                           std::to_string(*s.moving_g));
  ObstructionResult chi = torsor_obstruction(ec, *s.lift);

  const DoubleComplex& dc = ldc.double_complex();
  GroupElement t01 = dc.at(0, 1).element(t.coords());
  GroupElement h = dc.dh(0, 1).apply(t01);
  MembershipWitness pre = solve_image_membership(dc.dv(1, 0), h);
  if (!pre.in_image)
    throw MathPrecondition("twisted cocycle is not vertically exact");
  GroupElement b = *pre.preimage;
  GroupElement top = dc.dh(1, 0).apply(b);

  detail::SectionsContext sc(ec);
  std::size_t n = ec.sheaf().group().size();
  const FgAbelianGroup& lvl0 = ec.base().complex().level(0);
  BarComplex bar(sc.gs.module, 3);
  std::vector<GroupElement> vals;
  vals.reserve(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    auto v = sc.to_sections(detail::block_value(lvl0, top, i));
    if (!v) throw MathPrecondition("chase value is not a global section");
    vals.push_back(*v);
  }
  GroupElement cz = bar.cochain_from_values(2, vals);
  GroupElement ccls = bar.complex().cohomology(2).class_of(cz);
  return Theta3Result{chi.cocycle,         chi.cohomology_class,
                      std::move(cz),       std::move(ccls),
                      std::move(*s.lift),  std::move(b)};
}

// Two-stage zig-zag from a group 2-cocycle valued in sections to a degree-2
// cocycle over the fixed subsheaf: solve the class away pointwise, match the
// solutions across covering relations, and assemble the mismatch.
struct Theta4Result {
  std::optional<GroupElement> cocycle;           // over the fixed subsheaf
  std::optional<GroupElement> cohomology_class;  // its degree-2 class there
  std::vector<GroupElement> beta;   // per point, group 1-cochain witness
  std::vector<GroupElement> gamma;  // per degree-1 chain, matching element
  std::vector<std::size_t> failed_points;
  std::vector<GroupElement> point_classes;  // local degree-2 obstruction
  std::vector<std::size_t> failed_pairs;    // degree-1 chain indices
  std::vector<GroupElement> pair_classes;   // local degree-1 obstruction
};

inline Theta4Result theta4(const EquivariantSiteComplex& ec,
                           const GroupElement& alpha) {
  if (ec.base().top() < 2)
    throw ShapeError("chase needs the site complex padded to degree 2");
  detail::SectionsContext sc(ec);
  const FiniteGroup& grp = ec.sheaf().group();
  std::size_t n = grp.size();
  BarComplex bar(sc.gs.module, 3);
  if (!alpha.group().same_presentation(bar.complex().level(2)))
    throw ShapeError("input does not live in group degree 2 over the sections");
  if (!bar.complex().diff(2).apply(alpha).is_zero())
    throw MathPrecondition("input is not a group cocycle");

  const SiteComplex& base = ec.base();
  const Sheaf& sh = ec.sheaf().underlying();
  std::size_t npts = sh.site().size();
  Theta4Result out;

  auto value_at_point = [&](const GroupElement& s, std::size_t x) {
    return base.value_at(0, sc.to_level0(s), x);
  };

  std::vector<std::optional<GroupElement>> beta(npts);
  for (std::size_t x = 0; x < npts; ++x) {
    BarComplex pb(ec.sheaf().point_module(x), 3);
    std::vector<GroupElement> av;
    av.reserve(n * n);
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h)
        av.push_back(value_at_point(bar.value_at(2, alpha, {g, h}), x));
    GroupElement ax = pb.cochain_from_values(2, av);
    auto sol = pb.complex().solve_coboundary(2, ax);
    if (!sol.is_coboundary) {
      out.failed_points.push_back(x);
      out.point_classes.push_back(pb.complex().cohomology(2).class_of(ax));
      continue;
    }
    beta[x] = *sol.witness;
  }
  if (!out.failed_points.empty()) return out;
  for (std::size_t x = 0; x < npts; ++x) out.beta.push_back(*beta[x]);

  std::size_t pairs = base.chain_count(1);
  std::vector<std::optional<GroupElement>> gamma(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& ch = base.chain(1, i);
    std::size_t x = ch[0], y = ch[1];
    BarComplex pb(ec.sheaf().point_module(y), 2);
    const GroupHom& r = sh.restriction(x, y);
    std::vector<GroupElement> vv;
    vv.reserve(n);
    for (std::size_t g = 0; g < n; ++g)
      vv.push_back(detail::block_value(sh.stalk(y), *beta[y], g) -
                   r.apply(detail::block_value(sh.stalk(x), *beta[x], g)));
    GroupElement v = pb.cochain_from_values(1, vv);
    auto sol = pb.complex().solve_coboundary(1, v);
    if (!sol.is_coboundary) {
      out.failed_pairs.push_back(i);
      out.pair_classes.push_back(pb.complex().cohomology(1).class_of(v));
      continue;
    }
    gamma[i] = sh.stalk(y).element(sol.witness->coords());
  }
  if (!out.failed_pairs.empty()) return out;
  for (std::size_t i = 0; i < pairs; ++i) out.gamma.push_back(*gamma[i]);

  // the assembled values are the site differential of gamma, evaluated over
  // the full sheaf, so they are d-closed and invariant
  InvariantsSheaf inv = invariants_sheaf(ec.sheaf());
  SiteComplex isc(inv.sheaf, base.top());
  const PosetSite& site = sh.site();
  std::vector<GroupElement> mvals;
  for (std::size_t i = 0; i < base.chain_count(2); ++i) {
    const auto& w = base.chain(2, i);
    std::size_t x = w[0], y = w[1], z = w[2];
    GroupElement val =
        *gamma[site.chain_index(1, {y, z})] -
        *gamma[site.chain_index(1, {x, z})] +
        sh.restriction(y, z).apply(*gamma[site.chain_index(1, {x, y})]);
    SubgroupExpr ex(inv.sheaf.stalk(z), sh.stalk(z), inv.incl.at(z));
    auto c = ex.coords(val.coords());
    if (!c) throw MathPrecondition("assembled value is not invariant");
    mvals.push_back(*c);
  }
  GroupElement mbar = isc.cochain_from_values(2, mvals);
  out.cohomology_class = isc.complex().cohomology(2).class_of(mbar);
  out.cocycle = std::move(mbar);
  return out;
}

// A degree-2 cocycle over the fixed subsheaf that dies over the full sheaf
// yields a group 1-cocycle valued in degree-1 classes: y_g = [rho_g(n) - n]
// for any witness n trivializing the embedded cocycle.
struct Theta5Result {
  GroupElement cocycle;           // valued in the degree-1 class module
  GroupElement cohomology_class;  // group degree-1 class of that cocycle
  GroupElement witness;           // n with d n = embedded input
};

inline Theta5Result theta5(const EquivariantSiteComplex& ec,
                           const GroupElement& mbar) {
  if (ec.base().top() < 2)
    throw ShapeError("chase needs the site complex padded to degree 2");
  InvariantsSheaf inv = invariants_sheaf(ec.sheaf());
  SiteComplex isc(inv.sheaf, ec.base().top());
  if (!mbar.group().same_presentation(isc.complex().level(2)))
    throw ShapeError("input does not live in degree 2 over the fixed subsheaf");
  if (!isc.complex().cohomology(2).is_cocycle(mbar))
    throw MathPrecondition("input is not a cocycle");

  std::vector<GroupHom> emb = induced_cochain_maps(inv.incl, isc, ec.base());
  GroupElement im = emb[2].apply(mbar);
  auto sol = ec.base().complex().solve_coboundary(2, im);
  if (!sol.is_coboundary)
    throw NotInKernel("input does not trivialize over the full sheaf");
  GroupElement nw = *sol.witness;

  GroupModule hmod = cohomology_action(ec, 1);
  const CohomologyGroup& h1 = ec.base().complex().cohomology(1);
  BarComplex hbar(hmod, 2);
  std::size_t n = ec.sheaf().group().size();
  std::vector<GroupElement> yv;
  yv.reserve(n);
  for (std::size_t g = 0; g < n; ++g)
    yv.push_back(h1.class_of(twist(ec, g, 1, nw) - nw));
  GroupElement y = hbar.cochain_from_values(1, yv);
  GroupElement cls = hbar.complex().cohomology(1).class_of(y);
  return Theta5Result{std::move(y), std::move(cls), std::move(nw)};
}

// End map: a group 1-cocycle valued in degree-1 classes picks cocycle
// representatives n_g, cobounds their pairwise defects by u_{g,h}, and the
// alternating sum of the u values is a group 3-cocycle valued in sections.
struct Theta6Result {
  GroupElement cocycle;                          // group 3-cocycle over sections
  std::optional<GroupElement> cohomology_class;  // filled in by theta6
  std::vector<GroupElement> reps;                // chosen n_g
  std::vector<std::vector<GroupElement>> connecting;  // chosen u_{g,h}
};

inline Theta6Result theta6_cochain(const EquivariantSiteComplex& ec,
                                   const GroupElement& y) {
  detail::SectionsContext sc(ec);
  const FiniteGroup& grp = ec.sheaf().group();
  std::size_t n = grp.size();
  GroupModule hmod = cohomology_action(ec, 1);
  BarComplex hbar(hmod, 2);
  if (!y.group().same_presentation(hbar.complex().level(1)))
    throw ShapeError("input does not live in group degree 1 over the classes");
  GroupElement dy = hbar.complex().diff(1).apply(y);
  if (!dy.is_zero())
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h)
        if (!hbar.value_at(2, dy, {g, h}).is_zero())
          throw MathPrecondition("cocycle condition fails at pair (" +
                                 std::to_string(g) + ", " + std::to_string(h) +
                                 ")");

  const CohomologyGroup& h1 = ec.base().complex().cohomology(1);
  std::vector<GroupElement> reps;
  reps.reserve(n);
  for (std::size_t g = 0; g < n; ++g)
    reps.push_back(h1.rep_of(hbar.value_at(1, y, {g})));

  std::vector<std::vector<GroupElement>> u(n);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      GroupElement defect =
          twist(ec, g, 1, reps[h]) - reps[grp.mul(g, h)] + reps[g];
      auto s = ec.base().complex().solve_coboundary(1, defect);
      if (!s.is_coboundary)
        throw MathPrecondition("representative defect fails to trivialize");
      u[g].push_back(*s.witness);
    }

  std::vector<GroupElement> kv;
  kv.reserve(n * n * n);
  for (std::size_t g1 = 0; g1 < n; ++g1)
    for (std::size_t g2 = 0; g2 < n; ++g2)
      for (std::size_t g3 = 0; g3 < n; ++g3) {
        GroupElement val = twist(ec, g1, 0, u[g2][g3]) -
                           u[grp.mul(g1, g2)][g3] +
                           u[g1][grp.mul(g2, g3)] - u[g1][g2];
        auto s = sc.to_sections(val);
        if (!s)
          throw MathPrecondition("assembled value is not a global section");
        kv.push_back(*s);
      }
  GroupElement kappa =
      BarComplex(sc.gs.module, 3).cochain_from_values(3, kv);
  return Theta6Result{std::move(kappa), std::nullopt, std::move(reps),
                      std::move(u)};
}

inline Theta6Result theta6(const EquivariantSiteComplex& ec,
                           const GroupElement& y) {
  Theta6Result out = theta6_cochain(ec, y);
  detail::SectionsContext sc(ec);
  BarComplex bar(sc.gs.module, 4);
  out.cohomology_class = bar.complex().cohomology(3).class_of(
      bar.complex().level(3).element(out.cocycle.coords()));
  return out;
}

// --- exactness at the six nodes ---------------------------------------------

namespace detail {

// Restriction of group classes over the sections to group classes over each
// stalk, bundled as one hom into the direct sum of the local groups.
struct PointwiseClasses {
  std::vector<FgAbelianGroup> point_groups;
  DirectSum sum;
  GroupHom hom;  // node group -> sum of the local class groups
};

inline PointwiseClasses pointwise_classes(const EquivariantSiteComplex& ec,
                                          const SectionsContext& sc,
                                          const BarComplex& bar,
                                          const CohomologyGroup& node,
                                          std::size_t deg) {
  std::size_t n = ec.sheaf().group().size();
  std::size_t npts = ec.sheaf().site().size();
  std::vector<BarComplex> pbs;
  pbs.reserve(npts);
  for (std::size_t x = 0; x < npts; ++x)
    pbs.emplace_back(ec.sheaf().point_module(x), deg + 1);
  std::vector<FgAbelianGroup> pgs;
  for (std::size_t x = 0; x < npts; ++x)
    pgs.push_back(pbs[x].complex().cohomology(deg).group());
  DirectSum sum = direct_sum(pgs);

  std::size_t tuples = 1;
  for (std::size_t i = 0; i < deg; ++i) tuples *= n;
  IntMatrix m(node.group().ngens(), sum.group.ngens());
  for (std::size_t i = 0; i < node.group().ngens(); ++i) {
    GroupElement z = node.rep_of(node.group().generator(i));
    std::vector<Int> row(sum.group.ngens(), Int(0));
    for (std::size_t x = 0; x < npts; ++x) {
      std::vector<GroupElement> vals;
      vals.reserve(tuples);
      for (std::size_t t = 0; t < tuples; ++t)
        vals.push_back(ec.base().value_at(
            0, sc.to_level0(bar.value_at(deg, z, bar.index_tuple(deg, t))),
            x));
      GroupElement zx = pbs[x].cochain_from_values(deg, vals);
      GroupElement cls = pbs[x].complex().cohomology(deg).class_of(zx);
      for (std::size_t j = 0; j < cls.coords().size(); ++j)
        row[sum.offset[x] + j] = cls.coords()[j];
    }
    m.set_row(i, row);
  }
  GroupHom hom(node.group(), sum.group, std::move(m));
  return PointwiseClasses{std::move(pgs), std::move(sum), std::move(hom)};
}

}  // namespace detail

struct NodeReport {
  std::string name;
  FgAbelianGroup node;  // ambient group at this node
  Subgroup image;       // span of the incoming map's values
  Subgroup kernel;      // killed by the outgoing map, plus blocked generators
  std::vector<std::size_t> blocked;  // node generators whose chase is obstructed
  std::vector<std::string> notes;    // certificates
  bool exact = false;

  std::string line() const {
    return "node " + name + ": image=" + image.group.to_string() +
           " kernel=" + kernel.group.to_string() +
           " exact=" + (exact ? "yes" : "no");
  }
};

struct ExactnessReport {
  std::vector<NodeReport> nodes;
  bool all_exact = true;
  LocalVanishing vanishing1, vanishing2;
  std::string vanishing_line1, vanishing_line2;

  std::string render() const {
    std::string s;
    for (const auto& nr : nodes) {
      s += nr.line();
      s += '\n';
      for (const auto& note : nr.notes) {
        s += "  ";
        s += note;
        s += '\n';
      }
    }
    s += vanishing_line1;
    s += '\n';
    s += vanishing_line2;
    s += '\n';
    s += "exact at all six nodes: ";
    s += all_exact ? "yes" : "no";
    s += '\n';
    return s;
  }
};

inline ExactnessReport exactness_report(const LowDegreeComplex& ldc) {
  const EquivariantSiteComplex& ec = ldc.site();
  const PosetSite& site = ec.sheaf().site();
  detail::SectionsContext sc(ec);
  InvariantsSheaf inv = invariants_sheaf(ec.sheaf());
  SiteComplex isc(inv.sheaf, ec.base().top());

  BarComplex bgs(sc.gs.module, 4);
  const CohomologyGroup& hg1 = bgs.complex().cohomology(1);  // node 1
  const CohomologyGroup& hg2 = bgs.complex().cohomology(2);  // node 4
  const CohomologyGroup& hg3 = bgs.complex().cohomology(3);  // node-6 target
  const CohomologyGroup& hf1 = isc.complex().cohomology(1);  // node 2
  const CohomologyGroup& hf2 = isc.complex().cohomology(2);
  const CohomologyGroup& hx1 = ec.base().complex().cohomology(1);
  GroupModule hmod = cohomology_action(ec, 1);
  KernelResult inv3 = detail::module_invariants(hmod);  // node 3, inside hx1
  GroupHom emb1 = induced_on_cohomology(inv.incl, isc, ec.base(), 1);
  GroupHom emb2 = induced_on_cohomology(inv.incl, isc, ec.base(), 2);
  KernelResult ker5 = hom_kernel(emb2);  // node 5, inside hf2
  BarComplex hbar(hmod, 2);
  const CohomologyGroup& hh1 = hbar.complex().cohomology(1);  // node 6

  // partial-map domains: classes with no local obstruction
  detail::PointwiseClasses po1 =
      detail::pointwise_classes(ec, sc, bgs, hg1, 1);
  detail::PointwiseClasses po4 =
      detail::pointwise_classes(ec, sc, bgs, hg2, 2);
  KernelResult dom1 = hom_kernel(po1.hom);
  KernelResult dom4 = hom_kernel(po4.hom);

  auto rows_matrix = [](const std::vector<std::vector<Int>>& rows,
                        std::size_t width) {
    IntMatrix m(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
    return m;
  };
  auto in_subgroup = [](const KernelResult& sub, const GroupElement& v) {
    return solve_image_membership(sub.incl, v).in_image;
  };

  // map 1 on its domain
  std::vector<std::vector<Int>> t1rows;
  for (std::size_t i = 0; i < dom1.group.ngens(); ++i) {
    GroupElement cls = dom1.incl.apply(dom1.group.generator(i));
    Theta1Result r = theta1(ec, hg1.rep_of(cls));
    if (!r.cohomology_class)
      throw MathPrecondition("descent chase failed inside its domain");
    t1rows.push_back(r.cohomology_class->coords());
  }
  // map 2: classes of the fixed subsheaf embedded into the full sheaf
  SubgroupExpr into3(inv3.group, hx1.group(), inv3.incl);
  std::vector<std::vector<Int>> t2rows;
  for (std::size_t i = 0; i < hf1.group().ngens(); ++i) {
    GroupElement c = emb1.apply(hf1.group().generator(i));
    auto cc = into3.coords(c.coords());
    if (!cc) throw MathPrecondition("embedded class is not stable");
    t2rows.push_back(cc->coords());
  }
  // map 3 on the stable classes
  std::vector<std::vector<Int>> t3rows;
  for (std::size_t i = 0; i < inv3.group.ngens(); ++i) {
    GroupElement t = hx1.rep_of(inv3.incl.apply(inv3.group.generator(i)));
    Theta3Result r = theta3(ldc, t);
    t3rows.push_back(r.cohomology_class.coords());
  }
  // map 4 on its domain; a generator can still be blocked at the pair stage
  SubgroupExpr into5(ker5.group, hf2.group(), ker5.incl);
  std::vector<std::vector<Int>> t4rows, t4midway;
  std::vector<std::string> t4midway_notes;
  for (std::size_t i = 0; i < dom4.group.ngens(); ++i) {
    GroupElement cls = dom4.incl.apply(dom4.group.generator(i));
    Theta4Result r = theta4(ec, hg2.rep_of(cls));
    if (!r.cocycle) {
      t4midway.push_back(cls.coords());
      std::string note =
          "domain element " + detail::coords_str(cls) + " blocked at pairs:";
      for (std::size_t j = 0; j < r.failed_pairs.size(); ++j) {
        const auto& ch = ec.base().chain(1, r.failed_pairs[j]);
        note += " " + site.name(ch[0]) + "<=" + site.name(ch[1]) + " (" +
                r.pair_classes[j].group().to_string() + ")";
      }
      t4midway_notes.push_back(std::move(note));
      continue;
    }
    auto cc = into5.coords(r.cohomology_class->coords());
    if (!cc)
      throw MathPrecondition("chased class does not die over the full sheaf");
    t4rows.push_back(cc->coords());
  }
  // map 5 on the kernel node
  std::vector<std::vector<Int>> t5rows;
  for (std::size_t i = 0; i < ker5.group.ngens(); ++i) {
    GroupElement mb = hf2.rep_of(ker5.incl.apply(ker5.group.generator(i)));
    Theta5Result r = theta5(ec, mb);
    t5rows.push_back(r.cohomology_class.coords());
  }
  // map 6
  std::vector<std::vector<Int>> t6rows;
  for (std::size_t i = 0; i < hh1.group().ngens(); ++i) {
    Theta6Result r = theta6(ec, hh1.rep_of(hh1.group().generator(i)));
    t6rows.push_back(r.cohomology_class->coords());
  }

  // kernels, with blocked generators folded in where the map is partial
  auto pushed_kernel = [&](const KernelResult& dom,
                           const std::vector<std::vector<Int>>& rows,
                           const FgAbelianGroup& tgt,
                           std::vector<std::vector<Int>> extra,
                           const FgAbelianGroup& node) {
    GroupHom h(dom.group, tgt, rows_matrix(rows, tgt.ngens()));
    KernelResult k = hom_kernel(h);
    std::vector<std::vector<Int>> out;
    for (std::size_t i = 0; i < k.group.ngens(); ++i)
      out.push_back(dom.incl.apply(k.incl.apply(k.group.generator(i))).coords());
    for (auto& e : extra) out.push_back(std::move(e));
    return subgroup_from_rows(node, rows_matrix(out, node.ngens()));
  };
  auto full_kernel = [&](const FgAbelianGroup& node,
                         const std::vector<std::vector<Int>>& rows,
                         const FgAbelianGroup& tgt) {
    GroupHom h(node, tgt, rows_matrix(rows, tgt.ngens()));
    KernelResult k = hom_kernel(h);
    std::vector<std::vector<Int>> out;
    for (std::size_t i = 0; i < k.group.ngens(); ++i)
      out.push_back(k.incl.apply(k.group.generator(i)).coords());
    return subgroup_from_rows(node, rows_matrix(out, node.ngens()));
  };

  ExactnessReport rep;
  auto add_node = [&](std::string name, const FgAbelianGroup& node,
                      Subgroup image, Subgroup kernel,
                      std::vector<std::size_t> blocked,
                      std::vector<std::string> notes) {
    NodeReport nr{std::move(name), node,           std::move(image),
                  std::move(kernel), std::move(blocked), std::move(notes),
                  false};
    nr.exact = true;
    for (std::size_t i = 0; i < nr.kernel.group.ngens(); ++i) {
      GroupElement v = nr.kernel.incl.apply(nr.kernel.group.generator(i));
      if (v.is_zero()) continue;
      if (!solve_image_membership(nr.image.incl, v).in_image) {
        nr.exact = false;
        nr.notes.push_back("kernel element " + detail::coords_str(v) +
                           " is not hit by the incoming map");
      }
    }
    for (std::size_t i = 0; i < nr.image.group.ngens(); ++i) {
      GroupElement v = nr.image.incl.apply(nr.image.group.generator(i));
      if (v.is_zero()) continue;
      if (!solve_image_membership(nr.kernel.incl, v).in_image) {
        nr.exact = false;
        nr.notes.push_back("image element " + detail::coords_str(v) +
                           " survives the outgoing map");
      }
    }
    rep.all_exact = rep.all_exact && nr.exact;
    rep.nodes.push_back(std::move(nr));
  };

  // blocked generators and their certificates at the two partial nodes
  std::vector<std::size_t> blocked1, blocked4;
  std::vector<std::string> notes1, notes4;
  std::vector<std::vector<Int>> blocked1_rows, blocked4_rows;
  for (std::size_t i = 0; i < hg1.group().ngens(); ++i) {
    GroupElement gen = hg1.group().generator(i);
    if (in_subgroup(dom1, gen)) continue;
    blocked1.push_back(i);
    blocked1_rows.push_back(gen.coords());
    Theta1Result r = theta1(ec, hg1.rep_of(gen));
    std::string note =
        "generator " + detail::coords_str(gen) + " blocked at points:";
    for (std::size_t j = 0; j < r.failed_points.size(); ++j)
      note += " " + site.name(r.failed_points[j]) + " (" +
              r.point_classes[j].group().to_string() + ")";
    notes1.push_back(std::move(note));
  }
  for (std::size_t i = 0; i < hg2.group().ngens(); ++i) {
    GroupElement gen = hg2.group().generator(i);
    if (in_subgroup(dom4, gen)) continue;
    blocked4.push_back(i);
    blocked4_rows.push_back(gen.coords());
    Theta4Result r = theta4(ec, hg2.rep_of(gen));
    std::string note =
        "generator " + detail::coords_str(gen) + " blocked at points:";
    for (std::size_t j = 0; j < r.failed_points.size(); ++j)
      note += " " + site.name(r.failed_points[j]) + " (" +
              r.point_classes[j].group().to_string() + ")";
    notes4.push_back(std::move(note));
  }
  for (auto& n : t4midway_notes) notes4.push_back(std::move(n));
  for (auto& e : t4midway) blocked4_rows.push_back(std::move(e));

  add_node("H1(G,A(X))", hg1.group(),
           subgroup_from_rows(hg1.group(), IntMatrix(0, hg1.group().ngens())),
           pushed_kernel(dom1, t1rows, hf1.group(), blocked1_rows,
                         hg1.group()),
           std::move(blocked1), std::move(notes1));
  add_node("H1(X,A^G)", hf1.group(),
           subgroup_from_rows(hf1.group(),
                              rows_matrix(t1rows, hf1.group().ngens())),
           full_kernel(hf1.group(), t2rows, inv3.group), {}, {});
  add_node("H1(X,A)^G", inv3.group,
           subgroup_from_rows(inv3.group,
                              rows_matrix(t2rows, inv3.group.ngens())),
           full_kernel(inv3.group, t3rows, hg2.group()), {}, {});
  add_node("H2(G,A(X))", hg2.group(),
           subgroup_from_rows(hg2.group(),
                              rows_matrix(t3rows, hg2.group().ngens())),
           pushed_kernel(dom4, t4rows, ker5.group, blocked4_rows,
                         hg2.group()),
           std::move(blocked4), std::move(notes4));
  add_node("ker(H2(X,A^G)->H2(X,A))", ker5.group,
           subgroup_from_rows(ker5.group,
                              rows_matrix(t4rows, ker5.group.ngens())),
           full_kernel(ker5.group, t5rows, hh1.group()), {}, {});
  add_node("H1(G,H1(X,A))", hh1.group(),
           subgroup_from_rows(hh1.group(),
                              rows_matrix(t5rows, hh1.group().ngens())),
           full_kernel(hh1.group(), t6rows, hg3.group()), {}, {});

  rep.vanishing1 = stalkwise_local_vanishing(ec.sheaf(), 1);
  rep.vanishing2 = stalkwise_local_vanishing(ec.sheaf(), 2);
  auto vline = [&](const LocalVanishing& lv) {
    std::string s =
        "local vanishing at degree " + std::to_string(lv.degree) + ": ";
    if (lv.all) return s + "holds";
    s += "fails at";
    for (std::size_t x = 0; x < lv.vanishes.size(); ++x)
      if (!lv.vanishes[x]) s += " " + site.name(x) + " (" + lv.group_at[x] + ")";
    return s;
  };
  rep.vanishing_line1 = vline(rep.vanishing1);
  rep.vanishing_line2 = vline(rep.vanishing2);
  return rep;
}

inline ExactnessReport exactness_report(const EquivariantSheaf& a) {
  return exactness_report(LowDegreeComplex(a));
}

// --- total cohomology against the plain sheaf -------------------------------

struct HsDegreeLine {
  std::size_t degree = 0;
  std::string total_shape;
  std::string direct_shape;
  bool match = false;
};

struct HsCompareReport {
  std::vector<HsDegreeLine> degrees;
  std::vector<std::vector<std::string>> e2;  // e2[p][q], p + q <= 3
  bool all_match = true;

  std::string render() const {
    std::string s;
    for (const auto& d : degrees)
      s += "degree " + std::to_string(d.degree) + ": total=" + d.total_shape +
           " direct=" + d.direct_shape +
           " match=" + (d.match ? "yes" : "no") + "\n";
    for (std::size_t p = 0; p < e2.size(); ++p)
      for (std::size_t q = 0; q < e2[p].size(); ++q)
        s += "e2[" + std::to_string(p) + "," + std::to_string(q) +
             "]=" + e2[p][q] + "\n";
    return s;
  }
};

inline HsCompareReport hs_low_degree_compare(const LowDegreeComplex& ldc,
                                             const Sheaf& e) {
  if (!(e.site() == ldc.site().sheaf().site()))
    throw ShapeError("comparison sheaf lives on a different site");
  SiteComplex direct(e);
  HsCompareReport out;
  std::size_t hi = std::min<std::size_t>(3, ldc.group_levels() - 1);
  for (std::size_t nd = 0; nd <= hi; ++nd) {
    HsDegreeLine line;
    line.degree = nd;
    line.total_shape = ldc.total_cohomology(nd).group().to_string();
    line.direct_shape = nd <= direct.top()
                            ? direct.complex().cohomology(nd).group().to_string()
                            : std::string("0");
    line.match = line.total_shape == line.direct_shape;
    out.all_match = out.all_match && line.match;
    out.degrees.push_back(std::move(line));
  }
  for (std::size_t p = 0; p <= 3; ++p) {
    std::vector<std::string> row;
    for (std::size_t q = 0; p + q <= 3; ++q)
      row.push_back(ldc.e2_term(p, q).to_string());
    out.e2.push_back(std::move(row));
  }
  return out;
}

inline HsCompareReport hs_low_degree_compare(const Sheaf& e,
                                             const GTorsorCocycle& m) {
  return hs_low_degree_compare(LowDegreeComplex(internal_hom_torsor(e, m)), e);
}

}  // namespace poscoh
