#pragma once

// Group lifts on degree-1 and degree-2 site cocycles, their obstruction
// classes in H^2(G, A(X)) and H^3(G, A(X)), the induced-from-the-fixed-
// subsheaf decision, and the twist operator on cochains.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poscoh/gcoh.hpp"
#include "poscoh/possite.hpp"

namespace poscoh {

// --- twist ------------------------------------------------------------------

// Valuewise action of one group element on a degree-q cochain.  Commutes
// with the differential, so it descends to the cohomology groups.
inline GroupElement twist(const EquivariantSiteComplex& ec, std::size_t g,
                          std::size_t q, const GroupElement& z) {
  return ec.act(g, q, z);
}

// --- shared plumbing --------------------------------------------------------

namespace detail {

// Global sections bundle with coordinate translation between the sections
// group and level 0 of the site complex.
struct SectionsContext {
  GlobalSectionsModule gs;
  FgAbelianGroup level0;

  explicit SectionsContext(const EquivariantSiteComplex& ec)
      : gs(global_sections(ec.sheaf())), level0(ec.base().complex().level(0)) {
    if (!gs.sec.ambient.same_presentation(level0))
      throw ShapeError("sections ambient disagrees with the complex");
  }

  // level-0 cochain -> sections coordinates; fails when not d-closed
  std::optional<GroupElement> to_sections(const GroupElement& c) const {
    SubgroupExpr expr(gs.sec.group, gs.sec.ambient, gs.sec.incl);
    return expr.coords(c.coords());
  }

  GroupElement to_level0(const GroupElement& s) const {
    return level0.element(gs.sec.incl.apply(s).coords());
  }
};

inline void require_level(const EquivariantSiteComplex& ec, std::size_t q,
                          const GroupElement& z, const char* what) {
  if (!z.group().same_presentation(ec.base().complex().level(q)))
    throw ShapeError(std::string(what) + " does not live in degree " +
                     std::to_string(q) + " of this complex");
}

}  // namespace detail

// --- torsor lifts -----------------------------------------------------------

// A degree-1 cocycle together with, per group element, a 0-cochain
// witnessing that the element fixes the cocycle up to coboundary.
struct TorsorLift {
  GroupElement torsor;                   // d torsor = 0
  std::vector<GroupElement> cobounding;  // d cobounding[g] = rho_g(torsor) - torsor
};

struct TorsorLiftSearch {
  std::optional<TorsorLift> lift;
  std::optional<std::size_t> moving_g;  // element whose twist changes the class
};

inline TorsorLiftSearch find_torsor_lift(const EquivariantSiteComplex& ec,
                                         const GroupElement& t) {
  detail::require_level(ec, 1, t, "torsor cocycle");
  const CochainComplex& cx = ec.base().complex();
  if (!cx.cohomology(1).is_cocycle(t))
    throw MathPrecondition("torsor data is not a cocycle");

  std::size_t n = ec.sheaf().group().size();
  TorsorLiftSearch out;
  std::vector<GroupElement> b;
  for (std::size_t g = 0; g < n; ++g) {
    auto cob = cx.solve_coboundary(1, twist(ec, g, 1, t) - t);
    if (!cob.is_coboundary) {
      out.moving_g = g;
      return out;
    }
    b.push_back(*cob.witness);
  }
  out.lift = TorsorLift{t, std::move(b)};
  return out;
}

inline void validate_torsor_lift(const EquivariantSiteComplex& ec,
                                 const TorsorLift& l) {
  std::size_t n = ec.sheaf().group().size();
  detail::require_level(ec, 1, l.torsor, "torsor cocycle");
  if (l.cobounding.size() != n)
    throw ShapeError("one cobounding cochain per group element required");
  const GroupHom& d0 = ec.base().complex().diff(0);
  for (std::size_t g = 0; g < n; ++g) {
    detail::require_level(ec, 0, l.cobounding[g], "cobounding cochain");
    if (d0.apply(l.cobounding[g]) != twist(ec, g, 1, l.torsor) - l.torsor)
      throw MathPrecondition("lift data does not cobound the twist at element " +
                             std::to_string(g));
  }
}

// --- obstruction classes ----------------------------------------------------

// A group cochain over the global sections module together with its class.
struct ObstructionResult {
  GroupElement cocycle;           // bar cochain, one sections value per tuple
  GroupElement cohomology_class;  // in H^degree(G, A(X))
  std::size_t degree;
};

// chi(g,h) = b_g + rho_g(b_h) - b_{gh}: d-closed, a group 2-cocycle, and its
// class does not depend on the choice of the cobounding data.
inline ObstructionResult torsor_obstruction(const EquivariantSiteComplex& ec,
                                            const TorsorLift& l) {
  validate_torsor_lift(ec, l);
  const FiniteGroup& grp = ec.sheaf().group();
  std::size_t n = grp.size();
  detail::SectionsContext sc(ec);

  std::vector<GroupElement> vals;
  vals.reserve(n * n);
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      GroupElement chi = l.cobounding[g] + twist(ec, g, 0, l.cobounding[h]) -
                         l.cobounding[grp.mul(g, h)];
      auto s = sc.to_sections(chi);
      if (!s)
        throw MathPrecondition("obstruction value is not a global section");
      vals.push_back(*s);
    }

  BarComplex bar(sc.gs.module, 3);
  GroupElement cocycle = bar.cochain_from_values(2, vals);
  GroupElement cls = bar.complex().cohomology(2).class_of(cocycle);
  return ObstructionResult{std::move(cocycle), std::move(cls), 2};
}

// --- descent to the fixed subsheaf ------------------------------------------

struct FixedPointResult {
  std::optional<GroupElement> cocycle;      // degree 1 over the fixed subsheaf
  std::optional<GroupElement> sections;     // 0-cochain of the solved sigma_x
  std::vector<std::size_t> failed_points;   // solvability fails here
  std::vector<GroupElement> point_classes;  // class in H^1(G, F(x)) per failure
};

// Adjusts the cobounding data to a strict action (possible exactly when the
// obstruction class vanishes), solves for an invariant 0-cochain pointwise,
// and rewrites the torsor over the fixed subsheaf.
inline FixedPointResult fixed_point_torsor(const EquivariantSiteComplex& ec,
                                           const TorsorLift& l) {
  validate_torsor_lift(ec, l);
  const FiniteGroup& grp = ec.sheaf().group();
  const SiteComplex& base = ec.base();
  std::size_t n = grp.size();
  std::size_t npts = base.sheaf().site().size();

  std::vector<GroupElement> b = l.cobounding;
  if (n > 1) {
    ObstructionResult chi = torsor_obstruction(ec, l);
    if (!chi.cohomology_class.is_zero())
      throw MathPrecondition("obstruction class does not vanish");
    detail::SectionsContext sc(ec);
    BarComplex bar(sc.gs.module, 3);
    auto z = bar.complex().solve_coboundary(2, chi.cocycle);
    for (std::size_t g = 0; g < n; ++g)
      b[g] = b[g] - sc.to_level0(bar.value_at(1, *z.witness, {g}));
  }

  // pointwise: sigma_x with rho_g(sigma_x) + b_g|x = sigma_x for all g
  FixedPointResult out;
  std::vector<GroupElement> sigma;
  for (std::size_t x = 0; x < npts; ++x) {
    const GroupModule& pm = ec.sheaf().point_module(x);
    BarComplex pbar(pm, 2);
    std::vector<GroupElement> cv;
    for (std::size_t g = 0; g < n; ++g)
      cv.push_back(-base.value_at(0, b[g], x));
    GroupElement c = pbar.cochain_from_values(1, cv);
    auto sol = pbar.complex().solve_coboundary(1, c);
    if (!sol.is_coboundary) {
      out.failed_points.push_back(x);
      out.point_classes.push_back(pbar.complex().cohomology(1).class_of(c));
      continue;
    }
    sigma.push_back(pm.module().element(sol.witness->coords()));
  }
  if (!out.failed_points.empty()) return out;

  out.sections = base.cochain_from_values(0, sigma);
  GroupElement tbar = l.torsor + base.complex().diff(0).apply(*out.sections);

  InvariantsSheaf inv = invariants_sheaf(ec.sheaf());
  SiteComplex isc(inv.sheaf, base.top());
  std::vector<GroupElement> tv;
  for (std::size_t i = 0; i < base.chain_count(1); ++i) {
    std::size_t y = base.chain(1, i).back();
    SubgroupExpr expr(inv.sheaf.stalk(y), ec.sheaf().stalk(y), inv.incl.at(y));
    auto cc = expr.coords(base.value_at(1, tbar, i));
    if (!cc)
      throw MathPrecondition("descended value is not invariant");
    tv.push_back(*cc);
  }
  GroupElement result = isc.cochain_from_values(1, tv);
  if (!isc.complex().cohomology(1).is_cocycle(result))
    throw MathPrecondition("descended data is not a cocycle");

  // the image upstairs differs from the input by the coboundary used above
  std::vector<GroupHom> maps = induced_cochain_maps(inv.incl, isc, base);
  if (base.complex().cohomology(1).class_of(maps[1].apply(result)) !=
      base.complex().cohomology(1).class_of(l.torsor))
    throw MathPrecondition("descended torsor does not match the input class");
  out.cocycle = std::move(result);
  return out;
}

// --- induced-from-invariants decision ---------------------------------------

struct InducedWitness {
  bool induced = false;
  std::optional<GroupElement> witness_class;    // in H^q(X, fixed subsheaf)
  std::optional<GroupElement> witness_cocycle;  // representative over it
};

namespace detail {

inline InducedWitness induced_through_invariants(const EquivariantSiteComplex& ec,
                                                 std::size_t q,
                                                 const GroupElement& z) {
  require_level(ec, q, z, "cocycle");
  const CochainComplex& cx = ec.base().complex();
  if (!cx.cohomology(q).is_cocycle(z))
    throw MathPrecondition("induced-check input is not a cocycle");

  InvariantsSheaf inv = invariants_sheaf(ec.sheaf());
  SiteComplex isc(inv.sheaf, ec.base().top());
  GroupHom ind = induced_on_cohomology(inv.incl, isc, ec.base(), q);
  MembershipWitness w = solve_image_membership(ind, cx.cohomology(q).class_of(z));
  InducedWitness out;
  out.induced = w.in_image;
  if (w.in_image) {
    out.witness_class = w.preimage;
    out.witness_cocycle = isc.complex().cohomology(q).rep_of(*w.preimage);
  }
  return out;
}

}  // namespace detail

inline InducedWitness is_induced_torsor(const EquivariantSiteComplex& ec,
                                        const GroupElement& t) {
  return detail::induced_through_invariants(ec, 1, t);
}

inline InducedWitness is_induced_gerbe(const EquivariantSiteComplex& ec,
                                       const GroupElement& m) {
  return detail::induced_through_invariants(ec, 2, m);
}

// --- gerbe lifts ------------------------------------------------------------

// A degree-2 cocycle with, per element, a cobounding 1-cochain and, per
// pair, a connecting 0-cochain tying the composites together.
struct GerbeLift {
  GroupElement gerbe;                    // d gerbe = 0
  std::vector<GroupElement> cobounding;  // d cobounding[g] = rho_g(gerbe) - gerbe
  std::vector<std::vector<GroupElement>> connecting;
  // d connecting[g][h] = rho_g(cobounding[h]) - cobounding[gh] + cobounding[g]
};

struct GerbeLiftSearch {
  std::optional<GerbeLift> lift;
  std::optional<std::size_t> moving_g;      // class moves under this element
  std::optional<GroupElement> blocked_class;  // H^1(X, A) class with no fix
};

namespace detail {

// Coordinate ranges for an exhaustive walk over H^1 classes: full range on
// torsion generators, one period of the group order on free generators.
inline std::vector<Int> class_bounds(const FgAbelianGroup& h, std::size_t order) {
  std::vector<Int> bounds;
  std::size_t rank = h.ngens() - h.invariant_factors().size();
  for (std::size_t i = 0; i < h.ngens(); ++i)
    bounds.push_back(i < h.ngens() - rank ? h.invariant_factors()[i]
                                          : Int(order));
  return bounds;
}

}  // namespace detail

inline GerbeLiftSearch find_gerbe_lift(const EquivariantSiteComplex& ec,
                                       const GroupElement& m) {
  detail::require_level(ec, 2, m, "gerbe cocycle");
  const CochainComplex& cx = ec.base().complex();
  const FiniteGroup& grp = ec.sheaf().group();
  std::size_t n = grp.size();
  if (!cx.cohomology(2).is_cocycle(m))
    throw MathPrecondition("gerbe data is not a cocycle");

  GerbeLiftSearch out;
  std::vector<GroupElement> e;
  for (std::size_t g = 0; g < n; ++g) {
    auto cob = cx.solve_coboundary(2, twist(ec, g, 2, m) - m);
    if (!cob.is_coboundary) {
      out.moving_g = g;
      return out;
    }
    e.push_back(*cob.witness);
  }

  auto pair_defect = [&](const std::vector<GroupElement>& eg, std::size_t g,
                         std::size_t h) {
    return twist(ec, g, 1, eg[h]) - eg[grp.mul(g, h)] + eg[g];
  };
  auto try_connect = [&](const std::vector<GroupElement>& eg)
      -> std::optional<std::vector<std::vector<GroupElement>>> {
    std::vector<std::vector<GroupElement>> f;
    for (std::size_t g = 0; g < n; ++g) {
      std::vector<GroupElement> row;
      for (std::size_t h = 0; h < n; ++h) {
        auto cob = cx.solve_coboundary(1, pair_defect(eg, g, h));
        if (!cob.is_coboundary) return std::nullopt;
        row.push_back(*cob.witness);
      }
      f.push_back(std::move(row));
    }
    return f;
  };

  if (auto f = try_connect(e)) {
    out.lift = GerbeLift{m, std::move(e), std::move(*f)};
    return out;
  }
  for (std::size_t g = 0; g < n && !out.blocked_class; ++g)
    for (std::size_t h = 0; h < n; ++h) {
      GroupElement u = pair_defect(e, g, h);
      if (!cx.solve_coboundary(1, u).is_coboundary) {
        out.blocked_class = cx.cohomology(1).class_of(u);
        break;
      }
    }

  // retry after shifting the cobounding cochains by degree-1 classes,
  // lexicographically over coordinate assignments
  const CohomologyGroup& h1 = cx.cohomology(1);
  if (n > 1 && h1.group().ngens() > 0) {
    std::vector<Int> bounds = detail::class_bounds(h1.group(), n);
    std::size_t k = h1.group().ngens();
    std::vector<Int> pick((n - 1) * k, Int(0));
    while (true) {
      bool carry = true;
      for (std::size_t i = pick.size(); i > 0 && carry; --i) {
        pick[i - 1] += 1;
        if (pick[i - 1] < bounds[(i - 1) % k]) {
          carry = false;
        } else {
          pick[i - 1] = 0;
        }
      }
      if (carry) break;  // walked the whole range
      std::vector<GroupElement> eg = e;
      for (std::size_t g = 1; g < n; ++g) {
        std::vector<Int> c(pick.begin() + (g - 1) * k, pick.begin() + g * k);
        eg[g] = eg[g] + h1.rep_of(h1.group().element(std::move(c)));
      }
      if (auto f = try_connect(eg)) {
        out.blocked_class.reset();
        out.lift = GerbeLift{m, std::move(eg), std::move(*f)};
        return out;
      }
    }
  }
  return out;
}

inline void validate_gerbe_lift(const EquivariantSiteComplex& ec,
                                const GerbeLift& l) {
  const FiniteGroup& grp = ec.sheaf().group();
  std::size_t n = grp.size();
  detail::require_level(ec, 2, l.gerbe, "gerbe cocycle");
  if (l.cobounding.size() != n || l.connecting.size() != n)
    throw ShapeError("one cobounding cochain and one connecting row per element");
  const CochainComplex& cx = ec.base().complex();
  for (std::size_t g = 0; g < n; ++g) {
    detail::require_level(ec, 1, l.cobounding[g], "cobounding cochain");
    if (cx.diff(1).apply(l.cobounding[g]) != twist(ec, g, 2, l.gerbe) - l.gerbe)
      throw MathPrecondition("lift data does not cobound the twist at element " +
                             std::to_string(g));
    if (l.connecting[g].size() != n)
      throw ShapeError("one connecting cochain per element pair");
    for (std::size_t h = 0; h < n; ++h) {
      detail::require_level(ec, 0, l.connecting[g][h], "connecting cochain");
      if (cx.diff(0).apply(l.connecting[g][h]) !=
          twist(ec, g, 1, l.cobounding[h]) - l.cobounding[grp.mul(g, h)] +
              l.cobounding[g])
        throw MathPrecondition("connecting data fails at pair " +
                               std::to_string(g) + "," + std::to_string(h));
    }
  }
}

// kappa(g1,g2,g3) = f_{g1,g2·g3} + rho_{g1}(f_{g2,g3}) - f_{g1·g2,g3} -
// f_{g1,g2}: d-closed, a group 3-cocycle, class independent of all choices.
inline ObstructionResult gerbe_obstruction(const EquivariantSiteComplex& ec,
                                           const GerbeLift& l) {
  validate_gerbe_lift(ec, l);
  const FiniteGroup& grp = ec.sheaf().group();
  std::size_t n = grp.size();
  detail::SectionsContext sc(ec);

  std::vector<GroupElement> vals;
  vals.reserve(n * n * n);
  for (std::size_t g1 = 0; g1 < n; ++g1)
    for (std::size_t g2 = 0; g2 < n; ++g2)
      for (std::size_t g3 = 0; g3 < n; ++g3) {
        GroupElement kappa = l.connecting[g1][grp.mul(g2, g3)] +
                             twist(ec, g1, 0, l.connecting[g2][g3]) -
                             l.connecting[grp.mul(g1, g2)][g3] -
                             l.connecting[g1][g2];
        auto s = sc.to_sections(kappa);
        if (!s)
          throw MathPrecondition("obstruction value is not a global section");
        vals.push_back(*s);
      }

  BarComplex bar(sc.gs.module, 4);
  GroupElement cocycle = bar.cochain_from_values(3, vals);
  GroupElement cls = bar.complex().cohomology(3).class_of(cocycle);
  return ObstructionResult{std::move(cocycle), std::move(cls), 3};
}

}  // namespace poscoh
