#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include <poscoh/descent.hpp>
#include <poscoh/models.hpp>

#include "testutil.hpp"

using namespace poscoh;

namespace {

EquivariantSiteComplex cx_of(const models::ModelBundle& m) {
  return EquivariantSiteComplex(models::resolve_model(m));
}

EquivariantSheaf circle_tuples(const FgAbelianGroup& coeff) {
  return internal_hom_torsor(constant_sheaf(models::circle_base(), coeff),
                             models::circle_twist());
}

GroupElement h1_rep(const EquivariantSiteComplex& ec, const std::vector<Int>& cls) {
  const CohomologyGroup& h = ec.base().complex().cohomology(1);
  return h.rep_of(h.group().element(cls));
}

GroupElement random_level(const CochainComplex& cx, std::size_t q) {
  return cx.level(q).element(testutil::random_vec(cx.level(q).ngens(), -3, 3));
}

// random global section as a level-0 cochain
GroupElement random_section(const EquivariantSiteComplex& ec) {
  GlobalSectionsModule gs = global_sections(ec.sheaf());
  GroupElement s =
      gs.sec.group.element(testutil::random_vec(gs.sec.group.ngens(), -3, 3));
  return ec.base().complex().level(0).element(gs.sec.incl.apply(s).coords());
}

}  // namespace

TEST_CASE("twist is the identity for e and preserves coboundaries") {
  EquivariantSiteComplex ec(circle_tuples(FgAbelianGroup::from_invariants(0, {2})));
  for (int i = 0; i < 5; ++i) {
    GroupElement z = random_level(ec.base().complex(), 1);
    CHECK(twist(ec, 0, 1, z) == z);
    GroupElement w = random_level(ec.base().complex(), 0);
    GroupElement dz = ec.base().complex().diff(0).apply(w);
    auto back = ec.base().complex().solve_coboundary(1, twist(ec, 1, 1, dz));
    CHECK(back.is_coboundary);
  }
}

TEST_CASE("twist fixes the degree-2 class on the suspension model") {
  EquivariantSiteComplex ec = cx_of(models::sphere_branched_model());
  const CohomologyGroup& h2 = ec.base().complex().cohomology(2);
  REQUIRE(h2.group().to_string() == "Z^1");
  GroupElement gen = h2.rep_of(h2.group().generator(0));
  CHECK(h2.class_of(twist(ec, 1, 2, gen)) == h2.class_of(gen));
}

TEST_CASE("lift search: trivial cocycle, branched interval, moving class") {
  EquivariantSiteComplex ec94 = cx_of(models::interval_branched_model());
  const CochainComplex& cx = ec94.base().complex();

  TorsorLiftSearch z = find_torsor_lift(ec94, cx.level(1).zero());
  REQUIRE(z.lift.has_value());
  for (const auto& b : z.lift->cobounding) CHECK(b.is_zero());

  REQUIRE(cx.cohomology(1).group().to_string() == "Z/2");
  TorsorLiftSearch l = find_torsor_lift(ec94, h1_rep(ec94, {1}));
  CHECK(l.lift.has_value());
  CHECK_FALSE(l.moving_g.has_value());

  // two summands swapped by the action: the nontrivial class moves
  auto circle = models::circle_base();
  FgAbelianGroup z2sq = FgAbelianGroup::from_invariants(0, {2, 2});
  Sheaf pairs = constant_sheaf(circle, z2sq);
  IntMatrix swap(2, 2), id = IntMatrix::identity(2);
  swap.at(0, 1) = 1;
  swap.at(1, 0) = 1;
  EquivariantSheaf swapped(
      pairs, FiniteGroup::cyclic(2),
      {{id, id, id, id}, {swap, swap, swap, swap}});
  EquivariantSiteComplex ecs(swapped);
  GroupModule on_h1 = cohomology_action(ecs, 1);
  std::size_t moved_classes = 0, fixed_nonzero = 0;
  for (Int a = 0; a <= 1; ++a)
    for (Int b = 0; b <= 1; ++b) {
      if (a == 0 && b == 0) continue;
      GroupElement c = on_h1.module().element({a, b});
      if (on_h1.act(1, c) == c) {
        ++fixed_nonzero;
        CHECK(find_torsor_lift(ecs, h1_rep(ecs, {a, b})).lift.has_value());
      } else {
        ++moved_classes;
        TorsorLiftSearch moved = find_torsor_lift(ecs, h1_rep(ecs, {a, b}));
        CHECK_FALSE(moved.lift.has_value());
        REQUIRE(moved.moving_g.has_value());
        CHECK(*moved.moving_g == 1);
      }
    }
  CHECK(moved_classes == 2);
  CHECK(fixed_nonzero == 1);

  CHECK_THROWS_AS(find_torsor_lift(ec94, cx.level(0).zero()), ShapeError);
  EquivariantSiteComplex ec96 = cx_of(models::sphere_branched_model());
  for (int i = 0; i < 20; ++i) {
    GroupElement bad = random_level(ec96.base().complex(), 1);
    if (ec96.base().complex().cohomology(1).is_cocycle(bad)) continue;
    CHECK_THROWS_AS(find_torsor_lift(ec96, bad), MathPrecondition);
    break;
  }
}

TEST_CASE("obstruction of the branched interval lift is the zero class") {
  EquivariantSiteComplex ec = cx_of(models::interval_branched_model());
  TorsorLiftSearch l = find_torsor_lift(ec, h1_rep(ec, {1}));
  REQUIRE(l.lift.has_value());
  ObstructionResult chi = torsor_obstruction(ec, *l.lift);
  CHECK(chi.cohomology_class.is_zero());
  // the class vanishes inside a group with room for a nonzero answer
  CHECK(chi.cohomology_class.group().to_string() == "Z/2");
}

TEST_CASE("a stable circle torsor has obstruction generating Z/2") {
  EquivariantSiteComplex ec(circle_tuples(FgAbelianGroup::from_invariants(0, {2})));
  TorsorLiftSearch l = find_torsor_lift(ec, h1_rep(ec, {1}));
  REQUIRE(l.lift.has_value());
  ObstructionResult chi = torsor_obstruction(ec, *l.lift);
  CHECK(chi.cohomology_class.group().to_string() == "Z/2");
  CHECK_FALSE(chi.cohomology_class.is_zero());
  CHECK_THROWS_AS(fixed_point_torsor(ec, *l.lift), MathPrecondition);
}

TEST_CASE("obstruction cochains are group cocycles; perturbation shifts by "
          "exact coboundaries") {
  std::vector<EquivariantSiteComplex> fixtures;
  fixtures.push_back(cx_of(models::interval_branched_model()));
  fixtures.emplace_back(circle_tuples(FgAbelianGroup::from_invariants(0, {2})));
  fixtures.emplace_back(circle_tuples(FgAbelianGroup::free_group(1)));
  for (auto& ec : fixtures) {
    const CochainComplex& cx = ec.base().complex();
    GlobalSectionsModule gs = global_sections(ec.sheaf());
    BarComplex bar(gs.module, 3);
    std::size_t n = ec.sheaf().group().size();
    for (int trial = 0; trial < 8; ++trial) {
      // stable torsor: random class representative plus a random coboundary
      const CohomologyGroup& h1 = cx.cohomology(1);
      GroupElement t =
          h1.rep_of(h1.group().element(testutil::random_vec(h1.group().ngens(), -2, 2))) +
          cx.diff(0).apply(random_level(cx, 0));
      TorsorLiftSearch l = find_torsor_lift(ec, t);
      REQUIRE(l.lift.has_value());
      ObstructionResult chi = torsor_obstruction(ec, *l.lift);
      CHECK(bar.complex().diff(2).apply(chi.cocycle).is_zero());

      // perturb the cobounding data by global sections
      std::vector<GroupElement> shift;
      TorsorLift moved = *l.lift;
      for (std::size_t g = 0; g < n; ++g) {
        GroupElement s = random_section(ec);
        shift.push_back(s);
        moved.cobounding[g] = moved.cobounding[g] + s;
      }
      ObstructionResult chi2 = torsor_obstruction(ec, moved);
      CHECK(chi2.cohomology_class == chi.cohomology_class);
      SubgroupExpr expr(gs.sec.group, gs.sec.ambient, gs.sec.incl);
      std::vector<GroupElement> sv;
      for (std::size_t g = 0; g < n; ++g) sv.push_back(*expr.coords(shift[g].coords()));
      GroupElement delta =
          bar.complex().diff(1).apply(bar.cochain_from_values(1, sv));
      CHECK(chi2.cocycle - chi.cocycle == delta);
    }
  }
}

TEST_CASE("a morphism of equivariant sheaves pushes the obstruction forward") {
  FgAbelianGroup zz = FgAbelianGroup::free_group(1);
  FgAbelianGroup z2 = FgAbelianGroup::from_invariants(0, {2});
  EquivariantSheaf a1 = circle_tuples(zz);
  EquivariantSheaf a2 = circle_tuples(z2);
  std::vector<IntMatrix> blocks(4, IntMatrix::identity(2));  // coordinatewise reduction
  SheafMorphism f(a1.underlying(), a2.underlying(), blocks);
  EquivariantSiteComplex ec1(a1), ec2(a2);
  std::vector<GroupHom> maps = induced_cochain_maps(f, ec1.base(), ec2.base());

  TorsorLiftSearch l1 = find_torsor_lift(ec1, h1_rep(ec1, {1}));
  REQUIRE(l1.lift.has_value());
  TorsorLift l2{maps[1].apply(l1.lift->torsor), {}};
  for (const auto& b : l1.lift->cobounding)
    l2.cobounding.push_back(maps[0].apply(b));
  ObstructionResult chi1 = torsor_obstruction(ec1, *l1.lift);
  ObstructionResult chi2 = torsor_obstruction(ec2, l2);

  GlobalSectionsModule gs1 = global_sections(a1), gs2 = global_sections(a2);
  BarComplex b1(gs1.module, 3), b2(gs2.module, 3);
  const FiniteGroup& grp = a1.group();
  for (std::size_t g = 0; g < grp.size(); ++g)
    for (std::size_t h = 0; h < grp.size(); ++h) {
      GroupElement v1 = b1.value_at(2, chi1.cocycle, {g, h});
      GroupElement v2 = b2.value_at(2, chi2.cocycle, {g, h});
      GroupElement pushed = maps[0].apply(
          ec1.base().complex().level(0).element(gs1.sec.incl.apply(v1).coords()));
      GroupElement embedded =
          ec2.base().complex().level(0).element(gs2.sec.incl.apply(v2).coords());
      CHECK(pushed == embedded);
    }
}

TEST_CASE("fixed point descent on the branched interval fails at a branch point") {
  EquivariantSiteComplex ec = cx_of(models::interval_branched_model());
  TorsorLiftSearch l = find_torsor_lift(ec, h1_rep(ec, {1}));
  REQUIRE(l.lift.has_value());
  FixedPointResult r = fixed_point_torsor(ec, *l.lift);
  CHECK_FALSE(r.cocycle.has_value());

  // the certificate depends on the solver's choice of cobounding sections:
  // shifting b_s by a global section moves the failure between the two branch
  // points (indices 0 and 1), but it can never land on the free orbit point
  REQUIRE_FALSE(r.failed_points.empty());
  for (std::size_t x : r.failed_points) CHECK(x < 2);
  CHECK(r.failed_points == std::vector<std::size_t>{1});
  for (const auto& c : r.point_classes) {
    CHECK_FALSE(c.is_zero());
    CHECK(c.group().to_string() == "Z/2");
  }
}

TEST_CASE("fixed point descent rewrites a doubled circle torsor") {
  EquivariantSiteComplex ec(circle_tuples(FgAbelianGroup::free_group(1)));
  const CohomologyGroup& h1 = ec.base().complex().cohomology(1);
  REQUIRE(h1.group().to_string() == "Z^1");

  // twice the generator: the obstruction class dies, descent succeeds
  GroupElement t = h1.rep_of(h1.group().generator(0) * Int(2));
  TorsorLiftSearch l = find_torsor_lift(ec, t);
  REQUIRE(l.lift.has_value());
  CHECK(torsor_obstruction(ec, *l.lift).cohomology_class.is_zero());
  FixedPointResult r = fixed_point_torsor(ec, *l.lift);
  REQUIRE(r.cocycle.has_value());

  InvariantsSheaf inv = invariants_sheaf(ec.sheaf());
  SiteComplex isc(inv.sheaf, ec.base().top());
  GroupHom ind = induced_on_cohomology(inv.incl, isc, ec.base(), 1);
  GroupElement down = isc.complex().cohomology(1).class_of(*r.cocycle);
  CHECK(ind.apply(down) == h1.class_of(t));

  // trivial torsor with the canonical lift descends to the zero class
  TorsorLiftSearch lz = find_torsor_lift(ec, ec.base().complex().level(1).zero());
  FixedPointResult rz = fixed_point_torsor(ec, *lz.lift);
  REQUIRE(rz.cocycle.has_value());
  CHECK(isc.complex().cohomology(1).class_of(*rz.cocycle).is_zero());
}

TEST_CASE("induced decision for torsors") {
  EquivariantSiteComplex ec = cx_of(models::interval_branched_model());
  CHECK(is_induced_torsor(ec, ec.base().complex().level(1).zero()).induced);
  CHECK_FALSE(is_induced_torsor(ec, h1_rep(ec, {1})).induced);

  EquivariantSiteComplex ecz(circle_tuples(FgAbelianGroup::free_group(1)));
  InvariantsSheaf inv = invariants_sheaf(ecz.sheaf());
  SiteComplex isc(inv.sheaf, ecz.base().top());
  std::vector<GroupHom> maps = induced_cochain_maps(inv.incl, isc, ecz.base());
  const CohomologyGroup& hbar = isc.complex().cohomology(1);
  GroupElement tbar = hbar.rep_of(hbar.group().generator(0));
  InducedWitness w = is_induced_torsor(ecz, maps[1].apply(tbar));
  REQUIRE(w.induced);
  REQUIRE(w.witness_class.has_value());
  GroupHom ind = induced_on_cohomology(inv.incl, isc, ecz.base(), 1);
  CHECK(ind.apply(*w.witness_class) ==
        ecz.base().complex().cohomology(1).class_of(maps[1].apply(tbar)));
  CHECK(hbar.is_cocycle(*w.witness_cocycle));
}

TEST_CASE("gerbe lift search on the suspension model") {
  EquivariantSiteComplex ec = cx_of(models::sphere_branched_model());
  const CochainComplex& cx = ec.base().complex();

  GerbeLiftSearch z = find_gerbe_lift(ec, cx.level(2).zero());
  REQUIRE(z.lift.has_value());
  for (const auto& e : z.lift->cobounding) CHECK(e.is_zero());
  for (const auto& row : z.lift->connecting)
    for (const auto& f : row) CHECK(f.is_zero());

  const CohomologyGroup& h2 = cx.cohomology(2);
  GerbeLiftSearch l = find_gerbe_lift(ec, h2.rep_of(h2.group().generator(0)));
  REQUIRE(l.lift.has_value());
  ObstructionResult kappa = gerbe_obstruction(ec, *l.lift);
  CHECK(kappa.cohomology_class.is_zero());
  CHECK(kappa.cohomology_class.group().is_trivial());  // H^3 of Z/2 acting on Z

  // trivial underlying action: the canonical lift is identically zero
  EquivariantSheaf triv = EquivariantSheaf::trivial_action(
      constant_sheaf(models::sphere_base(), FgAbelianGroup::from_invariants(0, {2})),
      FiniteGroup::cyclic(2));
  EquivariantSiteComplex ect(triv);
  const CohomologyGroup& th2 = ect.base().complex().cohomology(2);
  GerbeLiftSearch tl = find_gerbe_lift(ect, th2.rep_of(th2.group().generator(0)));
  REQUIRE(tl.lift.has_value());
  for (const auto& e : tl.lift->cobounding) CHECK(e.is_zero());
  CHECK(gerbe_obstruction(ect, *tl.lift).cohomology_class.is_zero());
}

TEST_CASE("gerbe obstruction class vanishes whenever the shifts cobound to zero") {
  std::vector<FiniteGroup> groups;
  for (std::size_t n = 2; n <= 6; ++n) groups.push_back(FiniteGroup::cyclic(n));
  groups.push_back(
      FiniteGroup::product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)));
  Sheaf base = constant_sheaf(models::sphere_base(),
                              FgAbelianGroup::from_invariants(0, {2}));
  for (const auto& grp : groups) {
    EquivariantSiteComplex ec(EquivariantSheaf::trivial_action(base, grp));
    const CochainComplex& cx = ec.base().complex();
    const CohomologyGroup& h2 = cx.cohomology(2);
    GroupElement m = h2.rep_of(h2.group().generator(0));
    std::size_t n = grp.size();

    // cobounding data exact by hand, connecting data shifted by sections
    std::vector<GroupElement> w, e;
    for (std::size_t g = 0; g < n; ++g) {
      w.push_back(g == 0 ? cx.level(0).zero() : random_level(cx, 0));
      e.push_back(cx.diff(0).apply(w.back()));
    }
    GlobalSectionsModule gs = global_sections(ec.sheaf());
    SubgroupExpr in_sections(gs.sec.group, gs.sec.ambient, gs.sec.incl);
    std::vector<GroupElement> zv;
    std::vector<std::vector<GroupElement>> f(n, std::vector<GroupElement>());
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h) {
        GroupElement s = random_section(ec);
        zv.push_back(*in_sections.coords(s.coords()));
        f[g].push_back(w[h] - w[grp.mul(g, h)] + w[g] + s);
      }
    GerbeLift lift{m, e, f};
    validate_gerbe_lift(ec, lift);

    // own copy of the defect formula, cross-checking the implementation
    std::vector<GroupElement> kv;
    for (std::size_t g1 = 0; g1 < n; ++g1)
      for (std::size_t g2 = 0; g2 < n; ++g2)
        for (std::size_t g3 = 0; g3 < n; ++g3) {
          GroupElement v = f[g1][grp.mul(g2, g3)] + twist(ec, g1, 0, f[g2][g3]) -
                           f[grp.mul(g1, g2)][g3] - f[g1][g2];
          kv.push_back(*in_sections.coords(v.coords()));
        }

    // building bar cohomology at degree 3 is quadratic-memory-hungry for the
    // larger groups, so above order 3 check class vanishing by solving for a
    // cobounding witness instead of presenting the full quotient group
    if (n <= 3) {
      BarComplex bar(gs.module, 4);
      ObstructionResult kappa = gerbe_obstruction(ec, lift);
      CHECK(kappa.cohomology_class.is_zero());
      GroupElement delta =
          bar.complex().diff(2).apply(bar.cochain_from_values(2, zv));
      CHECK(kappa.cocycle == delta);
      CHECK(kappa.cocycle == bar.cochain_from_values(3, kv));
    } else {
      BarComplex bar(gs.module, 3);
      GroupElement kappa = bar.cochain_from_values(3, kv);
      GroupElement delta =
          bar.complex().diff(2).apply(bar.cochain_from_values(2, zv));
      CHECK(kappa == delta);
      auto cb = bar.complex().solve_coboundary(3, kappa);
      REQUIRE(cb.is_coboundary);
      CHECK(bar.complex().diff(2).apply(*cb.witness) == kappa);
    }
  }
}

TEST_CASE("an action factoring through a quotient inflates the obstruction") {
  FgAbelianGroup z2 = FgAbelianGroup::from_invariants(0, {2});
  EquivariantSheaf a2 = circle_tuples(z2);
  FiniteGroup c4 = FiniteGroup::cyclic(4);
  std::vector<std::size_t> proj = {0, 1, 0, 1};
  std::vector<std::vector<IntMatrix>> action4;
  for (std::size_t g = 0; g < 4; ++g) {
    std::vector<IntMatrix> layer;
    for (std::size_t x = 0; x < a2.site().size(); ++x)
      layer.push_back(a2.action(proj[g], x).matrix());
    action4.push_back(std::move(layer));
  }
  EquivariantSheaf a4(a2.underlying(), c4, action4);
  EquivariantSiteComplex ec2(a2), ec4(a4);

  TorsorLiftSearch l2 = find_torsor_lift(ec2, h1_rep(ec2, {1}));
  TorsorLiftSearch l4 = find_torsor_lift(ec4, h1_rep(ec4, {1}));
  REQUIRE(l2.lift.has_value());
  REQUIRE(l4.lift.has_value());
  ObstructionResult chi2 = torsor_obstruction(ec2, *l2.lift);
  ObstructionResult chi4 = torsor_obstruction(ec4, *l4.lift);
  CHECK_FALSE(chi2.cohomology_class.is_zero());

  GlobalSectionsModule gs4 = global_sections(a4);
  InflationSetup setup =
      inflation_setup(c4, FiniteGroup::cyclic(2), proj, gs4.module);
  BarComplex quot_bar(setup.invariants, 3), big_bar(gs4.module, 3);

  // rewrite the quotient obstruction over the kernel invariants
  GlobalSectionsModule gs2 = global_sections(a2);
  BarComplex b2(gs2.module, 3);
  SubgroupExpr into_inv(setup.invariants.module(), gs4.module.module(), setup.incl);
  std::vector<GroupElement> vals;
  for (std::size_t g = 0; g < 2; ++g)
    for (std::size_t h = 0; h < 2; ++h)
      vals.push_back(*into_inv.coords(b2.value_at(2, chi2.cocycle, {g, h})));
  GroupElement chi2_inv = quot_bar.cochain_from_values(2, vals);

  CHECK(inflate_cochain(setup, quot_bar, big_bar, 2, chi2_inv) == chi4.cocycle);
  GroupHom inf = inflation(setup, quot_bar, big_bar, 2);
  CHECK(inf.apply(quot_bar.complex().cohomology(2).class_of(chi2_inv)) ==
        chi4.cohomology_class);
}

TEST_CASE("induced decision for gerbes") {
  EquivariantSiteComplex ec = cx_of(models::sphere_branched_model());
  const CochainComplex& cx = ec.base().complex();
  CHECK(is_induced_gerbe(ec, cx.level(2).zero()).induced);
  const CohomologyGroup& h2 = cx.cohomology(2);
  CHECK_FALSE(is_induced_gerbe(ec, h2.rep_of(h2.group().generator(0))).induced);
  // twice the generator comes from downstairs: the induced map doubles
  InducedWitness w = is_induced_gerbe(ec, h2.rep_of(h2.group().generator(0) * Int(2)));
  REQUIRE(w.induced);
  CHECK_FALSE(w.witness_class->is_zero());
}

TEST_CASE("one-element group: everything succeeds with zero obstructions") {
  FiniteGroup one = FiniteGroup::cyclic(1);
  EquivariantSheaf a = EquivariantSheaf::trivial_action(
      constant_sheaf(models::sphere_base(), FgAbelianGroup::free_group(1)), one);
  EquivariantSiteComplex ec(a);
  const CochainComplex& cx = ec.base().complex();

  const CohomologyGroup& h2 = cx.cohomology(2);
  GroupElement m = h2.rep_of(h2.group().generator(0));
  GerbeLiftSearch gl = find_gerbe_lift(ec, m);
  REQUIRE(gl.lift.has_value());
  CHECK(gerbe_obstruction(ec, *gl.lift).cohomology_class.is_zero());
  CHECK(is_induced_gerbe(ec, m).induced);

  GroupElement t = cx.level(1).zero();
  TorsorLiftSearch tl = find_torsor_lift(ec, t);
  REQUIRE(tl.lift.has_value());
  CHECK(torsor_obstruction(ec, *tl.lift).cohomology_class.is_zero());
  FixedPointResult r = fixed_point_torsor(ec, *tl.lift);
  CHECK(r.cocycle.has_value());
  CHECK(is_induced_torsor(ec, t).induced);
}

TEST_CASE("corrupted lift data is rejected") {
  EquivariantSiteComplex ec = cx_of(models::interval_branched_model());
  TorsorLiftSearch l = find_torsor_lift(ec, h1_rep(ec, {1}));
  REQUIRE(l.lift.has_value());
  TorsorLift bad = *l.lift;
  bad.cobounding[1] =
      bad.cobounding[1] + ec.base().complex().level(0).generator(0);
  bool still_valid = ec.base().complex().diff(0).apply(bad.cobounding[1]) ==
                     twist(ec, 1, 1, bad.torsor) - bad.torsor;
  if (!still_valid) CHECK_THROWS_AS(torsor_obstruction(ec, bad), MathPrecondition);

  TorsorLift short_lift{l.lift->torsor, {l.lift->cobounding[0]}};
  CHECK_THROWS_AS(torsor_obstruction(ec, short_lift), ShapeError);

  EquivariantSiteComplex ec96 = cx_of(models::sphere_branched_model());
  const CohomologyGroup& h2 = ec96.base().complex().cohomology(2);
  GerbeLiftSearch gl = find_gerbe_lift(ec96, h2.rep_of(h2.group().generator(0)));
  REQUIRE(gl.lift.has_value());
  GerbeLift badg = *gl.lift;
  badg.connecting[1][1] =
      badg.connecting[1][1] + ec96.base().complex().level(0).generator(0);
  CHECK_THROWS_AS(gerbe_obstruction(ec96, badg), MathPrecondition);
}
