// Built-in finite models: a three-point interval, four- and eight-point
// circles, their two-pole suspensions, the covering maps between them, and
// the bundled fixtures the command-line tool exposes by name.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poscoh/possite.hpp"

namespace poscoh::models {

// P < I > Q: two endpoints under one open middle.
inline PosetSite interval_base() {
  return PosetSite({"P", "Q", "I"}, {{0, 2}, {1, 2}});
}

// Two points v1,v2 and two arcs a1,a2, every point under every arc.
inline PosetSite circle_base() {
  return PosetSite({"v1", "v2", "a1", "a2"},
                   {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
}

// Four points w1..w4 and four arcs b1..b4; arc bi sits over wi and w(i+1).
inline PosetSite circle_total() {
  return PosetSite({"w1", "w2", "w3", "w4", "b1", "b2", "b3", "b4"},
                   {{0, 4}, {1, 4}, {1, 5}, {2, 5}, {2, 6}, {3, 6}, {3, 7}, {0, 7}});
}

// Suspension of the four-point circle: poles s,n below every circle point.
inline PosetSite sphere_base() {
  return PosetSite({"v1", "v2", "a1", "a2", "s", "n"},
                   {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {4, 0}, {4, 1}, {5, 0}, {5, 1}});
}

// Suspension of the eight-point circle.
inline PosetSite sphere_total() {
  std::vector<std::pair<std::size_t, std::size_t>> rel = {
      {0, 4}, {1, 4}, {1, 5}, {2, 5}, {2, 6}, {3, 6}, {3, 7}, {0, 7}};
  for (std::size_t w = 0; w < 4; ++w) {
    rel.push_back({8, w});
    rel.push_back({9, w});
  }
  return PosetSite({"w1", "w2", "w3", "w4", "b1", "b2", "b3", "b4", "s", "n"},
                   rel);
}

// Double cover of the circle: wi over v(i mod 2), bi over a(i mod 2).
inline PosetMap circle_cover() {
  return PosetMap(circle_total(), circle_base(), {0, 1, 0, 1, 2, 3, 2, 3});
}

inline DeckAction circle_deck() {
  return DeckAction(circle_cover(), FiniteGroup::cyclic(2),
                    {{0, 1, 2, 3, 4, 5, 6, 7}, {2, 3, 0, 1, 6, 7, 4, 5}});
}

// Branched double cover of the interval: both arcs over the middle, the two
// points over the two endpoints.
inline PosetMap interval_cover() {
  return PosetMap(circle_base(), interval_base(), {0, 1, 2, 2});
}

inline DeckAction interval_deck() {
  return DeckAction(interval_cover(), FiniteGroup::cyclic(2),
                    {{0, 1, 2, 3}, {0, 1, 3, 2}});
}

// Suspension of the circle cover; the poles are fixed.
inline PosetMap sphere_cover() {
  return PosetMap(sphere_total(), sphere_base(), {0, 1, 0, 1, 2, 3, 2, 3, 4, 5});
}

inline DeckAction sphere_deck() {
  return DeckAction(sphere_cover(), FiniteGroup::cyclic(2),
                    {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                     {2, 3, 0, 1, 6, 7, 4, 5, 8, 9}});
}

// Z/2 transition data on the four-point circle: one twisted pair.  The
// circle has no three-point chains, so any assignment composes.
inline GTorsorCocycle circle_twist() {
  return GTorsorCocycle(circle_base(), FiniteGroup::cyclic(2), {{{1, 3}, 1}});
}

// Z/2 transition data on the suspended circle that is a coboundary: the
// nontrivial element sits on every pair going into the arc b1.
inline GTorsorCocycle sphere_twist() {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> c;
  c[{0, 4}] = 1;
  c[{1, 4}] = 1;
  c[{8, 4}] = 1;
  c[{9, 4}] = 1;
  return GTorsorCocycle(sphere_total(), FiniteGroup::cyclic(2), c);
}

// A named fixture: a computation site with a group, plus either a sheaf
// with an explicit action, a sheaf with transition data (tuple twist), or a
// covering presentation whose direct image carries the action.
struct ModelBundle {
  std::string name;
  PosetSite site;
  FiniteGroup group;
  std::optional<Sheaf> sheaf;  // on `site`
  std::optional<std::vector<std::vector<IntMatrix>>> action;
  std::optional<GTorsorCocycle> torsor;
  std::optional<PosetMap> cover;  // cover->tgt == site
  std::optional<DeckAction> deck;
  std::optional<Sheaf> cover_sheaf;  // on cover->src
};

inline EquivariantSheaf resolve_model(const ModelBundle& m) {
  if (m.cover) {
    if (!m.deck || !m.cover_sheaf)
      throw ShapeError("covering model needs deck maps and a covering sheaf");
    return equivariant_pushforward(*m.deck, *m.cover_sheaf);
  }
  if (!m.sheaf) throw ShapeError("model has no sheaf");
  if (m.torsor) return internal_hom_torsor(*m.sheaf, *m.torsor);
  if (m.action) return EquivariantSheaf(*m.sheaf, m.group, *m.action);
  return EquivariantSheaf::trivial_action(*m.sheaf, m.group);
}

inline ModelBundle interval_branched_model() {
  ModelBundle m{"interval-branched", interval_base(), FiniteGroup::cyclic(2),
                std::nullopt, std::nullopt, std::nullopt,
                interval_cover(), interval_deck(),
                constant_sheaf(circle_base(),
                               FgAbelianGroup::from_invariants(0, {2}))};
  return m;
}

inline ModelBundle sphere_branched_model() {
  ModelBundle m{"sphere-branched", sphere_base(), FiniteGroup::cyclic(2),
                std::nullopt, std::nullopt, std::nullopt,
                sphere_cover(), sphere_deck(),
                constant_sheaf(sphere_total(), FgAbelianGroup::free_group(1))};
  return m;
}

inline ModelBundle circle_cover_model() {
  ModelBundle m{"circle-cover", circle_base(), FiniteGroup::cyclic(2),
                std::nullopt, std::nullopt, std::nullopt,
                circle_cover(), circle_deck(),
                constant_sheaf(circle_total(),
                               FgAbelianGroup::from_invariants(0, {2}))};
  return m;
}

inline ModelBundle sphere_cover_model() {
  ModelBundle m{"sphere-cover", sphere_total(), FiniteGroup::cyclic(2),
                constant_sheaf(sphere_total(), FgAbelianGroup::free_group(1)),
                std::nullopt, sphere_twist(),
                std::nullopt, std::nullopt, std::nullopt};
  return m;
}

inline ModelBundle example_model(const std::string& name) {
  if (name == "interval-branched") return interval_branched_model();
  if (name == "sphere-branched") return sphere_branched_model();
  if (name == "circle-cover") return circle_cover_model();
  if (name == "sphere-cover") return sphere_cover_model();
  throw ShapeError("unknown example name: " + name);
}

}  // namespace poscoh::models
