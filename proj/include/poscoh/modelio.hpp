// JSON reading and writing for the bundled finite models: poset sites,
// finite groups as multiplication tables, sheaves with explicit stalk
// presentations and restriction matrices, stalkwise actions, transition
// data, covering presentations, and sparse cochain files.
#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "poscoh/models.hpp"
#include "poscoh/possite.hpp"

namespace poscoh::modelio {

using nlohmann::json;

// Raised for malformed input; the message names the offending field.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
}

inline const json& need(const json& j, const char* key,
                        const std::string& where) {
  expect_object(j, where);
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(where + "." + key + ": missing field");
  return *it;
}

inline const json* maybe(const json& j, const char* key,
                         const std::string& where) {
  expect_object(j, where);
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline long long as_int(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_string()) {
    try {
      return std::stoll(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw ValidationError(where + ": expected an integer");
}

inline std::size_t as_index(const json& j, const std::string& where) {
  long long v = as_int(j, where);
  if (v < 0) throw ValidationError(where + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline std::string as_str(const json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError(where + ": expected a string");
  return j.get<std::string>();
}

inline const json& as_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  return j;
}

inline long long small(const Int& v, const std::string& where) {
  if (v > Int(std::numeric_limits<long long>::max()) ||
      v < Int(std::numeric_limits<long long>::min()))
    throw ValidationError(where + ": entry too large to serialize");
  return v.convert_to<long long>();
}

// split "a<=b" into point indices on the given site
inline std::pair<std::size_t, std::size_t> pair_key(const PosetSite& site,
                                                    const std::string& key,
                                                    const std::string& where) {
  std::size_t at = key.find("<=");
  if (at == std::string::npos)
    throw ValidationError(where + "." + key + ": expected a key like \"a<=b\"");
  std::string a = key.substr(0, at), b = key.substr(at + 2);
  try {
    return {site.index(a), site.index(b)};
  } catch (const std::exception&) {
    throw ValidationError(where + "." + key + ": unknown point name");
  }
}

}  // namespace detail

// --- sites ------------------------------------------------------------------

inline json site_to_json(const PosetSite& site) {
  json points = json::array();
  for (std::size_t i = 0; i < site.size(); ++i) points.push_back(site.name(i));
  json below = json::array();
  for (std::size_t a = 0; a < site.size(); ++a)
    for (std::size_t b = 0; b < site.size(); ++b)
      if (site.lt(a, b)) below.push_back({site.name(a), site.name(b)});
  return json{{"points", points}, {"below", below}};
}

inline PosetSite site_from_json(const json& j, const std::string& where) {
  const json& pts = detail::as_array(detail::need(j, "points", where),
                                     where + ".points");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < pts.size(); ++i)
    names.push_back(
        detail::as_str(pts[i], where + ".points[" + std::to_string(i) + "]"));
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  if (const json* below = detail::maybe(j, "below", where)) {
    const json& arr = detail::as_array(*below, where + ".below");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string at = where + ".below[" + std::to_string(i) + "]";
      const json& pair = detail::as_array(arr[i], at);
      if (pair.size() != 2)
        throw ValidationError(at + ": expected a pair of point names");
      std::string a = detail::as_str(pair[0], at);
      std::string b = detail::as_str(pair[1], at);
      std::size_t ia = names.size(), ib = names.size();
      for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == a) ia = k;
        if (names[k] == b) ib = k;
      }
      if (ia == names.size() || ib == names.size())
        throw ValidationError(at + ": unknown point name");
      rel.push_back({ia, ib});
    }
  }
  try {
    return PosetSite(std::move(names), std::move(rel));
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

// --- groups -----------------------------------------------------------------

inline json group_to_json(const FiniteGroup& g) {
  json table = json::array();
  for (std::size_t a = 0; a < g.size(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < g.size(); ++b) row.push_back(g.mul(a, b));
    table.push_back(std::move(row));
  }
  return json{{"table", table}};
}

inline FiniteGroup group_from_json(const json& j, const std::string& where) {
  const json& t =
      detail::as_array(detail::need(j, "table", where), where + ".table");
  std::vector<std::vector<std::size_t>> table;
  for (std::size_t a = 0; a < t.size(); ++a) {
    std::string at = where + ".table[" + std::to_string(a) + "]";
    const json& row = detail::as_array(t[a], at);
    if (row.size() != t.size())
      throw ValidationError(at + ": table must be square");
    std::vector<std::size_t> r;
    for (std::size_t b = 0; b < row.size(); ++b) {
      std::size_t v =
          detail::as_index(row[b], at + "[" + std::to_string(b) + "]");
      if (v >= t.size())
        throw ValidationError(at + "[" + std::to_string(b) +
                              "]: entry out of range");
      r.push_back(v);
    }
    table.push_back(std::move(r));
  }
  try {
    return FiniteGroup(std::move(table));
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

// --- matrices and stalk presentations ---------------------------------------

inline json matrix_to_json(const IntMatrix& m, const std::string& where) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(detail::small(m.at(i, j), where));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline IntMatrix matrix_from_json(const json& j, std::size_t rows,
                                  std::size_t cols, const std::string& where) {
  const json& arr = detail::as_array(j, where);
  if (arr.size() != rows)
    throw ValidationError(where + ": expected " + std::to_string(rows) +
                          " rows, found " + std::to_string(arr.size()));
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::string at = where + "[" + std::to_string(i) + "]";
    const json& row = detail::as_array(arr[i], at);
    if (row.size() != cols)
      throw ValidationError(at + ": expected " + std::to_string(cols) +
                            " entries, found " + std::to_string(row.size()));
    for (std::size_t k = 0; k < cols; ++k)
      m.at(i, k) = Int(detail::as_int(row[k], at + "[" + std::to_string(k) + "]"));
  }
  return m;
}

inline json stalk_to_json(const FgAbelianGroup& g, const std::string& where) {
  if (!g.has_diagonal_relations())
    throw ValidationError(where + ": only rank-and-torsion stalks serialize");
  json torsion = json::array();
  for (const Int& m : g.diagonal_moduli())
    if (m != 0) torsion.push_back(detail::small(m, where));
  return json{{"rank", g.free_rank()}, {"torsion", torsion}};
}

inline FgAbelianGroup stalk_from_json(const json& j, const std::string& where) {
  std::size_t rank = detail::as_index(detail::need(j, "rank", where),
                                      where + ".rank");
  std::vector<Int> torsion;
  if (const json* t = detail::maybe(j, "torsion", where)) {
    const json& arr = detail::as_array(*t, where + ".torsion");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      long long v = detail::as_int(arr[i],
                                   where + ".torsion[" + std::to_string(i) + "]");
      if (v < 2)
        throw ValidationError(where + ".torsion[" + std::to_string(i) +
                              "]: factors must be at least 2");
      torsion.push_back(Int(v));
    }
  }
  return FgAbelianGroup::from_invariants(rank, torsion);
}

// --- sheaves ----------------------------------------------------------------

inline json sheaf_to_json(const Sheaf& f, const std::string& where) {
  const PosetSite& site = f.site();
  json stalks = json::object();
  for (std::size_t x = 0; x < site.size(); ++x)
    stalks[site.name(x)] =
        stalk_to_json(f.stalk(x), where + ".stalks." + site.name(x));
  json restr = json::object();
  for (std::size_t x = 0; x < site.size(); ++x)
    for (std::size_t y = 0; y < site.size(); ++y)
      if (site.lt(x, y)) {
        std::string key = site.name(x) + "<=" + site.name(y);
        restr[key] = matrix_to_json(f.restriction(x, y).matrix(),
                                    where + ".restrictions." + key);
      }
  return json{{"stalks", stalks}, {"restrictions", restr}};
}

inline Sheaf sheaf_from_json(const json& j, const PosetSite& site,
                             const std::string& where) {
  const json& stalks = detail::need(j, "stalks", where);
  detail::expect_object(stalks, where + ".stalks");
  std::vector<FgAbelianGroup> groups;
  for (std::size_t x = 0; x < site.size(); ++x) {
    auto it = stalks.find(site.name(x));
    if (it == stalks.end())
      throw ValidationError(where + ".stalks." + site.name(x) +
                            ": missing stalk");
    groups.push_back(
        stalk_from_json(*it, where + ".stalks." + site.name(x)));
  }
  for (auto it = stalks.begin(); it != stalks.end(); ++it) {
    bool known = false;
    for (std::size_t x = 0; x < site.size(); ++x)
      if (site.name(x) == it.key()) known = true;
    if (!known)
      throw ValidationError(where + ".stalks." + it.key() +
                            ": unknown point name");
  }
  std::map<std::pair<std::size_t, std::size_t>, IntMatrix> restr;
  if (const json* r = detail::maybe(j, "restrictions", where)) {
    detail::expect_object(*r, where + ".restrictions");
    for (auto it = r->begin(); it != r->end(); ++it) {
      auto [x, y] =
          detail::pair_key(site, it.key(), where + ".restrictions");
      restr.emplace(
          std::make_pair(x, y),
          matrix_from_json(it.value(), groups[x].ngens(), groups[y].ngens(),
                           where + ".restrictions." + it.key()));
    }
  }
  try {
    return Sheaf(site, std::move(groups), restr);
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

// --- transition data --------------------------------------------------------

inline json gtorsor_to_json(const GTorsorCocycle& m, const std::string&) {
  const PosetSite& site = m.site();
  json tr = json::object();
  for (std::size_t x = 0; x < site.size(); ++x)
    for (std::size_t y = 0; y < site.size(); ++y)
      if (site.lt(x, y) && m.at(x, y) != m.group().identity())
        tr[site.name(x) + "<=" + site.name(y)] = m.at(x, y);
  return json{{"transitions", tr}};
}

inline GTorsorCocycle gtorsor_from_json(const json& j, const PosetSite& site,
                                        const FiniteGroup& g,
                                        const std::string& where) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> tr;
  if (const json* t = detail::maybe(j, "transitions", where)) {
    detail::expect_object(*t, where + ".transitions");
    for (auto it = t->begin(); it != t->end(); ++it) {
      auto key = detail::pair_key(site, it.key(), where + ".transitions");
      std::size_t v = detail::as_index(it.value(),
                                       where + ".transitions." + it.key());
      if (v >= g.size())
        throw ValidationError(where + ".transitions." + it.key() +
                              ": element out of range");
      tr.emplace(key, v);
    }
  }
  try {
    return GTorsorCocycle(site, g, tr);
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

// --- whole bundles ----------------------------------------------------------

inline json model_to_json(const models::ModelBundle& m) {
  json j;
  j["name"] = m.name;
  j["poset"] = site_to_json(m.site);
  j["group"] = group_to_json(m.group);
  if (m.sheaf) j["sheaf"] = sheaf_to_json(*m.sheaf, "model.sheaf");
  if (m.action) {
    json act = json::object();
    for (std::size_t g = 1; g < m.group.size(); ++g) {
      json layer = json::object();
      for (std::size_t x = 0; x < m.site.size(); ++x)
        layer[m.site.name(x)] = matrix_to_json(
            (*m.action)[g][x], "model.action." + std::to_string(g));
      act[std::to_string(g)] = std::move(layer);
    }
    j["action"] = std::move(act);
  }
  if (m.torsor) j["gtorsor"] = gtorsor_to_json(*m.torsor, "model.gtorsor");
  if (m.cover) {
    json c;
    c["poset"] = site_to_json(m.cover->src);
    json to = json::object();
    for (std::size_t x = 0; x < m.cover->src.size(); ++x)
      to[m.cover->src.name(x)] = m.site.name(m.cover->to[x]);
    c["map"] = std::move(to);
    if (m.deck) {
      json deck = json::object();
      for (std::size_t g = 1; g < m.deck->group.size(); ++g) {
        json images = json::array();
        for (std::size_t x = 0; x < m.cover->src.size(); ++x)
          images.push_back(m.cover->src.name(m.deck->perm[g][x]));
        deck[std::to_string(g)] = std::move(images);
      }
      c["deck"] = std::move(deck);
    }
    if (m.cover_sheaf)
      c["sheaf"] = sheaf_to_json(*m.cover_sheaf, "model.cover.sheaf");
    j["cover"] = std::move(c);
  }
  return j;
}

inline models::ModelBundle model_from_json(const json& j,
                                           const std::string& where = "model") {
  models::ModelBundle m{
      "",       site_from_json(detail::need(j, "poset", where), where + ".poset"),
      group_from_json(detail::need(j, "group", where), where + ".group"),
      std::nullopt, std::nullopt, std::nullopt,
      std::nullopt, std::nullopt, std::nullopt};
  if (const json* n = detail::maybe(j, "name", where))
    m.name = detail::as_str(*n, where + ".name");
  if (const json* s = detail::maybe(j, "sheaf", where))
    m.sheaf = sheaf_from_json(*s, m.site, where + ".sheaf");

  if (const json* a = detail::maybe(j, "action", where)) {
    if (!m.sheaf)
      throw ValidationError(where + ".action: needs a sheaf to act on");
    detail::expect_object(*a, where + ".action");
    std::vector<std::vector<IntMatrix>> act(m.group.size());
    for (std::size_t x = 0; x < m.site.size(); ++x)
      act[0].push_back(IntMatrix::identity(m.sheaf->stalk(x).ngens()));
    for (std::size_t g = 1; g < m.group.size(); ++g) {
      std::string at = where + ".action." + std::to_string(g);
      auto it = a->find(std::to_string(g));
      if (it == a->end())
        throw ValidationError(at + ": missing group element layer");
      for (std::size_t x = 0; x < m.site.size(); ++x) {
        std::string pat = at + "." + m.site.name(x);
        auto px = it->find(m.site.name(x));
        if (px == it->end())
          throw ValidationError(pat + ": missing action matrix");
        std::size_t n = m.sheaf->stalk(x).ngens();
        act[g].push_back(matrix_from_json(*px, n, n, pat));
      }
    }
    m.action = std::move(act);
  }

  if (const json* t = detail::maybe(j, "gtorsor", where)) {
    if (!m.sheaf)
      throw ValidationError(where + ".gtorsor: needs a sheaf to twist");
    m.torsor = gtorsor_from_json(*t, m.site, m.group, where + ".gtorsor");
  }

  if (const json* c = detail::maybe(j, "cover", where)) {
    std::string at = where + ".cover";
    PosetSite src =
        site_from_json(detail::need(*c, "poset", at), at + ".poset");
    const json& to = detail::need(*c, "map", at);
    detail::expect_object(to, at + ".map");
    std::vector<std::size_t> images(src.size());
    for (std::size_t x = 0; x < src.size(); ++x) {
      auto it = to.find(src.name(x));
      if (it == to.end())
        throw ValidationError(at + ".map." + src.name(x) + ": missing image");
      std::string tgt = detail::as_str(*it, at + ".map." + src.name(x));
      try {
        images[x] = m.site.index(tgt);
      } catch (const std::exception&) {
        throw ValidationError(at + ".map." + src.name(x) +
                              ": unknown point in the base");
      }
    }
    try {
      m.cover = PosetMap(src, m.site, std::move(images));
    } catch (const std::exception& e) {
      throw ValidationError(at + ".map: " + std::string(e.what()));
    }

    std::vector<std::vector<std::size_t>> perms(m.group.size());
    for (std::size_t x = 0; x < src.size(); ++x) perms[0].push_back(x);
    const json* deck = detail::maybe(*c, "deck", at);
    for (std::size_t g = 1; g < m.group.size(); ++g) {
      std::string gat = at + ".deck." + std::to_string(g);
      if (!deck || deck->find(std::to_string(g)) == deck->end())
        throw ValidationError(gat + ": missing permutation");
      const json& arr = detail::as_array(*deck->find(std::to_string(g)), gat);
      if (arr.size() != src.size())
        throw ValidationError(gat + ": one image per covering point required");
      std::vector<std::size_t> p(src.size());
      for (std::size_t x = 0; x < src.size(); ++x) {
        std::string name =
            detail::as_str(arr[x], gat + "[" + std::to_string(x) + "]");
        try {
          p[x] = src.index(name);
        } catch (const std::exception&) {
          throw ValidationError(gat + "[" + std::to_string(x) +
                                "]: unknown covering point");
        }
      }
      perms[g] = std::move(p);
    }
    try {
      m.deck = DeckAction(*m.cover, m.group, std::move(perms));
    } catch (const std::exception& e) {
      throw ValidationError(at + ".deck: " + std::string(e.what()));
    }

    if (const json* s = detail::maybe(*c, "sheaf", at))
      m.cover_sheaf = sheaf_from_json(*s, m.cover->src, at + ".sheaf");
    else
      throw ValidationError(at + ".sheaf: covering models need a sheaf");
  }

  if (!m.sheaf && !m.cover)
    throw ValidationError(where + ": needs either a sheaf or a cover");
  return m;
}

inline std::string emit_model(const models::ModelBundle& m) {
  return model_to_json(m).dump(2) + "\n";
}

inline models::ModelBundle parse_model(const std::string& text,
                                       const std::string& where = "model") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return model_from_json(j, where);
}

// --- sparse cochain files ---------------------------------------------------

// {"degree": q, "values": {"a<b<c": [coords of the value at c]}};
// chains not listed are zero.
inline GroupElement cochain_from_json(const SiteComplex& sc, const json& j,
                                      const std::string& where = "cocycle") {
  std::size_t q = detail::as_index(detail::need(j, "degree", where),
                                   where + ".degree");
  if (q > sc.top())
    throw ValidationError(where + ".degree: no level " + std::to_string(q) +
                          " in this complex");
  const PosetSite& site = sc.sheaf().site();
  const auto& chains = site.chains(q);
  std::vector<GroupElement> vals;
  vals.reserve(chains.size());
  for (const auto& c : chains) vals.push_back(sc.sheaf().stalk(c.back()).zero());

  if (const json* v = detail::maybe(j, "values", where)) {
    detail::expect_object(*v, where + ".values");
    for (auto it = v->begin(); it != v->end(); ++it) {
      std::string at = where + ".values." + it.key();
      std::vector<std::size_t> chain;
      std::size_t start = 0;
      const std::string& key = it.key();
      while (true) {
        std::size_t cut = key.find('<', start);
        std::string part = key.substr(
            start, cut == std::string::npos ? std::string::npos : cut - start);
        try {
          chain.push_back(site.index(part));
        } catch (const std::exception&) {
          throw ValidationError(at + ": unknown point name \"" + part + "\"");
        }
        if (cut == std::string::npos) break;
        start = cut + 1;
      }
      if (chain.size() != q + 1)
        throw ValidationError(at + ": expected a chain of " +
                              std::to_string(q + 1) + " points");
      std::size_t idx;
      try {
        idx = site.chain_index(q, chain);
      } catch (const std::exception&) {
        throw ValidationError(at + ": not a strict chain of the site");
      }
      const FgAbelianGroup& stalk = sc.sheaf().stalk(chain.back());
      const json& arr = detail::as_array(it.value(), at);
      if (arr.size() != stalk.ngens())
        throw ValidationError(at + ": expected " +
                              std::to_string(stalk.ngens()) +
                              " coordinates");
      std::vector<Int> coords;
      for (std::size_t k = 0; k < arr.size(); ++k)
        coords.push_back(
            Int(detail::as_int(arr[k], at + "[" + std::to_string(k) + "]")));
      vals[idx] = stalk.element(std::move(coords));
    }
  }
  return sc.cochain_from_values(q, vals);
}

inline GroupElement cochain_from_text(const SiteComplex& sc,
                                      const std::string& text,
                                      const std::string& where = "cocycle") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return cochain_from_json(sc, j, where);
}

// --- round-trip comparison --------------------------------------------------

inline bool sheaves_equal(const Sheaf& a, const Sheaf& b) {
  if (!(a.site() == b.site())) return false;
  for (std::size_t x = 0; x < a.site().size(); ++x)
    if (!a.stalk(x).same_presentation(b.stalk(x))) return false;
  for (std::size_t x = 0; x < a.site().size(); ++x)
    for (std::size_t y = 0; y < a.site().size(); ++y)
      if (a.site().lt(x, y) &&
          !(a.restriction(x, y).matrix() == b.restriction(x, y).matrix()))
        return false;
  return true;
}

inline bool bundles_equal(const models::ModelBundle& a,
                          const models::ModelBundle& b) {
  if (a.name != b.name || !(a.site == b.site) || !(a.group == b.group))
    return false;
  if (a.sheaf.has_value() != b.sheaf.has_value()) return false;
  if (a.sheaf && !sheaves_equal(*a.sheaf, *b.sheaf)) return false;
  if (a.action.has_value() != b.action.has_value()) return false;
  if (a.action) {
    for (std::size_t g = 0; g < a.group.size(); ++g)
      for (std::size_t x = 0; x < a.site.size(); ++x)
        if (!((*a.action)[g][x] == (*b.action)[g][x])) return false;
  }
  if (a.torsor.has_value() != b.torsor.has_value()) return false;
  if (a.torsor) {
    if (!(a.torsor->group() == b.torsor->group())) return false;
    for (std::size_t x = 0; x < a.site.size(); ++x)
      for (std::size_t y = 0; y < a.site.size(); ++y)
        if (a.site.lt(x, y) && a.torsor->at(x, y) != b.torsor->at(x, y))
          return false;
  }
  if (a.cover.has_value() != b.cover.has_value()) return false;
  if (a.cover) {
    if (!(a.cover->src == b.cover->src) || a.cover->to != b.cover->to)
      return false;
    if (a.deck.has_value() != b.deck.has_value()) return false;
    if (a.deck && a.deck->perm != b.deck->perm) return false;
    if (a.cover_sheaf.has_value() != b.cover_sheaf.has_value()) return false;
    if (a.cover_sheaf && !sheaves_equal(*a.cover_sheaf, *b.cover_sheaf))
      return false;
  }
  return true;
}

}  // namespace poscoh::modelio
