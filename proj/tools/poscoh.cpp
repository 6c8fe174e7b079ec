// Command line front end: load a model file, run one computation, report.
//
// Exit codes: 0 success, 1 malformed or unreadable input, 2 a mathematical
// precondition failed during the computation (non-cocycle data, moving
// classes, missing lifts).

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "poscoh/descent.hpp"
#include "poscoh/lowdeg.hpp"
#include "poscoh/modelio.hpp"
#include "poscoh/models.hpp"

using nlohmann::json;
using namespace poscoh;

namespace {

struct Options {
  std::string model_path;
  bool as_json = false;
  unsigned long long seed = 20260823ULL;  // reserved for randomized subroutines
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw modelio::ValidationError(path + ": cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  models::ModelBundle bundle;
  EquivariantSheaf sheaf;
};

// Parse and resolve; any failure here is an input problem, not a math one.
Loaded load_model(const std::string& path) {
  if (path.empty())
    throw modelio::ValidationError("no model file given; pass --model FILE");
  models::ModelBundle b = modelio::parse_model(read_file(path), "model");
  try {
    EquivariantSheaf a = models::resolve_model(b);
    return Loaded{std::move(b), std::move(a)};
  } catch (const MathPrecondition& e) {
    throw modelio::ValidationError("model: " + std::string(e.what()));
  } catch (const ShapeError& e) {
    throw modelio::ValidationError("model: " + std::string(e.what()));
  }
}

// Degree-2 chases need the site direction padded even on short posets.
EquivariantSiteComplex padded_complex(const EquivariantSheaf& a) {
  return EquivariantSiteComplex(
      a, std::max<std::size_t>(a.site().max_chain_degree(), 2));
}

GroupElement load_cochain(const SiteComplex& sc, const std::string& path,
                          std::size_t degree) {
  std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw modelio::ValidationError("cocycle: " + std::string(e.what()));
  }
  if (j.is_object() && j.contains("degree") && j["degree"].is_number_integer() &&
      j["degree"].get<long long>() != static_cast<long long>(degree))
    throw modelio::ValidationError("cocycle.degree: this command expects degree " +
                                   std::to_string(degree));
  return modelio::cochain_from_json(sc, j, "cocycle");
}

std::string fmt_coords(const GroupElement& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.coords().size(); ++i) {
    if (i) s += ", ";
    s += v.coords()[i].str();
  }
  return s + ")";
}

json coords_json(const GroupElement& v) {
  json a = json::array();
  for (const Int& c : v.coords()) {
    if (c > Int(std::numeric_limits<long long>::max()) ||
        c < Int(std::numeric_limits<long long>::min()))
      a.push_back(c.str());
    else
      a.push_back(c.convert_to<long long>());
  }
  return a;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int run_sheaf_cohomology(const Options& o, std::size_t degree) {
  Loaded m = load_model(o.model_path);
  SiteComplex sc(m.sheaf.underlying());
  std::string g = degree <= sc.top()
                      ? sc.complex().cohomology(degree).group().to_string()
                      : std::string("0");
  if (o.as_json)
    emit(json{{"command", "sheaf-cohomology"}, {"degree", degree}, {"group", g}});
  else
    std::cout << g << "\n";
  return 0;
}

int run_group_cohomology(const Options& o, std::size_t degree) {
  Loaded m = load_model(o.model_path);
  GlobalSectionsModule gs = global_sections(m.sheaf);
  BarComplex bar(gs.module, degree + 1);
  std::string g = bar.complex().cohomology(degree).group().to_string();
  if (o.as_json)
    emit(json{{"command", "group-cohomology"}, {"degree", degree}, {"group", g}});
  else
    std::cout << g << "\n";
  return 0;
}

int run_local_vanishing(const Options& o, std::size_t degree) {
  Loaded m = load_model(o.model_path);
  LocalVanishing lv = stalkwise_local_vanishing(m.sheaf, degree);
  const PosetSite& site = m.sheaf.site();
  std::string line =
      "local vanishing at degree " + std::to_string(lv.degree) + ": ";
  if (lv.all) {
    line += "holds";
  } else {
    line += "fails at";
    for (std::size_t x = 0; x < lv.vanishes.size(); ++x)
      if (!lv.vanishes[x]) line += " " + site.name(x) + " (" + lv.group_at[x] + ")";
  }
  if (o.as_json) {
    json pts = json::array();
    for (std::size_t x = 0; x < lv.vanishes.size(); ++x)
      pts.push_back(json{{"point", site.name(x)},
                         {"group", lv.group_at[x]},
                         {"vanishes", static_cast<bool>(lv.vanishes[x])}});
    emit(json{{"command", "local-vanishing"},
              {"degree", degree},
              {"holds", lv.all},
              {"points", pts}});
  } else {
    std::cout << line << "\n";
    for (std::size_t x = 0; x < lv.vanishes.size(); ++x)
      std::cout << site.name(x) << ": " << lv.group_at[x] << "\n";
  }
  return 0;
}

int report_obstruction(const Options& o, const char* cmd,
                       const ObstructionResult& r) {
  std::string grp = r.cohomology_class.group().to_string();
  bool zero = r.cohomology_class.is_zero();
  if (o.as_json) {
    emit(json{{"command", cmd},
              {"degree", r.degree},
              {"group", grp},
              {"class", coords_json(r.cohomology_class)},
              {"zero", zero}});
  } else {
    std::cout << "obstruction degree: " << r.degree << "\n"
              << "obstruction group: " << grp << "\n"
              << "class: " << fmt_coords(r.cohomology_class) << "\n"
              << "zero: " << (zero ? "yes" : "no") << "\n";
  }
  return 0;
}

int run_torsor_obstruction(const Options& o, const std::string& cocycle_path) {
  Loaded m = load_model(o.model_path);
  EquivariantSiteComplex ec = padded_complex(m.sheaf);
  GroupElement t = load_cochain(ec.base(), cocycle_path, 1);
  TorsorLiftSearch s = find_torsor_lift(ec, t);
  if (!s.lift)
    throw MathPrecondition("class moves under group element " +
                           std::to_string(*s.moving_g));
  return report_obstruction(o, "torsor-obstruction",
                            torsor_obstruction(ec, *s.lift));
}

int run_gerbe_obstruction(const Options& o, const std::string& cocycle_path) {
  Loaded m = load_model(o.model_path);
  EquivariantSiteComplex ec = padded_complex(m.sheaf);
  GroupElement z = load_cochain(ec.base(), cocycle_path, 2);
  GerbeLiftSearch s = find_gerbe_lift(ec, z);
  if (s.moving_g)
    throw MathPrecondition("class moves under group element " +
                           std::to_string(*s.moving_g));
  if (!s.lift) {
    std::string msg = "no connecting data exists for any cobounding choice";
    if (s.blocked_class)
      msg += "; blocking degree-1 class " + fmt_coords(*s.blocked_class);
    throw MathPrecondition(msg);
  }
  return report_obstruction(o, "gerbe-obstruction",
                            gerbe_obstruction(ec, *s.lift));
}

int run_induced_check(const Options& o, std::size_t degree,
                      const std::string& cocycle_path) {
  Loaded m = load_model(o.model_path);
  EquivariantSiteComplex ec = padded_complex(m.sheaf);
  GroupElement z = load_cochain(ec.base(), cocycle_path, degree);
  InducedWitness w =
      degree == 1 ? is_induced_torsor(ec, z) : is_induced_gerbe(ec, z);
  GroupElement cls = ec.base().complex().cohomology(degree).class_of(z);
  if (o.as_json) {
    json j{{"command", "induced-check"},
           {"degree", degree},
           {"group", cls.group().to_string()},
           {"class", coords_json(cls)},
           {"induced", w.induced}};
    if (w.witness_class) {
      j["invariant_group"] = w.witness_class->group().to_string();
      j["invariant_class"] = coords_json(*w.witness_class);
    } else {
      j["invariant_group"] = nullptr;
      j["invariant_class"] = nullptr;
    }
    emit(j);
  } else {
    std::cout << "degree: " << degree << "\n"
              << "class: " << fmt_coords(cls) << " in "
              << cls.group().to_string() << "\n"
              << "induced: " << (w.induced ? "yes" : "no") << "\n";
    if (w.witness_class)
      std::cout << "invariant class: " << fmt_coords(*w.witness_class) << " in "
                << w.witness_class->group().to_string() << "\n";
  }
  return 0;
}

int run_les_check(const Options& o) {
  Loaded m = load_model(o.model_path);
  ExactnessReport r = exactness_report(m.sheaf);
  if (o.as_json) {
    json nodes = json::array();
    for (const NodeReport& nr : r.nodes)
      nodes.push_back(json{{"name", nr.name},
                           {"image", nr.image.group.to_string()},
                           {"kernel", nr.kernel.group.to_string()},
                           {"exact", nr.exact},
                           {"notes", nr.notes}});
    emit(json{{"command", "les-check"},
              {"nodes", nodes},
              {"vanishing", json::array({r.vanishing_line1, r.vanishing_line2})},
              {"all_exact", r.all_exact}});
  } else {
    std::cout << r.render();
  }
  return 0;
}

int run_hs_compare(const Options& o) {
  Loaded m = load_model(o.model_path);
  LowDegreeComplex ldc(m.sheaf);
  HsCompareReport rep;
  if (m.bundle.cover) {
    // the plain sheaf lives on the covering site, so compare totals upstairs
    SiteComplex direct(*m.bundle.cover_sheaf);
    std::size_t hi = std::min<std::size_t>(3, ldc.group_levels() - 1);
    for (std::size_t nd = 0; nd <= hi; ++nd) {
      HsDegreeLine line;
      line.degree = nd;
      line.total_shape = ldc.total_cohomology(nd).group().to_string();
      line.direct_shape =
          nd <= direct.top()
              ? direct.complex().cohomology(nd).group().to_string()
              : std::string("0");
      line.match = line.total_shape == line.direct_shape;
      rep.all_match = rep.all_match && line.match;
      rep.degrees.push_back(std::move(line));
    }
    for (std::size_t p = 0; p <= 3; ++p) {
      std::vector<std::string> row;
      for (std::size_t q = 0; p + q <= 3; ++q)
        row.push_back(ldc.e2_term(p, q).to_string());
      rep.e2.push_back(std::move(row));
    }
  } else {
    rep = hs_low_degree_compare(ldc, *m.bundle.sheaf);
  }
  if (o.as_json) {
    json degs = json::array();
    for (const HsDegreeLine& d : rep.degrees)
      degs.push_back(json{{"degree", d.degree},
                          {"total", d.total_shape},
                          {"direct", d.direct_shape},
                          {"match", d.match}});
    emit(json{{"command", "hs-compare"},
              {"degrees", degs},
              {"e2", rep.e2},
              {"all_match", rep.all_match}});
  } else {
    std::cout << rep.render();
  }
  return 0;
}

int run_example(const Options& o, const std::string& name, std::string out) {
  models::ModelBundle b = models::example_model(name);
  if (out.empty()) out = b.name + ".json";
  std::ofstream f(out, std::ios::binary);
  if (!f)
    throw modelio::ValidationError(out + ": cannot write file");
  f << modelio::emit_model(b);
  f.flush();
  if (!f)
    throw modelio::ValidationError(out + ": write failed");
  if (o.as_json)
    emit(json{{"command", "example"}, {"name", b.name}, {"path", out}});
  else
    std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"cohomology of sheaves on finite posets with a finite symmetry group"};
  app.require_subcommand(1);
  app.add_option("--model", o.model_path, "model description file (json)");
  app.add_flag("--json", o.as_json, "machine readable output");
  app.add_option("--seed", o.seed, "seed for randomized subroutines");

  std::size_t degree = 0;
  std::string cocycle_path, example_name, out_path;

  CLI::App* sheafh = app.add_subcommand(
      "sheaf-cohomology", "cohomology of the underlying sheaf in one degree");
  sheafh->add_option("--degree", degree, "cohomological degree")->required();

  CLI::App* grouph = app.add_subcommand(
      "group-cohomology", "group cohomology of the global sections module");
  grouph->add_option("--degree", degree, "cohomological degree")->required();

  CLI::App* vanish = app.add_subcommand(
      "local-vanishing", "stalkwise group cohomology vanishing test");
  vanish->add_option("--degree", degree, "positive group degree")->required();

  CLI::App* torso = app.add_subcommand(
      "torsor-obstruction",
      "degree-2 obstruction class of an invariant degree-1 cocycle");
  torso->add_option("--cocycle", cocycle_path, "cocycle value file (json)")
      ->required();

  CLI::App* gerbe = app.add_subcommand(
      "gerbe-obstruction",
      "degree-3 obstruction class of an invariant degree-2 cocycle");
  gerbe->add_option("--cocycle", cocycle_path, "cocycle value file (json)")
      ->required();

  CLI::App* induced = app.add_subcommand(
      "induced-check", "does the class come from the fixed subsheaf");
  induced->add_option("--degree", degree, "1 or 2")
      ->required()
      ->check(CLI::Range(1, 2));
  induced->add_option("--cocycle", cocycle_path, "cocycle value file (json)")
      ->required();

  CLI::App* les = app.add_subcommand(
      "les-check", "exactness certificates for the six-node sequence");

  CLI::App* hs = app.add_subcommand(
      "hs-compare", "total cohomology against the plain sheaf, with the e2 table");

  CLI::App* ex =
      app.add_subcommand("example", "write a named example model file");
  ex->add_option("name", example_name,
                 "interval-branched | sphere-branched | circle-cover | sphere-cover")
      ->required();
  ex->add_option("--out", out_path, "output path (default <name>.json)");

  for (CLI::App* s : {sheafh, grouph, vanish, torso, gerbe, induced, les, hs, ex})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sheafh->parsed()) return run_sheaf_cohomology(o, degree);
    if (grouph->parsed()) return run_group_cohomology(o, degree);
    if (vanish->parsed()) return run_local_vanishing(o, degree);
    if (torso->parsed()) return run_torsor_obstruction(o, cocycle_path);
    if (gerbe->parsed()) return run_gerbe_obstruction(o, cocycle_path);
    if (induced->parsed()) return run_induced_check(o, degree, cocycle_path);
    if (les->parsed()) return run_les_check(o);
    if (hs->parsed()) return run_hs_compare(o);
    if (ex->parsed()) return run_example(o, example_name, out_path);
  } catch (const modelio::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const MathPrecondition& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
