#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include <poscoh/modelio.hpp>
#include <poscoh/models.hpp>

using namespace poscoh;
using modelio::ValidationError;
using modelio::json;

namespace {

json minimal_model() {
  return json::parse(R"({
    "name": "tiny",
    "poset": {"points": ["P", "Q", "I"], "below": [["P", "I"], ["Q", "I"]]},
    "group": {"table": [[0, 1], [1, 0]]},
    "sheaf": {
      "stalks": {"P": {"rank": 1, "torsion": []},
                 "Q": {"rank": 1, "torsion": []},
                 "I": {"rank": 1, "torsion": []}},
      "restrictions": {"P<=I": [[1]], "Q<=I": [[1]]}
    }
  })");
}

}  // namespace

TEST_CASE("the four bundled fixtures round-trip through the text format") {
  for (const char* name : {"interval-branched", "sphere-branched",
                           "circle-cover", "sphere-cover"}) {
    INFO(name);
    models::ModelBundle m = models::example_model(name);
    std::string text = modelio::emit_model(m);
    models::ModelBundle back = modelio::parse_model(text);
    CHECK(modelio::bundles_equal(m, back));
    // and the reparse is stable too
    CHECK(modelio::bundles_equal(back,
                                 modelio::parse_model(modelio::emit_model(back))));
  }
}

TEST_CASE("a parsed covering model resolves like the built-in one") {
  models::ModelBundle back = modelio::parse_model(
      modelio::emit_model(models::example_model("interval-branched")));
  EquivariantSiteComplex ec(models::resolve_model(back));
  CHECK(ec.base().complex().cohomology(1).group().to_string() == "Z/2");
}

TEST_CASE("a minimal hand-written model parses") {
  models::ModelBundle m = modelio::model_from_json(minimal_model());
  CHECK(m.name == "tiny");
  CHECK(m.site.size() == 3);
  REQUIRE(m.sheaf.has_value());
  CHECK(m.sheaf->stalk(0).free_rank() == 1);
  CHECK_FALSE(m.action.has_value());
  // no action block: resolves with the trivial action
  EquivariantSheaf a = models::resolve_model(m);
  CHECK(a.group().size() == 2);
}

TEST_CASE("parse errors name the offending field") {
  auto expect_error = [](json j, const std::string& needle) {
    try {
      modelio::model_from_json(j);
      FAIL("expected a validation error mentioning " + needle);
    } catch (const ValidationError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(needle));
    }
  };

  json j = minimal_model();
  j.erase("poset");
  expect_error(j, "model.poset");

  j = minimal_model();
  j["poset"]["below"].push_back({"P", "X"});
  expect_error(j, "model.poset.below[2]");

  j = minimal_model();
  j["group"]["table"] = {{0, 1}, {1}};
  expect_error(j, "model.group.table[1]");

  j = minimal_model();
  j["group"]["table"] = {{0, 1}, {0, 1}};  // no inverse for element 1
  expect_error(j, "model.group");

  j = minimal_model();
  j["sheaf"]["stalks"].erase("Q");
  expect_error(j, "model.sheaf.stalks.Q");

  j = minimal_model();
  j["sheaf"]["stalks"]["X"] = {{"rank", 0}, {"torsion", json::array()}};
  expect_error(j, "model.sheaf.stalks.X");

  j = minimal_model();
  j["sheaf"]["restrictions"]["P<=I"] = {{1, 2}};
  expect_error(j, "model.sheaf.restrictions.P<=I[0]");

  j = minimal_model();
  j["sheaf"]["restrictions"]["P<=Q"] = {{1}};
  expect_error(j, "model.sheaf");

  j = minimal_model();
  j["sheaf"]["restrictions"].erase("Q<=I");
  expect_error(j, "model.sheaf");

  j = minimal_model();
  j["gtorsor"] = {{"transitions", {{"P<=I", 5}}}};
  expect_error(j, "model.gtorsor.transitions.P<=I");

  j = minimal_model();
  j["action"] = json::object();
  expect_error(j, "model.action.1");

  expect_error(json::parse(R"({"name": "x"})"), "model.poset");
}

TEST_CASE("text that is not valid json fails with a position") {
  try {
    modelio::parse_model("{\"poset\": ");
    FAIL("expected a parse failure");
  } catch (const ValidationError& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("model"));
  }
}

TEST_CASE("an action block is validated when the model is resolved") {
  json j = minimal_model();
  // a sign flip on the middle stalk alone cannot commute with restriction
  j["action"] = {{"1", {{"P", {{1}}}, {"Q", {{1}}}, {"I", {{-1}}}}}};
  models::ModelBundle bad = modelio::model_from_json(j);
  CHECK_THROWS_AS(models::resolve_model(bad), MathPrecondition);

  j["action"] = {{"1", {{"P", {{-1}}}, {"Q", {{-1}}}, {"I", {{-1}}}}}};
  models::ModelBundle m = modelio::model_from_json(j);
  REQUIRE(m.action.has_value());
  EquivariantSheaf a = models::resolve_model(m);
  CHECK(a.group().size() == 2);
}

TEST_CASE("sparse cochain files fill unspecified chains with zero") {
  EquivariantSiteComplex ec(
      models::resolve_model(models::example_model("interval-branched")));
  const SiteComplex& sc = ec.base();

  // the middle stalk of the resolved covering model is a two-arc sum
  GroupElement z = modelio::cochain_from_text(
      sc, R"({"degree": 1, "values": {"P<I": [1, 0]}})");
  CHECK_FALSE(z.is_zero());
  CHECK(sc.value_at(1, z, sc.sheaf().site().chain_index(1, {0, 2})) ==
        sc.sheaf().stalk(2).element({Int(1), Int(0)}));
  CHECK(sc.value_at(1, z, sc.sheaf().site().chain_index(1, {1, 2})).is_zero());

  GroupElement zero = modelio::cochain_from_text(sc, R"({"degree": 0})");
  CHECK(zero.is_zero());
}

TEST_CASE("cochain files reject bad chains and bad coordinates") {
  EquivariantSiteComplex ec(
      models::resolve_model(models::example_model("interval-branched")));
  const SiteComplex& sc = ec.base();
  auto expect_error = [&](const std::string& text, const std::string& needle) {
    try {
      modelio::cochain_from_text(sc, text);
      FAIL("expected a validation error mentioning " + needle);
    } catch (const ValidationError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(needle));
    }
  };
  expect_error(R"({"values": {}})", "cocycle.degree");
  expect_error(R"({"degree": 9})", "cocycle.degree");
  expect_error(R"({"degree": 1, "values": {"P<X": [1]}})", "cocycle.values.P<X");
  expect_error(R"({"degree": 1, "values": {"I<P": [1]}})", "not a strict chain");
  expect_error(R"({"degree": 1, "values": {"P": [1]}})", "chain of 2 points");
  expect_error(R"({"degree": 1, "values": {"P<I": [1]}})", "2 coordinates");
}

TEST_CASE("value rendering follows the shared group format") {
  models::ModelBundle m = models::example_model("interval-branched");
  json j = modelio::model_to_json(m);
  CHECK(j["cover"]["sheaf"]["stalks"]["a1"]["torsion"][0] == 2);
  CHECK(j["group"]["table"][1][1] == 0);
  // emitted text is deterministic
  CHECK(modelio::emit_model(m) == modelio::emit_model(m));
}
