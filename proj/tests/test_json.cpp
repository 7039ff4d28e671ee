// Serialization: exact round trips, schema and location-aware error messages,
// straightening result output, and the numeric-constants marker.
#include <doctest.h>

#include <json.hpp>

#include "circleflow/errors.hpp"
#include "circleflow/flows.hpp"
#include "circleflow/json_io.hpp"
#include "circleflow/random_maps.hpp"
#include "circleflow/straighten.hpp"

using namespace circleflow;

TEST_SUITE("json") {

TEST_CASE("map round trip is exact for affine maps") {
  Rng rng(1001);
  for (int i = 0; i < 50; ++i) {
    PacMap f = random_aiet(rng, 6);
    PacMap back = pac_map_from_json(pac_map_to_json(f));
    CHECK(back.equals(f));
    CHECK(back.source() == f.source());
  }
  PacMap h = glue61();  // multi-component domains survive too
  CHECK(pac_map_from_json(pac_map_to_json(h)).equals(h));
}

TEST_CASE("map round trip preserves chart pieces bit for bit") {
  for (const Rat& t : {Rat(1) / 8, Rat(-2) / 3, Rat(5) / 4}) {
    PacMap g = glued_flow61(t);
    PacMap back = pac_map_from_json(pac_map_to_json(g));
    CHECK(back.equals(g));  // tol 0: doubles print/parse round trip exactly
    CHECK(back.numeric());
  }
}

TEST_CASE("derived all-affine maps keep their numeric marker") {
  PacMap round = compose(glued_flow61(Rat(1) / 2), glued_flow61(Rat(-1) / 2));
  REQUIRE(round.numeric());
  for (const Piece& p : round.pieces()) CHECK(transform_is_affine(p.tf));

  std::string text = pac_map_to_json(round);
  CHECK(text.find("\"numeric\": true") != std::string::npos);
  PacMap back = pac_map_from_json(text);
  CHECK(back.numeric());
  CHECK(back.equals(round));

  // exact maps do not get the marker
  CHECK(pac_map_to_json(example41(2)).find("numeric") == std::string::npos);
}

TEST_CASE("schema of an emitted map") {
  nlohmann::json j = nlohmann::json::parse(pac_map_to_json(example41(1)));
  CHECK(j["source"]["components"] == nlohmann::json::array({"1"}));
  CHECK(j["pieces"].size() == 4);
  const auto& p0 = j["pieces"][0];
  CHECK(p0["arc"]["component"] == 0);
  CHECK(p0["arc"]["start"] == "0");
  CHECK(p0["arc"]["length"] == "1/4");
  CHECK(p0["target_component"] == 0);
  CHECK(p0["transform"]["kind"] == "affine");
  CHECK(p0["transform"]["slope"] == "1");
  CHECK(p0["transform"]["offset"] == "1/4");

  nlohmann::json g = nlohmann::json::parse(pac_map_to_json(glued_flow61(Rat(1) / 8)));
  bool found_chart = false;
  for (const auto& p : g["pieces"]) {
    if (p["transform"]["kind"] == "flowchart") {
      found_chart = true;
      CHECK(p["transform"]["r"].is_string());
      CHECK(p["transform"]["a"].is_string());
      CHECK(p["transform"]["t"].is_number());
      if (p["transform"].contains("post")) CHECK(p["transform"]["post"].is_string());
    }
  }
  CHECK(found_chart);
}

TEST_CASE("parse errors carry locations") {
  CHECK_THROWS_WITH_AS(pac_map_from_json("{"), doctest::Contains("malformed JSON"),
                       validation_error);
  CHECK_THROWS_WITH_AS(pac_map_from_json("not json at all"),
                       doctest::Contains("malformed JSON"), validation_error);

  // structurally valid JSON with a missing key names the key and the path
  CHECK_THROWS_WITH_AS(pac_map_from_json(R"({"source":{"components":["1"]}})"),
                       doctest::Contains("target"), validation_error);

  std::string bad_rat = R"({
    "source": {"components": ["1"]},
    "target": {"components": ["1"]},
    "pieces": [{"arc": {"component": 0, "start": "zero", "length": "1"},
                "target_component": 0,
                "transform": {"kind": "affine", "slope": "1", "offset": "0"}}]
  })";
  CHECK_THROWS_WITH_AS(pac_map_from_json(bad_rat), doctest::Contains("pieces[0]"),
                       validation_error);

  std::string bad_kind = R"({
    "source": {"components": ["1"]},
    "target": {"components": ["1"]},
    "pieces": [{"arc": {"component": 0, "start": "0", "length": "1"},
                "target_component": 0,
                "transform": {"kind": "mystery"}}]
  })";
  CHECK_THROWS_WITH_AS(pac_map_from_json(bad_kind), doctest::Contains("kind"),
                       validation_error);

  // valid JSON, invalid map: the map validator takes over
  std::string not_bijective = R"({
    "source": {"components": ["1"]},
    "target": {"components": ["1"]},
    "pieces": [{"arc": {"component": 0, "start": "0", "length": "1"},
                "target_component": 0,
                "transform": {"kind": "affine", "slope": "2", "offset": "0"}}]
  })";
  CHECK_THROWS_AS(pac_map_from_json(not_bijective), validation_error);
}

TEST_CASE("straightening result serialization") {
  StraighteningResult r = straighten(glued61_flow());
  std::string text = straighten_result_to_json(r, "glued61");
  nlohmann::json j = nlohmann::json::parse(text);

  CHECK(j["family"] == "glued61");
  CHECK(j["trivial"] == false);
  CHECK(j["B"] == nlohmann::json::array({"0", "1/4", "5/8", "7/8"}));
  CHECK(j["lambda"] == nlohmann::json::array({"1/2", "3/8", "1/8"}));
  CHECK(j["sigma"] == nlohmann::json::array({2, 1, 0, 3}));
  CHECK(j["tau"] == nlohmann::json::array({2, 1, 0, 3}));
  CHECK(j["orbits"].size() == 3);
  CHECK(j["report"]["homomorphism"]["passed"] == true);
  CHECK(j["report"]["verification"]["passed"] == true);
  CHECK(j["report"]["verification"]["entries"].size() >= 6);

  // the conjugator reads back with its straightened target domain
  PacMap f = conjugator_from_json(text);
  CHECK(f.equals(r.conjugator));
  CHECK(f.target() == r.domain);
}

TEST_CASE("conjugator_from_json rejects results without a conjugator") {
  CHECK_THROWS_AS(conjugator_from_json(R"({"family":"x"})"), validation_error);
}

}  // TEST_SUITE
