#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "specshadow/config.hpp"
#include "specshadow/errors.hpp"
#include "specshadow/json_io.hpp"
#include "specshadow/rh.hpp"
#include "specshadow/section.hpp"
#include "support.hpp"

using namespace specshadow;
using testsupport::make_residue;
using testsupport::rank2_model;

TEST_CASE("complex values ride as [re, im] pairs") {
    json j = complex_to_json({1.5, -2.5});
    CHECK(j.dump() == "[1.5,-2.5]");
    cplx z = complex_from_json(j, "here");
    CHECK(z == cplx{1.5, -2.5});

    CHECK_THROWS_AS(complex_from_json(json::parse("[1]"), "here"), SchemaError);
    CHECK_THROWS_AS(complex_from_json(json::parse("[1, \"x\"]"), "here"), SchemaError);
    try {
        complex_from_json(json::parse("5"), "spot");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("spot") != std::string::npos);
    }
}

TEST_CASE("normal forms serialize with 1-based slots and round-trip") {
    GroupoidWord t = GroupoidWord::parse("T(t1,1)");
    NormalForm nf = normal_form(t, 2, {"t1"});
    json j = normal_form_to_json(nf);
    CHECK(j["punctures"]["t1"]["sigma"] == json::parse("[2,1]"));
    CHECK(j["punctures"]["t1"]["m"] == json::parse("[0,0]"));
    CHECK(j["degree"] == 0);
    REQUIRE(j["domain"].size() == 1);
    CHECK(j["domain"][0] == json::parse(R"(["t1",1,2,0])"));

    NormalForm back = normal_form_from_json(j);
    CHECK(back.same_action(nf));
    CHECK(back.action("t1").domain == nf.action("t1").domain);
}

TEST_CASE("normal form parsing validates shapes") {
    CHECK_THROWS_AS(normal_form_from_json(json::parse(R"({"degree": 0})")), SchemaError);
    CHECK_THROWS_AS(normal_form_from_json(json::parse(
                        R"({"punctures": {"t1": {"sigma": [1, 1], "m": [0, 0]}},
                            "degree": 0})")),
                    SchemaError);
    CHECK_THROWS_AS(normal_form_from_json(json::parse(
                        R"({"punctures": {"t1": {"sigma": [1, 2], "m": [0]}},
                            "degree": 0})")),
                    SchemaError);
    CHECK_THROWS_AS(normal_form_from_json(json::parse(
                        R"({"punctures": {"t1": {"sigma": [1, 2], "m": [0, 0]}}})")),
                    SchemaError);
    CHECK_THROWS_AS(normal_form_from_json(json::parse(
                        R"({"punctures": {"t1": {"sigma": [1, 2], "m": [0, 0]}},
                            "degree": 0, "smell": 1})")),
                    SchemaError);
    CHECK_THROWS_AS(normal_form_from_json(json::parse(
                        R"({"punctures": {"t1": {"sigma": [1, 2], "m": [0, 0]}},
                            "degree": 0, "domain": [["t1", 1, 1, 0]]})")),
                    SchemaError);
}

TEST_CASE("residue shadows round-trip with chart and degree") {
    ResidueShadow s = make_residue({0.25, -0.75},
                                   {{"t1", {{1.0, 2.0}, {3.0, -4.0}}},
                                    {"t2", {{0.0, 0.0}, {-1.5, 0.5}}}},
                                   -2);
    s.chart = Chart::Conjugate;
    json j = residue_shadow_to_json(s);
    CHECK(j["chart"] == "conjugate");
    ResidueShadow back = residue_shadow_from_json(j);
    CHECK(back.lambda == s.lambda);
    CHECK(back.degree_offset == -2);
    CHECK(back.chart == Chart::Conjugate);
    REQUIRE(back.punctures.size() == 2);
    CHECK(back.punctures[1].theta == s.punctures[1].theta);
    CHECK(back.rank() == 2);
}

TEST_CASE("residue shadow parsing validates shapes") {
    CHECK_THROWS_AS(residue_shadow_from_json(json::parse(R"({"lambda": [0, 0]})")),
                    SchemaError);
    CHECK_THROWS_AS(residue_shadow_from_json(json::parse(
                        R"({"lambda": [0, 0], "chart": "upside-down",
                            "punctures": [{"label": "t1", "theta": [[0, 0]]}]})")),
                    SchemaError);
    CHECK_THROWS_AS(residue_shadow_from_json(json::parse(
                        R"({"lambda": [0, 0],
                            "punctures": [{"label": "t1", "theta": [[0, 0]]},
                                          {"label": "t1", "theta": [[0, 0]]}]})")),
                    SchemaError);
    // ragged ranks across punctures
    CHECK_THROWS_AS(residue_shadow_from_json(json::parse(
                        R"({"lambda": [0, 0],
                            "punctures": [{"label": "t1", "theta": [[0, 0]]},
                                          {"label": "t2", "theta": [[0, 0], [1, 0]]}]})")),
                    SchemaError);
    CHECK_THROWS_AS(residue_shadow_from_json(json::parse(
                        R"({"lambda": [0, 0], "smell": 1,
                            "punctures": [{"label": "t1", "theta": [[0, 0]]}]})")),
                    SchemaError);
}

TEST_CASE("betti shadows serialize jumps and eigenvalues per labeled puncture") {
    ResidueShadow s = make_residue({1.0, 0.0}, {{"t1", {{0.0, 0.0}, {0.5, 0.0}}}});
    LevelChoice b;
    b.b = {{-0.5, -0.25}};
    BettiShadow bs = betti_shadow(s, b);
    json j = betti_shadow_to_json(bs, {"t1"});
    REQUIRE(j["punctures"].size() == 1);
    CHECK(j["punctures"][0]["label"] == "t1");
    REQUIRE(j["punctures"][0]["slots"].size() == 2);
    CHECK(j["punctures"][0]["slots"][0]["jump"].get<double>() ==
          doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(j["punctures"][0]["slots"][0]["mu"][0].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(betti_shadow_to_json(bs, {"t1", "t2"}), SchemaError);
}

TEST_CASE("transitions and orbits serialize their words") {
    HarmonicShadow model = rank2_model();
    TraceResult tr = trace_path(model, {{-0.05, 0.8}, {0.05, 0.8}});
    json j = transitions_to_json(tr.transitions);
    REQUIRE(j.is_array());
    REQUIRE_FALSE(j.empty());
    CHECK(j[0].contains("from"));
    CHECK(j[0].contains("to"));
    CHECK(j[0]["word"].contains("punctures"));

    ResidueShadow s = make_residue({0.7, 0.3}, {{"t1", {{0.2, 0.1}}}});
    json oj = orbit_to_json(orbit(s, 1));
    REQUIRE(oj.size() == 3);
    CHECK(oj[0].contains("shadow"));
    CHECK(oj[0].contains("witness"));
}

TEST_CASE("harmonic shadows round-trip through their json form") {
    HarmonicShadow model = rank2_model();
    model.genus = 0;
    json j = harmonic_shadow_to_json(model);
    HarmonicShadow back = shadow_from_json_text(j.dump(), "roundtrip");
    CHECK(back.rank == model.rank);
    REQUIRE(back.punctures.size() == 1);
    CHECK(back.punctures[0].label == "t1");
    CHECK(back.punctures[0].spectrum.points[1].alpha == cplx{1.0, 0.0});
}

TEST_CASE("flow csv has a header and one row per sample and element") {
    HarmonicShadow model = rank2_model();
    std::ostringstream os;
    write_flow_csv(os, model, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    std::string text = os.str();
    CHECK(text.rfind("re_lambda,im_lambda,puncture,kms_index,p,re_e,im_e\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 2);
}

TEST_CASE("json pointers resolve to their line in the source text") {
    std::string text = R"({
  "rank": 2,
  "punctures": [
    {"label": "t1",
     "spectrum": []}
  ]
})";
    CHECK(line_of_pointer(text, "") == 1);
    CHECK(line_of_pointer(text, "/rank") == 2);
    CHECK(line_of_pointer(text, "/punctures") == 3);
    CHECK(line_of_pointer(text, "/punctures/0/label") == 4);
    CHECK(line_of_pointer(text, "/punctures/0/spectrum") == 5);
    CHECK(line_of_pointer(text, "/missing") == 0);
    CHECK(line_of_pointer(text, "/punctures/7") == 0);
    CHECK(line_of_pointer(text, "not-a-pointer") == 0);
}

TEST_CASE("missing files raise schema errors") {
    CHECK_THROWS_AS(read_text_file("/nonexistent/specshadow.json"), SchemaError);
    CHECK_THROWS_AS(shadow_from_json_file("/nonexistent/specshadow.json"), SchemaError);
    CHECK_THROWS_AS(config_from_json_file("/nonexistent/specshadow.json"), ConfigError);
}

TEST_CASE("config documents override defaults and reject junk") {
    Config def = config_from_json_text("{}");
    CHECK(def.eps_eq == 1e-9);
    CHECK(def.eps_root == 1e-10);
    CHECK(def.eps_flag == 1e-8);
    CHECK(def.grid_resolution == 48);
    CHECK(def.seed == 12345);

    Config cfg = config_from_json_text(
        R"({"eps_eq": 1e-8, "window_anchor": 0.25, "grid_resolution": 16, "seed": 7})");
    CHECK(cfg.eps_eq == 1e-8);
    CHECK(cfg.window_anchor == 0.25);
    CHECK(cfg.grid_resolution == 16);
    CHECK(cfg.seed == 7);

    CHECK_THROWS_AS(config_from_json_text(R"({"smell": 1})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"eps_eq": 0})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"eps_eq": -1e-9})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"grid_resolution": 2})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"grid_resolution": 8.5})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("[]"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("{"), ConfigError);
}
