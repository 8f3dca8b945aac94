#include <doctest.h>

#include <cmath>
#include <limits>

#include "bnmon/error.hpp"
#include "bnmon/io.hpp"
#include "corpus.hpp"

using namespace bnmon;
using namespace bnmon::testing;

TEST_SUITE("io") {
  TEST_CASE("format_double") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(0.1, true) == "0.10000000000000001");
    CHECK(io::format_double(-2.5) == "-2.5");
    for (double v : {1.0 / 3.0, 0.9, 1e-300, 123456.789}) {
      CHECK(std::stod(io::format_double(v)) == v);
      CHECK(std::stod(io::format_double(v, true)) == v);
    }
  }

  TEST_CASE("network JSON round trip is exact") {
    for (const auto& e : corpus()) {
      CAPTURE(e.name);
      const auto text = io::network_to_json(e.model);
      const auto back = io::parse_network_json(text);
      CHECK(back == e.model);
      CHECK(io::network_to_json(back) == text);
    }
  }

  TEST_CASE("network JSON errors") {
    CHECK_THROWS_AS(io::parse_network_json("{"), Error);
    CHECK_THROWS_WITH_AS(io::parse_network_json(R"({"variables": [], "extra": 1})"),
                         doctest::Contains("unknown key 'extra'"), Error);
    CHECK_THROWS_AS(io::parse_network_json(R"({"variables": [{"name": "C", "states": ["c0", "c1"]}],
      "cpts": {"C": [[0.5, 0.3, 0.2]]}})"),
                    Error);
    CHECK_THROWS_AS(io::parse_network_json(R"({"variables": [{"name": "C", "states": ["c0", "c1"]}],
      "parents": {"C": ["Z"]}, "cpts": {"C": [[0.5, 0.5]]}})"),
                    Error);
    CHECK_THROWS_AS(io::parse_network_json(R"({"variables": [{"name": "C", "states": ["c0", "c1"]}]})"), Error);
  }

  TEST_CASE("structure files may omit CPTs") {
    const auto m = io::parse_structure_json(R"({"variables": [{"name": "A", "states": ["a0", "a1"]},
      {"name": "B", "states": ["b0", "b1", "b2"]}], "parents": {"B": ["A"]}})");
    REQUIRE(m.size() == 2);
    CHECK(m.parents(1) == std::vector<std::size_t>{0});
    CHECK(m.cpt(1).size() == 6);
    CHECK(m.cpt(1)[4] == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("observation CSV") {
    const auto m = corpus()[1].model;  // A(2) B(3) C(2)
    const auto set = io::parse_observations_csv("C,A,B\nc1,a0,b2\n?,a1,\n", m);
    REQUIRE(set.rows.size() == 2);
    CHECK(set.rows[0].values == std::vector<int>{0, 2, 1});
    CHECK(set.rows[1].values == std::vector<int>{1, Observation::kMissing, Observation::kMissing});
    CHECK(set.any_missing);

    const auto partial_cols = io::parse_observations_csv("B\nb1\n", m);
    CHECK(partial_cols.rows[0].values == std::vector<int>{Observation::kMissing, 1, Observation::kMissing});

    CHECK_THROWS_WITH_AS(io::parse_observations_csv("A,B,C\na0,b9,c0\n", m),
                         doctest::Contains("row 1, column B: unknown state"), Error);
    CHECK_THROWS_WITH_AS(io::parse_observations_csv("A,B,C\na0,b0,c0\n?,?,?\n", m),
                         doctest::Contains("row 2: every field is missing"), Error);
    CHECK_THROWS_AS(io::parse_observations_csv("A,Q\na0,q\n", m), Error);
    CHECK_THROWS_AS(io::parse_observations_csv("A,B,C\na0,b0\n", m), Error);

    const auto data = sample(m, 300, 8, 0.3, 9);
    const auto back = io::parse_observations_csv(io::observations_to_csv(m, data), m);
    CHECK(back.rows == data);
  }

  TEST_CASE("report JSON carries exactly the report fields") {
    TestReport rep;
    rep.n = 40;
    rep.w = std::numeric_limits<double>::infinity();
    rep.signed_z = -std::numeric_limits<double>::infinity();
    rep.reject = true;
    rep.per_variable.push_back({"A", "a0", 40, 2.5, true});
    rep.variable_summary.push_back({"A", 2.5, true});
    rep.suggestions = suggest(rep);
    rep.notes = {"zero-variance stream"};
    const auto j = io::report_to_json(rep);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"n", "y_bar", "s", "mu_p", "w", "signed_z", "z_alpha", "reject",
                                           "interval", "per_variable", "variable_summary", "suggestions",
                                           "heuristic"});
    CHECK(j["w"] == "inf");
    CHECK(j["signed_z"] == "-inf");
    CHECK(j["suggestions"][0]["variable"] == "A");

    const auto doc = io::report_document(rep, {"m.json", "o.csv", {}});
    CHECK(doc["metadata"]["notes"][0] == "zero-variance stream");
    CHECK(doc["metadata"]["config"]["alpha"] == 0.05);
    CHECK(doc["metadata"]["tool_version"].get<std::string>().rfind("bnmon ", 0) == 0);
  }

  TEST_CASE("simulation CSV has one row per replication") {
    SimResult r;
    r.variable_rates = {{"A", 0.0}, {"B", 0.5}};
    r.outcomes = {{1.5, -1.5, false, {0.3, 2.1}, {false, true}}, {0.5, 0.5, false, {0.1, 0.2}, {false, false}}};
    const auto csv = io::sim_result_to_csv(r);
    CHECK(csv.rfind("rep_index,W,signed_z,reject,max_w_A,max_w_B\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  }
}
