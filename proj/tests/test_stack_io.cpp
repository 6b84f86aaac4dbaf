#include <doctest.h>

#include <filesystem>

#include "sltime/error.hpp"
#include "sltime/medium.hpp"
#include "sltime/stack_io.hpp"

using namespace sltime;

TEST_CASE("round trip") {
  StackSpec s = representative_stack(7);
  s.left_arc = CellSpec{{Layer{1.4, 0.0, 0.067}, Layer{1.2, 290.0, 0.092}, Layer{1.4, 0.0, 0.067}}, true};
  s.right_arc = s.left_arc;
  CHECK(parse_stack(stack_to_json(s)) == s);
  auto path = (std::filesystem::temp_directory_path() / "sltime_round_trip.json").string();
  save_stack(s, path);
  CHECK(load_stack(path) == s);
  std::filesystem::remove(path);
  StackSpec plain = representative_stack(3);
  CHECK(parse_stack(stack_to_json(plain)) == plain);
  CHECK(!parse_stack(stack_to_json(plain)).left_arc);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_stack("{"), ValidationError);
  CHECK_THROWS_AS(parse_stack("[]"), ValidationError);
  CHECK_THROWS_AS(parse_stack(R"({"core": {}})"), ValidationError);
  CHECK_THROWS_AS(parse_stack(R"({"core": {"layers": []}})"), ValidationError);
  CHECK_THROWS_AS(parse_stack(R"({"core": {"layers": [{"width_nm": "x", "V_meV": 0, "mass_ratio": 0.1}]}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_stack(R"({"core": {"layers": [{"width_nm": 1, "V_meV": 0, "mass_ratio": -0.1}]}})"),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_stack(R"({"core": {"layers": [{"width_nm": 1, "V_meV": 0, "mass_ratio": 0.1}]}, "replicas": 0})"),
      ValidationError);
  CHECK_THROWS_AS(load_stack("/nonexistent/file.json"), ValidationError);
  try {
    load_stack("/nonexistent/file.json");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/file.json") != std::string::npos);
  }
}

TEST_CASE("defaults") {
  auto s = parse_stack(R"({"core": {"layers": [{"width_nm": 2, "V_meV": 100, "mass_ratio": 0.08}]}})");
  CHECK(s.replicas == 1);
  CHECK(s.outside.mass_ratio == doctest::Approx(0.067));
  CHECK(!s.left_arc);
}
