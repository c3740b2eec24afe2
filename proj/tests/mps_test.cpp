#include <doctest.h>

#include <map>
#include <stdexcept>
#include <string>

#include "coex/branch_and_bound.hpp"
#include "coex/model_builder.hpp"
#include "coex/mps.hpp"
#include "coex/scenario.hpp"
#include "test_support.hpp"

using namespace coex;

namespace {

LinearModel golden_model() {
  LinearModel m;
  Variable x;
  x.name = "x";
  x.ub = 4.0;
  Variable n;
  n.name = "n";
  n.ub = 3.0;
  n.integral = true;
  Variable y;
  y.name = "y";
  y.lb = -kInf;
  y.ub = kInf;
  m.add_var(x);
  m.add_var(n);
  m.add_var(y);
  m.add_objective(0, 1.5);
  m.add_objective(1, -2.0);
  m.objective_constant = 2.5;
  m.add_row({"c1", {{0, 1.0}, {1, 2.0}}, Sense::le, 10.0});
  m.add_row({"c2", {{0, 1.0}, {2, -1.0}}, Sense::eq, 3.0});
  return m;
}

constexpr const char* kGoldenText =
    "NAME GOLD\n"
    "ROWS\n"
    " N  OBJ\n"
    " L  c1\n"
    " E  c2\n"
    "COLUMNS\n"
    "    x OBJ 1.5\n"
    "    x c1 1\n"
    "    x c2 1\n"
    "    M1 'MARKER' 'INTORG'\n"
    "    n OBJ -2\n"
    "    n c1 2\n"
    "    M2 'MARKER' 'INTEND'\n"
    "    y c2 -1\n"
    "RHS\n"
    "    RHS OBJ -2.5\n"
    "    RHS c1 10\n"
    "    RHS c2 3\n"
    "BOUNDS\n"
    " UP BND x 4\n"
    " LO BND n 0\n"
    " UP BND n 3\n"
    " MI BND y\n"
    "ENDATA\n";

// Order-insensitive coefficient view of a row.
std::map<std::string, double> row_coefs(const LinearModel& m, const Row& r) {
  std::map<std::string, double> out;
  for (const auto& t : r.terms) out[m.vars[t.var].name] += t.coef;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

void check_coefficient_identical(const LinearModel& a, const LinearModel& b) {
  REQUIRE(a.n_vars() == b.n_vars());
  REQUIRE(a.n_rows() == b.n_rows());
  CHECK(a.objective_constant == b.objective_constant);
  for (int j = 0; j < a.n_vars(); ++j) {
    CAPTURE(a.vars[j].name);
    CHECK(a.vars[j].name == b.vars[j].name);
    CHECK(a.vars[j].lb == b.vars[j].lb);
    CHECK(a.vars[j].ub == b.vars[j].ub);
    CHECK(a.vars[j].integral == b.vars[j].integral);
    CHECK(a.objective[j] == b.objective[j]);
  }
  for (int i = 0; i < a.n_rows(); ++i) {
    CAPTURE(a.rows[i].name);
    CHECK(a.rows[i].name == b.rows[i].name);
    CHECK(a.rows[i].sense == b.rows[i].sense);
    CHECK(a.rows[i].rhs == b.rows[i].rhs);
    CHECK(row_coefs(a, a.rows[i]) == row_coefs(b, b.rows[i]));
  }
}

ScenarioSet toy_scenarios(const SystemDataset& ds) {
  ChronologyMap map;
  map.hour_to_scenario = {{0, 0, 1, 1, 2, 2}, {0, 1, 1, 1, 0, 0}};
  return synchronize(ds, map);
}

}  // namespace

TEST_CASE("exporter output matches the pinned golden text") {
  const LinearModel m = golden_model();
  CHECK(export_mps(m, "GOLD") == kGoldenText);
  // byte-stable: a second export is identical
  CHECK(export_mps(m, "GOLD") == export_mps(m, "GOLD"));
}

TEST_CASE("export then import reproduces every coefficient") {
  SUBCASE("golden model") {
    const LinearModel m = golden_model();
    const LinearModel back = parse_mps(export_mps(m, "GOLD"));
    check_coefficient_identical(m, back);
    // and the re-export of the parse is byte-identical
    CHECK(export_mps(back, "GOLD") == kGoldenText);
  }
  SUBCASE("full planning model") {
    const auto ds = test::two_region_toy();
    const LinearModel m = build_model(ds, toy_scenarios(ds)).model;
    const std::string text = export_mps(m);
    const LinearModel back = parse_mps(text);
    check_coefficient_identical(m, back);
    CHECK(export_mps(back) == text);
  }
}

TEST_CASE("a parsed model solves to the same optimum") {
  const auto ds = test::two_region_toy();
  const LinearModel m = build_model(ds, toy_scenarios(ds)).model;
  const LinearModel back = parse_mps(export_mps(m));
  const MipSolution a = solve_mip(m);
  const MipSolution b = solve_mip(back);
  REQUIRE(a.status == MipStatus::optimal);
  REQUIRE(b.status == MipStatus::optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("ranged rows split into base and companion") {
  const std::string text =
      "NAME R\n"
      "ROWS\n"
      " N  OBJ\n"
      " L  a\n"
      " G  b\n"
      " E  c\n"
      " E  d\n"
      "COLUMNS\n"
      "    x OBJ 1\n"
      "    x a 1\n"
      "    x b 1\n"
      "    x c 1\n"
      "    x d 1\n"
      "RHS\n"
      "    RHS a 10\n"
      "    RHS b 2\n"
      "    RHS c 5\n"
      "    RHS d 7\n"
      "RANGES\n"
      "    RNG a 4\n"
      "    RNG b 3\n"
      "    RNG c 2\n"
      "    RNG d -3\n"
      "ENDATA\n";
  const LinearModel m = parse_mps(text);
  REQUIRE(m.n_rows() == 8);

  auto row = [&](const std::string& name) -> const Row& {
    for (const auto& r : m.rows)
      if (r.name == name) return r;
    REQUIRE_MESSAGE(false, "missing row " << name);
    static Row dummy;
    return dummy;
  };
  // L row keeps its cap, companion floors it rhs - |r|
  CHECK(row("a").sense == Sense::le);
  CHECK(row("a").rhs == 10.0);
  CHECK(row("a__rng").sense == Sense::ge);
  CHECK(row("a__rng").rhs == 6.0);
  // G row gains a cap rhs + |r|
  CHECK(row("b__rng").sense == Sense::le);
  CHECK(row("b__rng").rhs == 5.0);
  // E row with positive range spans [rhs, rhs+r]
  CHECK(row("c").sense == Sense::le);
  CHECK(row("c").rhs == 7.0);
  CHECK(row("c__rng").sense == Sense::ge);
  CHECK(row("c__rng").rhs == 5.0);
  // negative range spans [rhs+r, rhs]
  CHECK(row("d").sense == Sense::le);
  CHECK(row("d").rhs == 7.0);
  CHECK(row("d__rng").sense == Sense::ge);
  CHECK(row("d__rng").rhs == 4.0);
  // companions inherit the coefficients
  CHECK(row_coefs(m, row("d__rng")) == row_coefs(m, row("d")));
}

TEST_CASE("bound codes cover the classic menagerie") {
  const std::string text =
      "NAME B\n"
      "ROWS\n"
      " N  OBJ\n"
      " L  r\n"
      "COLUMNS\n"
      "    a r 1\n"
      "    b r 1\n"
      "    c r 1\n"
      "    d r 1\n"
      "    e r 1\n"
      "    f r 1\n"
      "RHS\n"
      "    RHS r 9\n"
      "BOUNDS\n"
      " BV BND a\n"
      " UI BND b 7\n"
      " LI BND c 2\n"
      " FX BND d 3\n"
      " FR BND e\n"
      " PL BND f\n"
      "ENDATA\n";
  const LinearModel m = parse_mps(text);
  auto var = [&](const std::string& n) { return m.vars[m.var_index(n)]; };
  CHECK(var("a").lb == 0.0);
  CHECK(var("a").ub == 1.0);
  CHECK(var("a").integral);
  CHECK(var("b").ub == 7.0);
  CHECK(var("b").integral);
  CHECK(var("c").lb == 2.0);
  CHECK(var("c").integral);
  CHECK(var("d").lb == 3.0);
  CHECK(var("d").ub == 3.0);
  CHECK(var("e").lb == -kInf);
  CHECK(var("e").ub == kInf);
  CHECK(var("f").ub == kInf);
  CHECK(!var("f").integral);
}

TEST_CASE("malformed files are rejected with context") {
  CHECK_THROWS_AS(parse_mps("NAME X\nROWS\n N  OBJ\nCOLS\nENDATA\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_mps("    x OBJ 1\n"), std::runtime_error);  // data before section
  CHECK_THROWS_AS(parse_mps("NAME X\nROWS\n N  OBJ\n N  OBJ2\nENDATA\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_mps("NAME X\nROWS\n L  r\nENDATA\n"), std::runtime_error);  // no N row
  CHECK_THROWS_AS(
      parse_mps("NAME X\nROWS\n N  OBJ\n L  r\n L  r\nENDATA\n"),
      std::runtime_error);  // duplicate row
  CHECK_THROWS_AS(
      parse_mps("NAME X\nROWS\n N  OBJ\nCOLUMNS\n    x nope 1\nENDATA\n"),
      std::runtime_error);  // unknown row
  CHECK_THROWS_AS(
      parse_mps("NAME X\nROWS\n N  OBJ\n L  r\nCOLUMNS\n    x r 1..2\nENDATA\n"),
      std::runtime_error);  // bad number
  CHECK_THROWS_AS(
      parse_mps("NAME X\nROWS\n N  OBJ\nBOUNDS\n UP BND ghost 1\nENDATA\n"),
      std::runtime_error);  // bound on unknown variable
}

TEST_CASE("solution files import by name with honest accounting") {
  const LinearModel m = golden_model();

  SUBCASE("header recognized, objective recomputed, absences warned") {
    std::vector<std::string> warnings;
    const MipSolution sol =
        import_solution(m, "variable,value\nx,2\nn,1\n", &warnings);
    CHECK(sol.values[0] == 2.0);
    CHECK(sol.values[1] == 1.0);
    CHECK(sol.values[2] == 0.0);
    // 2.5 constant + 1.5*2 - 2*1
    CHECK(sol.objective == doctest::Approx(3.5));
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("1 variable(s)") != std::string::npos);
    CHECK(warnings[0].find("'y'") != std::string::npos);
  }
  SUBCASE("headerless files work too") {
    const MipSolution sol = import_solution(m, "x,1\nn,3\ny,0.5\n");
    CHECK(sol.objective == doctest::Approx(2.5 + 1.5 - 6.0));
  }
  SUBCASE("unknown names are errors, not typos to ignore") {
    CHECK_THROWS_AS(import_solution(m, "zz,1\n"), std::runtime_error);
    CHECK_THROWS_AS(import_solution(m, "just-one-token\n"), std::runtime_error);
  }
}
