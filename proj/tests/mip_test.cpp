#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "coex/branch_and_bound.hpp"
#include "coex/model_builder.hpp"
#include "coex/scenario.hpp"
#include "coex/simplex.hpp"
#include "test_support.hpp"

using namespace coex;

namespace {

// Exhaustive oracle: every integer assignment of the build variables gets
// priced by the dispatch LP with the builds pinned (lb = ub). Warm starts
// make the sweep cheap; total-build rows prune infeasible assignments via
// the LP itself.
struct EnumResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
};

EnumResult enumerate_builds(const LinearModel& m) {
  std::vector<int> ints;
  for (int j = 0; j < m.n_vars(); ++j)
    if (m.vars[j].integral) ints.push_back(j);

  std::vector<double> lb(m.n_vars()), ub(m.n_vars());
  for (int j = 0; j < m.n_vars(); ++j) {
    lb[j] = m.vars[j].lb;
    ub[j] = m.vars[j].ub;
  }

  detail::BoundedSimplex<double> engine(m, SimplexOptions{});
  LpBasis basis;
  EnumResult best;

  std::vector<int> assign(ints.size(), 0);
  while (true) {
    for (size_t k = 0; k < ints.size(); ++k) lb[ints[k]] = ub[ints[k]] = assign[k];
    const LpSolution sol = engine.solve(&lb, &ub, &basis);
    if (sol.status == LpStatus::optimal && sol.objective < best.objective) {
      best.feasible = true;
      best.objective = sol.objective;
    }

    size_t k = 0;
    for (; k < ints.size(); ++k) {
      if (assign[k] < static_cast<int>(m.vars[ints[k]].ub)) {
        ++assign[k];
        break;
      }
      assign[k] = 0;
    }
    if (k == ints.size()) break;
  }
  return best;
}

ScenarioSet toy_scenarios(const SystemDataset& ds) {
  ChronologyMap map;
  map.hour_to_scenario = {{0, 0, 1, 1, 2, 2}, {0, 1, 1, 1, 0, 0}};
  return synchronize(ds, map);
}

void check_against_oracle(const SystemDataset& ds, const ScenarioSet& scn) {
  const BuiltModel bm = build_model(ds, scn);
  const EnumResult oracle = enumerate_builds(bm.model);
  const MipSolution sol = solve_mip(bm.model);

  if (!oracle.feasible) {
    CHECK(sol.status == MipStatus::infeasible);
    return;
  }
  REQUIRE(sol.status == MipStatus::optimal);
  const double scale = std::max(1.0, std::abs(oracle.objective));
  CHECK(std::abs(sol.objective - oracle.objective) <= 1e-6 * scale);
  CHECK(bm.model.max_violation(sol.values) <= 1e-6);
  for (int j = 0; j < bm.model.n_vars(); ++j)
    if (bm.model.vars[j].integral)
      CHECK(std::abs(sol.values[j] - std::round(sol.values[j])) <= 1e-6);
}

}  // namespace

TEST_CASE("expansion solves match exhaustive build enumeration") {
  SUBCASE("baseline two-region system") {
    const auto ds = test::two_region_toy();
    check_against_oracle(ds, toy_scenarios(ds));
  }
  SUBCASE("cheap wind and wires pull in renewables") {
    auto ds = test::two_region_toy();
    ds.generators[1].build_cost_by_year = {2.0e3, 2.0e3};
    ds.interfaces[0].build_cost_by_year = {500.0, 500.0};
    check_against_oracle(ds, toy_scenarios(ds));
  }
  SUBCASE("steep reserve margin forces firm capacity") {
    auto ds = test::two_region_toy();
    ds.regions[0].reserve_margin_by_year = {60.0, 60.0};
    check_against_oracle(ds, toy_scenarios(ds));
  }
  SUBCASE("transmission priced out of the plan") {
    auto ds = test::two_region_toy();
    ds.interfaces[0].build_cost_by_year = {5.0e6, 5.0e6};
    ds.interfaces[0].wheeling_cost = 50.0;
    check_against_oracle(ds, toy_scenarios(ds));
  }
  SUBCASE("single bus, single scenario") {
    const auto ds = test::one_bus_toy();
    check_against_oracle(ds, build_scenarios(ds, 1, 1));
  }
  SUBCASE("single bus, one scenario per hour") {
    const auto ds = test::one_bus_toy();
    ChronologyMap map;
    map.hour_to_scenario = {{0, 1, 2, 3}};
    check_against_oracle(ds, synchronize(ds, map));
  }
  SUBCASE("renewable floor no fleet can reach is infeasible") {
    auto ds = test::two_region_toy();
    ds.regions[0].rps_by_year = {0.0, 0.5};  // A has no renewable candidates
    check_against_oracle(ds, toy_scenarios(ds));
  }
}

TEST_CASE("hand mixed-integer programs") {
  SUBCASE("fractional relaxation rounds down to the lattice optimum") {
    LinearModel m;
    Variable x;
    x.name = "x";
    x.ub = 2.0;
    x.integral = true;
    Variable y = x;
    y.name = "y";
    m.add_var(x);
    m.add_var(y);
    m.add_objective(0, -3.0);
    m.add_objective(1, -2.0);
    m.add_row({"cap", {{0, 2.0}, {1, 3.0}}, Sense::le, 3.0});
    const MipSolution sol = solve_mip(m);
    REQUIRE(sol.status == MipStatus::optimal);
    CHECK(sol.objective == doctest::Approx(-3.0));
    CHECK(sol.values[0] == doctest::Approx(1.0));
    CHECK(sol.values[1] == doctest::Approx(0.0));
    CHECK(sol.gap() <= 1e-6);
    CHECK(sol.best_bound <= sol.objective + 1e-9);
  }
  SUBCASE("integrality can make a feasible relaxation infeasible") {
    LinearModel m;
    Variable x;
    x.name = "x";
    x.ub = 1.0;
    x.integral = true;
    m.add_var(x);
    m.add_row({"lo", {{0, 1.0}}, Sense::ge, 0.4});
    m.add_row({"hi", {{0, 1.0}}, Sense::le, 0.6});
    const MipSolution sol = solve_mip(m);
    CHECK(sol.status == MipStatus::infeasible);
    CHECK(sol.gap() == std::numeric_limits<double>::infinity());
  }
  SUBCASE("node limit reports the frontier honestly") {
    LinearModel m;
    Variable x;
    x.name = "x";
    x.ub = 10.0;
    x.integral = true;
    Variable y = x;
    y.name = "y";
    m.add_var(x);
    m.add_var(y);
    m.add_objective(0, -5.0);
    m.add_objective(1, -4.0);
    m.add_row({"r1", {{0, 6.0}, {1, 4.0}}, Sense::le, 23.0});
    m.add_row({"r2", {{0, 1.0}, {1, 2.0}}, Sense::le, 7.0});
    MipOptions opts;
    opts.node_limit = 1;
    const MipSolution limited = solve_mip(m, opts);
    CHECK(limited.nodes <= 1);
    const MipSolution full = solve_mip(m);
    REQUIRE(full.status == MipStatus::optimal);
    CHECK(full.objective == doctest::Approx(-19.0));  // x=3, y=1 beats the corner
    // whatever the limited run reports, its bound must bracket the truth
    CHECK(limited.best_bound <= full.objective + 1e-9);
    if (limited.status == MipStatus::optimal)
      CHECK(limited.objective == doctest::Approx(full.objective));
  }
  SUBCASE("loose gap tolerance stops early but stays bracketed") {
    const auto ds = test::two_region_toy();
    const BuiltModel bm = build_model(ds, toy_scenarios(ds));
    MipOptions loose;
    loose.gap_tol = 0.25;
    const MipSolution quick = solve_mip(bm.model, loose);
    const MipSolution exact = solve_mip(bm.model);
    REQUIRE(exact.status == MipStatus::optimal);
    REQUIRE((quick.status == MipStatus::optimal || quick.status == MipStatus::gap_limit));
    CHECK(quick.best_bound <= exact.objective + 1e-9);
    CHECK(quick.objective >= exact.objective - 1e-9);
    CHECK(quick.gap() <= 0.25 + 1e-12);
  }
}

TEST_CASE("solves are deterministic") {
  const auto ds = test::two_region_toy();
  const BuiltModel bm = build_model(ds, toy_scenarios(ds));
  const MipSolution a = solve_mip(bm.model);
  const MipSolution b = solve_mip(bm.model);
  CHECK(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.best_bound == b.best_bound);
  CHECK(a.nodes == b.nodes);
  CHECK(a.values == b.values);
}

TEST_CASE("relaxing limits never hurts the optimum") {
  auto base = test::two_region_toy();
  const MipSolution tight = solve_mip(build_model(base, toy_scenarios(base)).model);
  REQUIRE(tight.status == MipStatus::optimal);

  auto roomy = base;
  roomy.generators[0].max_total_builds = 8;
  roomy.generators[0].max_annual_builds = {4, 4};
  roomy.interfaces[0].max_total_builds = 6;
  roomy.interfaces[0].max_annual_builds = {3, 3};
  const MipSolution relaxed = solve_mip(build_model(roomy, toy_scenarios(roomy)).model);
  REQUIRE(relaxed.status == MipStatus::optimal);
  CHECK(relaxed.objective <= tight.objective + 1e-9);

  auto cheap = base;
  cheap.generators[1].build_cost_by_year = {1.0e3, 1.0e3};
  const MipSolution discounted = solve_mip(build_model(cheap, toy_scenarios(cheap)).model);
  REQUIRE(discounted.status == MipStatus::optimal);
  CHECK(discounted.objective <= tight.objective + 1e-9);
}
