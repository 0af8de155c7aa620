#include "fixtures.hpp"
#include "peakload/errors.hpp"
#include "peakload/subsidy.hpp"

#include <doctest.h>

#include <cmath>

using namespace peakload;
using fixture::vec;

namespace {

MatrixXd col(std::initializer_list<double> v) { return vec(v); }

}  // namespace

TEST_CASE("pinned-capacity welfare on the subsidy example") {
  const MarketInstance inst = fixture::subsidy_example();
  const VectorXd y = vec({0.9, 0.9});

  const FixedCapacityWelfareResult mid = solve_fixed_capacity_welfare(inst, y, col({0.75, 0.75}));
  CHECK(mid.production(0, 0) == doctest::Approx(0.9));
  CHECK(mid.production(1, 0) == doctest::Approx(0.9));
  CHECK(mid.objective == doctest::Approx(1.62));
  CHECK(mid.prices(0) == doctest::Approx(3.2));
  CHECK(mid.max_kkt_residual() <= 1e-7);

  const FixedCapacityWelfareResult zero = solve_fixed_capacity_welfare(inst, y, col({0, 0}));
  CHECK(zero.objective == doctest::Approx(7.02));
  CHECK(zero.prices(0) == doctest::Approx(3.2));

  const FixedCapacityWelfareResult one = solve_fixed_capacity_welfare(inst, y, col({1, 0}));
  CHECK(one.production(0, 0) == doctest::Approx(0.1));
  CHECK(one.production(1, 0) == doctest::Approx(0.9));
  CHECK(one.objective == doctest::Approx(3.74));

  CHECK_THROWS_AS(solve_fixed_capacity_welfare(inst, y, col({1, 1})), Error);
  CHECK_THROWS_AS(solve_fixed_capacity_welfare(fixture::two_period_reform(), vec({1, 1}), MatrixXd::Zero(2, 2)),
                  Error);
}

TEST_CASE("subsidies on the subsidy example") {
  const MarketInstance inst = fixture::subsidy_example();
  const SubsidyBundle b = compute_subsidies(inst);
  CHECK(b.y_star(0) == doctest::Approx(0.9));
  CHECK(b.y_star(1) == doctest::Approx(0.9));
  CHECK(b.eta(0) == doctest::Approx(0.2));
  CHECK(b.eta(1) == doctest::Approx(0.2));
  CHECK(b.transfer() == doctest::Approx(0.36));
  CHECK(b.audit_flags.empty());
  CHECK(b.verification.is_equilibrium);
  CHECK(b.verification.worst_case_profits.cwiseAbs().maxCoeff() <= 1e-6);

  // Hand evaluation of the per-vertex expression for producer 1, vertices in
  // lexicographic order (0,0), (0,1), (3/4,3/4), (1,0).
  REQUIRE(b.lemma_values.cols() == 4);
  CHECK(b.lemma_values(0, 0) == doctest::Approx(-3.2));
  CHECK(b.lemma_values(0, 1) == doctest::Approx(-4.0));
  CHECK(b.lemma_values(0, 2) == doctest::Approx(-0.2));
  CHECK(b.lemma_values(0, 3) == doctest::Approx(0.0).epsilon(1e-9));

  for (const auto& r : b.scenario_results) CHECK(r.max_kkt_residual() <= 1e-7);

  const PriceTable table = build_price_functions(b);
  REQUIRE(table.prices.size() == 4);
  CHECK(table.prices[0](0) == doctest::Approx(3.2));
  CHECK(table.prices[2](0) == doctest::Approx(3.2));
  CHECK(evaluate_price_function(inst, b, col({0.5, 0.25}))(0) == doctest::Approx(3.2));
}

TEST_CASE("withholding the subsidy breaks the equilibrium") {
  const MarketInstance inst = fixture::subsidy_example();
  SubsidyBundle b = compute_subsidies(inst);
  b.eta.setZero();
  const EquilibriumVerification v = verify_subsidized_equilibrium(inst, b);
  CHECK_FALSE(v.zero_profit_ok);
  CHECK_FALSE(v.is_equilibrium);
  CHECK(v.worst_case_profits(0) == doctest::Approx(-0.18));
  try {
    v.require();
    FAIL("expected NotEquilibrium");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_equilibrium);
  }
}

TEST_CASE("without uncertainty the subsidy vanishes") {
  const MarketInstance one = fixture::elastic_market({{0.5, 1, 0, {}}}, vec({4}), vec({1}), Polytope::box(1));
  const SubsidyBundle b = compute_subsidies(one);
  CHECK(b.eta(0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(b.verification.is_equilibrium);
  const EquilibriumSolution nominal = solve_nominal_elastic(one);
  CHECK(b.scenario_results.front().prices(0) == doctest::Approx(nominal.prices(0)));

  const MarketInstance two =
      fixture::elastic_market({{0.5, 1, 0, {}}, {0.2, 2, 0, {}}}, vec({6, 3}), vec({1, 2}), Polytope::simplex(2));
  const SubsidyBundle c = compute_subsidies(two);
  for (Index i = 0; i < 2; ++i) CHECK(std::abs(c.eta(i)) <= 1e-9);
  CHECK(c.verification.is_equilibrium);
}

TEST_CASE("idle producers get no subsidy") {
  const MarketInstance inst =
      fixture::elastic_market({{0.2, 0, 1, {}}, {3, 3, 1, {}}}, vec({4}), vec({1}), Polytope::simplex(2));
  const SubsidyBundle b = compute_subsidies(inst);
  CHECK(b.y_star(1) == doctest::Approx(0.0));
  CHECK(b.eta(1) == 0.0);
  CHECK(b.verification.is_equilibrium);
}

TEST_CASE("no capacity") {
  const MarketInstance inst = fixture::elastic_market({{2, 2, 1, {}}}, vec({1}), vec({1}), Polytope::box(1));
  try {
    compute_subsidies(inst);
    FAIL("expected NoCapacity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_capacity);
  }
}

TEST_CASE("periods below capacity price at cost, so the threshold cannot move eta") {
  // Second period demand is too weak to use full capacity.
  const MarketInstance inst =
      fixture::elastic_market({{0.5, 1, 1, {}}, {0.5, 1, 1, {}}}, vec({8, 2.5}), vec({1, 1}), Polytope::simplex(2));
  const SubsidyBundle b = compute_subsidies(inst);
  bool saw_tie = false;
  for (const auto& r : b.scenario_results) {
    const MatrixXd cost = perceived_costs(inst, r.u);
    for (Index i = 0; i < 2; ++i) {
      for (Index t = 0; t < 2; ++t) {
        const double x = r.production(i, t);
        if (x > 1e-9 && x < b.y_star(i) - 1e-9) {
          saw_tie = true;
          CHECK(std::abs(r.prices(t) - cost(i, t)) <= 1e-7);
        }
      }
    }
  }
  CHECK(saw_tie);
  CHECK(b.verification.is_equilibrium);
}

TEST_CASE("random elastic markets admit subsidized equilibria") {
  std::mt19937_64 rng(404);
  int solved = 0;
  for (int k = 0; k < 20; ++k) {
    const MarketInstance inst = fixture::random_elastic_market(rng);
    const SubsidyBundle b = compute_subsidies(inst, 32);
    ++solved;
    CHECK(b.verification.is_equilibrium);
    for (const auto& r : b.scenario_results) CHECK(r.max_kkt_residual() <= 1e-7);
    const double welfare_at_worst = solve_inner(inst, b.y_star, solve_robust_cp_elastic(inst).worst_u).value;
    CHECK(welfare_at_worst == doctest::Approx(b.planner_value).epsilon(1e-6));
  }
  CHECK(solved == 20);
}
