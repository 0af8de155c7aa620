#include "fixtures.hpp"
#include "oracles.hpp"
#include "peakload/errors.hpp"
#include "peakload/market.hpp"
#include "peakload/robust.hpp"

#include <doctest.h>

using namespace peakload;
using fixture::vec;

TEST_CASE("nominal fixed: single producer") {
  const MarketInstance inst = fixture::fixed_market({{1, 1, 0, {}}}, vec({1}), Polytope::box(1));
  const EquilibriumSolution s = solve_nominal_fixed(inst);
  CHECK(s.objective == doctest::Approx(2.0));
  CHECK(s.prices(0) == doctest::Approx(2.0));
  CHECK(s.capacities(0) == doctest::Approx(1.0));
  CHECK(s.production(0, 0) == doctest::Approx(1.0));
  CHECK(s.certificate.ok);
}

TEST_CASE("nominal fixed: capacity priced in the peak period only") {
  const MarketInstance inst = fixture::fixed_market({{1, 1, 0, {}}, {1, 1, 0, {}}}, vec({1, 2}), Polytope::simplex(2));
  const EquilibriumSolution s = solve_nominal_fixed(inst);
  CHECK(s.objective == doctest::Approx(5.0));
  CHECK(s.prices(0) == doctest::Approx(1.0));
  CHECK(s.prices(1) == doctest::Approx(2.0));
  CHECK(s.capacities.sum() == doctest::Approx(2.0));

  // Same planner written as a plain LP in the aggregate variables (X1, X2, Y):
  // identical producers make the aggregate problem exact.
  LpSpec agg;
  agg.sense = Sense::minimize;
  agg.cost = vec({1, 1, 1});
  agg.matrix.resize(4, 3);
  agg.matrix << 1, 0, -1, 0, 1, -1, 1, 0, 0, 0, 1, 0;
  agg.rhs = vec({0, 0, 1, 2});
  agg.kinds = {RowKind::less_equal, RowKind::less_equal, RowKind::equal, RowKind::equal};
  agg.upper = vec({10, 10, 10});
  const auto ref = oracle::brute_force_lp(agg);
  REQUIRE(ref);
  CHECK(s.objective == doctest::Approx(ref->objective));
}

TEST_CASE("nominal fixed: zero demand") {
  const MarketInstance inst = fixture::fixed_market({{1, 1, 0, {}}, {2, 0.5, 0, {}}}, vec({0, 0}), Polytope::simplex(2));
  const EquilibriumSolution s = solve_nominal_fixed(inst);
  CHECK(s.objective == doctest::Approx(0.0));
  CHECK(s.capacities.isZero(1e-12));
  CHECK(s.production.isZero(1e-12));
}

TEST_CASE("nominal elastic") {
  const MarketInstance one = fixture::elastic_market({{0.2, 0, 0, {}}}, vec({5}), vec({1}), Polytope::box(1));
  const EquilibriumSolution s = solve_nominal_elastic(one);
  CHECK(s.total_production()(0) == doctest::Approx(4.8));
  CHECK(s.prices(0) == doctest::Approx(0.2));
  CHECK(s.objective == doctest::Approx(11.52));
  CHECK(s.certificate.ok);

  const MarketInstance idle = fixture::elastic_market({{1, 1, 0, {}}}, vec({2}), vec({1}), Polytope::box(1));
  const EquilibriumSolution z = solve_nominal_elastic(idle);
  CHECK(z.objective == doctest::Approx(0.0));
  CHECK(z.production.isZero(1e-12));

  const MarketInstance two =
      fixture::elastic_market({{0.2, 0, 0, {}}, {0.2, 0, 0, {}}}, vec({5}), vec({1}), Polytope::simplex(2));
  const EquilibriumSolution t = solve_nominal_elastic(two);
  CHECK(t.total_production()(0) == doctest::Approx(4.8));
  CHECK(t.objective == doctest::Approx(11.52));
  // Least-norm selection splits evenly.
  CHECK(t.production(0, 0) == doctest::Approx(2.4));
}

TEST_CASE("nominal elastic: prices are the demand curve at total production") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const MarketInstance inst = fixture::random_elastic_market(rng);
    const EquilibriumSolution s = solve_nominal_elastic(inst);
    const VectorXd xbar = s.total_production();
    for (Index t = 0; t < inst.periods; ++t) {
      CHECK(s.prices(t) == doctest::Approx(inst.elastic().price(t, xbar(t))).epsilon(1e-12));
    }
    const MatrixXd c = perceived_costs(inst, MatrixXd::Zero(inst.num_producers(), inst.periods));
    CHECK(welfare(inst, s.production, s.capacities, c) == doctest::Approx(s.objective).epsilon(1e-7));
  }
}

TEST_CASE("expected-value solve") {
  const MarketInstance inst = fixture::fixed_market({{1, 1, 1, {}}}, vec({1}), Polytope::box(1));
  CHECK(solve_expected(inst, MatrixXd::Constant(1, 1, 0.5)).objective == doctest::Approx(2.5));
  CHECK(solve_expected(inst, MatrixXd::Zero(1, 1)).objective ==
        doctest::Approx(solve_nominal_fixed(inst).objective));

  const MarketInstance reform = fixture::two_period_reform();
  const EquilibriumSolution ones = solve_expected(reform, MatrixXd::Ones(2, 2));
  const EquilibriumSolution robust = solve_robust_market_fixed(reform).solution;
  CHECK(ones.objective == doctest::Approx(robust.objective));
  CHECK((ones.prices - robust.prices).cwiseAbs().maxCoeff() < 1e-9);

  try {
    solve_expected(inst, MatrixXd::Constant(1, 1, 1.5));
    FAIL("expected BadMean");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bad_mean);
  }
}

TEST_CASE("fixed demand: price and capacity-rent complementarity") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 40; ++k) {
    const MarketInstance inst = fixture::random_fixed_market(rng);
    const MatrixXd cost = perceived_costs(inst, MatrixXd::Zero(inst.num_producers(), inst.periods));
    const EquilibriumSolution s = solve_nominal_fixed(inst);
    REQUIRE(s.certificate.ok);
    for (Index i = 0; i < inst.num_producers(); ++i) {
      for (Index t = 0; t < inst.periods; ++t) {
        const double x = s.production(i, t);
        const double mu = s.capacity_rents(i, t);
        CHECK(mu >= -1e-9);
        CHECK(x <= s.capacities(i) + 1e-9);
        CHECK(x >= -1e-12);
        if (x > 1e-7) CHECK(s.prices(t) == doctest::Approx(cost(i, t) + mu).epsilon(1e-7));
        if (x < s.capacities(i) - 1e-7) CHECK(std::abs(mu) < 1e-7);
      }
      if (s.capacities(i) > 1e-7) {
        CHECK(s.capacity_rents.row(i).sum() == doctest::Approx(inst.producers[static_cast<size_t>(i)].c_inv));
      }
    }
    for (Index t = 0; t < inst.periods; ++t) {
      CHECK(std::abs(s.production.col(t).sum() - inst.fixed().d(t)) <= 1e-9);
    }
    CHECK(total_cost(inst, s.production, s.capacities, cost) == doctest::Approx(s.objective).epsilon(1e-7));
  }
}

TEST_CASE("instance validation") {
  MarketInstance inst = fixture::two_period_reform();
  inst.producers[0].c_inv = -1;
  CHECK_THROWS_AS(inst.check(), Error);
  inst = fixture::two_period_reform();
  inst.demand = FixedDemand{vec({1})};
  CHECK_THROWS_AS(inst.check(), Error);
  inst = fixture::two_period_reform();
  inst.uncertainty = Polytope::simplex(3);
  CHECK_THROWS_AS(inst.check(), Error);
  inst = fixture::subsidy_example();
  std::get<AffineDemand>(inst.demand).beta(0) = 0.0;
  CHECK_THROWS_AS(inst.check(), Error);
  try {
    solve_nominal_elastic(fixture::two_period_reform());
    FAIL("expected WrongDemandMode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::wrong_demand_mode);
  }
}

TEST_CASE("per-period scaling override") {
  MarketInstance inst = fixture::fixed_market({{0, 1, 1, vec({0, 2})}}, vec({1, 1}), Polytope::box(1));
  const MatrixXd c = strict_robust_costs(inst);
  CHECK(c(0, 0) == doctest::Approx(1.0));
  CHECK(c(0, 1) == doctest::Approx(3.0));
  CHECK(solve_robust_market_fixed(inst).solution.objective == doctest::Approx(4.0));
}
