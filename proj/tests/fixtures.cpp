#include "fixtures.hpp"

namespace fixture {

Polytope random_valid_set(std::mt19937_64& rng, Index n, int extra) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VectorXd> pts{VectorXd::Zero(n)};
  for (Index i = 0; i < n; ++i) pts.push_back(VectorXd::Unit(n, i));
  for (int k = 0; k < extra; ++k) pts.push_back(VectorXd::NullaryExpr(n, [&] { return unit(rng); }));
  return hull_to_polytope(pts);
}

MarketInstance random_fixed_market(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cost(0.1, 3.0);
  std::uniform_real_distribution<double> dem(0.0, 3.0);
  std::uniform_int_distribution<int> count(1, 3);
  const Index n = count(rng);
  const Index periods = count(rng);
  std::vector<Producer> prods;
  for (Index i = 0; i < n; ++i) prods.push_back({cost(rng), cost(rng), cost(rng), {}});
  VectorXd d = VectorXd::NullaryExpr(periods, [&] { return dem(rng); });
  const int extra = std::uniform_int_distribution<int>(0, 2)(rng);
  return fixed_market(std::move(prods), std::move(d), random_valid_set(rng, n, extra));
}

MarketInstance random_elastic_market(std::mt19937_64& rng, Index max_producers) {
  std::uniform_real_distribution<double> cost(0.05, 1.5);
  std::uniform_real_distribution<double> alpha(2.0, 8.0);
  std::uniform_real_distribution<double> beta(0.5, 2.0);
  const Index n = std::uniform_int_distribution<Index>(2, max_producers)(rng);
  const Index periods = std::uniform_int_distribution<Index>(1, 2)(rng);
  std::vector<Producer> prods;
  for (Index i = 0; i < n; ++i) prods.push_back({cost(rng), cost(rng), 2.0 * cost(rng), {}});
  VectorXd a = VectorXd::NullaryExpr(periods, [&] { return alpha(rng); });
  VectorXd b = VectorXd::NullaryExpr(periods, [&] { return beta(rng); });
  const int extra = std::uniform_int_distribution<int>(0, 1)(rng);
  return elastic_market(std::move(prods), std::move(a), std::move(b), random_valid_set(rng, n, extra));
}

RobustLp random_robust_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> dim(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index n = dim(rng), k = dim(rng), m = dim(rng);
  RobustLp p;
  p.A = MatrixXd::NullaryExpr(m, n, [&] { return unit(rng); });
  p.B = MatrixXd::NullaryExpr(m, k, [&] { return unit(rng) < 0.5 ? 0.0 : unit(rng); });
  p.b = VectorXd::NullaryExpr(m, [&] { return 2.0 * unit(rng); });
  p.c = VectorXd::NullaryExpr(n, [&] { return unit(rng); });
  p.d = VectorXd::NullaryExpr(k, [&] { return unit(rng); });
  p.lambda = VectorXd::NullaryExpr(n, [&] { return 2.0 * unit(rng); });
  p.U = random_valid_set(rng, n, static_cast<int>(dim(rng) % 3));
  return p;
}

Polytope small_vertex_set(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VectorXd> pts{VectorXd::Zero(n)};
  const int kind = std::uniform_int_distribution<int>(0, n == 2 ? 3 : 1)(rng);
  if (n == 2 && kind == 2) {
    pts.push_back(VectorXd::Ones(2));
  } else if (n == 2 && kind == 3) {
    // Kite: the axes plus one point beyond the diagonal.
    const double a = 0.6 + 0.4 * unit(rng), b = 0.6 + 0.4 * unit(rng);
    pts.push_back(VectorXd::Unit(2, 0));
    pts.push_back(VectorXd::Unit(2, 1));
    pts.push_back((VectorXd(2) << a, b).finished());
  } else if (kind == 1) {
    // One point per axis with that coordinate at 1.
    for (Index i = 0; i < n; ++i) {
      VectorXd p = VectorXd::NullaryExpr(n, [&] { return 0.8 * unit(rng); });
      p(i) = 1.0;
      pts.push_back(p);
    }
  } else {
    for (Index i = 0; i < n; ++i) pts.push_back(VectorXd::Unit(n, i));
  }
  return hull_to_polytope(pts);
}

}  // namespace fixture
