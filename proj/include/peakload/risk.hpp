#pragma once

// Uncertainty sets built from risk data, rescaled to the unit box so that
// the scale can be moved into the producers' a_i.

#include "peakload/geometry.hpp"
#include "peakload/market.hpp"
#include "peakload/poa.hpp"

#include <string>
#include <variant>
#include <vector>

namespace peakload {

struct VarSpec {
  double alpha = 0.05;
  VectorXd marginal_var;  // per producer, cost units, all > 0

  void check() const;  // Error(bad_var)
};

struct CoherentSpec {
  std::vector<VectorXd> scenarios;  // first one must be zero
  Polytope Q;                        // over scenario weights; intersected with the probability simplex

  void check() const;
};

using RiskSpec = std::variant<VarSpec, CoherentSpec>;

struct RiskSet {
  Polytope set;
  VectorXd scale;
  ValidationReport report;
  std::vector<Index> degenerate;  // coordinates with zero scale, decoupled as [0, 1]
  std::vector<std::string> warnings;
};

RiskSet build_mvar_set(const VarSpec& spec);
RiskSet build_coherent_set(const CoherentSpec& spec);
RiskSet build_risk_set(const RiskSpec& spec);

// Largest expected value of each coordinate over the distributions in Q.
VectorXd coherent_maxima(const CoherentSpec& spec);

// Installs the set and moves the scale into every producer's a (clearing
// per-period overrides).
MarketInstance with_risk_set(const MarketInstance& inst, const RiskSet& rs);

PoAReport poa_with_risk_set(const MarketInstance& inst, const RiskSpec& spec, const SolveOptions& opt = {});

}  // namespace peakload
