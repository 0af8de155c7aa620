#pragma once

// JSON instance files with a strict schema. Every diagnostic names the
// offending field as a JSON pointer; syntax errors also give line and column.

#include "peakload/market.hpp"
#include "peakload/risk.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace peakload {

inline constexpr const char* kInstanceSchemaVersion = "1.0";

struct InstanceOptions {
  Tolerances tol;
  std::optional<int> sample_count;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
};

struct LoadedInstance {
  // Uncertainty and scaling already resolved when a risk section is present.
  MarketInstance market;
  std::optional<RiskSpec> risk;
  std::optional<RiskSet> risk_set;
  InstanceOptions options;
  std::string digest;  // sha256 of the canonical (key-sorted, compact) document
};

// Throws Error(invalid_input).
LoadedInstance parse_instance(const std::string& text);
LoadedInstance load_instance(const std::string& path);

// Instance with the uncertainty set written in inequality form.
nlohmann::ordered_json instance_to_json(const MarketInstance& inst, const InstanceOptions& options = {});

std::string sha256_hex(const std::string& bytes);

}  // namespace peakload
