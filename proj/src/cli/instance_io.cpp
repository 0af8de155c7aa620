#include "peakload/instance_io.hpp"

#include "peakload/errors.hpp"
#include "peakload/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace peakload {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw Error(ErrorCode::invalid_input, (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

void expect_keys(const json& j, const std::string& ptr, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional) {
  if (!j.is_object()) fail(ptr, "expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) fail(ptr + "/" + k, "required field is missing");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(ptr + "/" + item.key(), "unknown field");
  }
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ptr, "must be finite");
  return v;
}

double nonneg(const json& j, const std::string& ptr) {
  const double v = number(j, ptr);
  if (v < 0.0) fail(ptr, "must be nonnegative");
  return v;
}

long long integer(const json& j, const std::string& ptr, long long lo) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  const long long v = j.get<long long>();
  if (v < lo) fail(ptr, "must be at least " + std::to_string(lo));
  return v;
}

VectorXd vector(const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(ptr, "expected an array of numbers");
  VectorXd v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], ptr + "/" + std::to_string(i));
  return v;
}

VectorXd vector_of(const json& j, const std::string& ptr, Index n) {
  VectorXd v = vector(j, ptr);
  if (v.size() != n) fail(ptr, "expected " + std::to_string(n) + " entries, found " + std::to_string(v.size()));
  return v;
}

MatrixXd matrix(const json& j, const std::string& ptr, Index cols) {
  if (!j.is_array()) fail(ptr, "expected an array of rows");
  MatrixXd m(static_cast<Index>(j.size()), cols);
  for (size_t i = 0; i < j.size(); ++i) m.row(static_cast<Index>(i)) = vector_of(j[i], ptr + "/" + std::to_string(i), cols);
  return m;
}

Polytope inequalities(const json& j, const std::string& ptr, Index n) {
  const MatrixXd p = matrix(j.at("P"), ptr + "/P", n);
  const VectorXd r = vector_of(j.at("r"), ptr + "/r", p.rows());
  return Polytope(p, r);
}

Polytope uncertainty(const json& j, const std::string& ptr, Index n) {
  if (!j.is_object() || !j.contains("form") || !j["form"].is_string()) fail(ptr + "/form", "expected a string");
  const std::string form = j["form"];
  if (form == "box") {
    expect_keys(j, ptr, {"form"}, {});
    return Polytope::box(n);
  }
  if (form == "simplex") {
    expect_keys(j, ptr, {"form"}, {});
    return Polytope::simplex(n);
  }
  if (form == "inequalities") {
    expect_keys(j, ptr, {"form", "P", "r"}, {});
    return inequalities(j, ptr, n);
  }
  if (form == "vertices") {
    expect_keys(j, ptr, {"form", "vertices"}, {});
    const MatrixXd v = matrix(j["vertices"], ptr + "/vertices", n);
    if (v.rows() == 0) fail(ptr + "/vertices", "at least one point required");
    if ((v.array() < 0.0).any()) fail(ptr + "/vertices", "points must be nonnegative");
    std::vector<VectorXd> pts;
    for (Index i = 0; i < v.rows(); ++i) pts.push_back(v.row(i).transpose());
    return hull_to_polytope(pts);
  }
  fail(ptr + "/form", "must be one of box, simplex, inequalities, vertices");
}

RiskSpec risk(const json& j, const std::string& ptr, Index n) {
  if (!j.is_object() || j.size() != 1) fail(ptr, "expected exactly one of var, coherent");
  if (j.contains("var")) {
    const json& v = j["var"];
    const std::string vp = ptr + "/var";
    expect_keys(v, vp, {"alpha", "marginal_var"}, {});
    return VarSpec{number(v["alpha"], vp + "/alpha"), vector_of(v["marginal_var"], vp + "/marginal_var", n)};
  }
  if (j.contains("coherent")) {
    const json& c = j["coherent"];
    const std::string cp = ptr + "/coherent";
    expect_keys(c, cp, {"scenarios"}, {"Q"});
    const MatrixXd s = matrix(c["scenarios"], cp + "/scenarios", n);
    CoherentSpec spec;
    for (Index k = 0; k < s.rows(); ++k) spec.scenarios.push_back(s.row(k).transpose());
    const Index k = s.rows();
    if (c.contains("Q")) {
      expect_keys(c["Q"], cp + "/Q", {"P", "r"}, {});
      spec.Q = inequalities(c["Q"], cp + "/Q", k);
    } else {
      spec.Q = Polytope(MatrixXd(0, k), VectorXd(0));
    }
    return spec;
  }
  fail(ptr, "expected exactly one of var, coherent");
}

void options(const json& j, const std::string& ptr, InstanceOptions& out) {
  expect_keys(j, ptr, {}, {"tolerances", "sample_count", "grid", "seed"});
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    const std::string tp = ptr + "/tolerances";
    expect_keys(t, tp, {}, {"feas", "cert", "zero_pivot"});
    const auto positive = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      slot = number(t[key], tp + "/" + key);
      if (slot <= 0.0) fail(tp + "/" + key, "must be positive");
    };
    positive("feas", out.tol.feas);
    positive("cert", out.tol.cert);
    positive("zero_pivot", out.tol.zero_pivot);
  }
  if (j.contains("sample_count")) out.sample_count = static_cast<int>(integer(j["sample_count"], ptr + "/sample_count", 1));
  if (j.contains("grid")) out.grid = static_cast<int>(integer(j["grid"], ptr + "/grid", 2));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail(ptr + "/seed", "expected a nonnegative integer");
    out.seed = j["seed"].get<std::uint64_t>();
  }
}

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::numeric_breakdown, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

LoadedInstance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_input, "syntax error at " + position(text, e.byte) + ": " + e.what());
  }
  expect_keys(doc, "", {"schema_version", "periods", "producers", "demand"}, {"uncertainty", "risk", "options"});
  if (!doc["schema_version"].is_string() || doc["schema_version"] != kInstanceSchemaVersion) {
    fail("/schema_version", std::string("expected \"") + kInstanceSchemaVersion + "\"");
  }
  LoadedInstance out;
  MarketInstance& m = out.market;
  m.periods = static_cast<Index>(integer(doc["periods"], "/periods", 1));

  const json& prods = doc["producers"];
  if (!prods.is_array() || prods.empty()) fail("/producers", "expected a nonempty array");
  const bool has_risk = doc.contains("risk");
  for (size_t i = 0; i < prods.size(); ++i) {
    const std::string pp = "/producers/" + std::to_string(i);
    const json& p = prods[i];
    expect_keys(p, pp, {"c_inv", "c_var"}, {"a", "a_per_period"});
    if (has_risk && (p.contains("a") || p.contains("a_per_period"))) {
      fail(pp + "/a", "scaling comes from the risk section; omit a here");
    }
    Producer prod;
    prod.c_inv = nonneg(p["c_inv"], pp + "/c_inv");
    prod.c_var = nonneg(p["c_var"], pp + "/c_var");
    if (p.contains("a")) prod.a = nonneg(p["a"], pp + "/a");
    if (p.contains("a_per_period")) {
      prod.a_per_period = vector_of(p["a_per_period"], pp + "/a_per_period", m.periods);
      if ((prod.a_per_period->array() < 0.0).any()) fail(pp + "/a_per_period", "must be nonnegative");
    }
    m.producers.push_back(prod);
  }
  const Index n = m.num_producers();

  const json& dem = doc["demand"];
  if (!dem.is_object() || !dem.contains("mode") || !dem["mode"].is_string()) fail("/demand/mode", "expected a string");
  if (dem["mode"] == "fixed") {
    expect_keys(dem, "/demand", {"mode", "d"}, {});
    m.demand = FixedDemand{vector_of(dem["d"], "/demand/d", m.periods)};
  } else if (dem["mode"] == "elastic") {
    expect_keys(dem, "/demand", {"mode", "alpha", "beta"}, {});
    m.demand = AffineDemand{vector_of(dem["alpha"], "/demand/alpha", m.periods),
                            vector_of(dem["beta"], "/demand/beta", m.periods)};
  } else {
    fail("/demand/mode", "must be fixed or elastic");
  }

  if (doc.contains("uncertainty") && has_risk) fail("/uncertainty", "give either uncertainty or risk, not both");
  if (doc.contains("uncertainty")) {
    m.uncertainty = uncertainty(doc["uncertainty"], "/uncertainty", n);
  } else if (has_risk) {
    out.risk = risk(doc["risk"], "/risk", n);
    try {
      out.risk_set = build_risk_set(*out.risk);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::invalid_input) fail("/risk", e.what());
      throw;
    }
    m = with_risk_set(m, *out.risk_set);
  } else {
    fail("/uncertainty", "required field is missing");
  }
  if (doc.contains("options")) options(doc["options"], "/options", out.options);
  try {
    m.check();
  } catch (const Error& e) {
    fail("", e.what());
  }
  out.digest = sha256_hex(doc.dump());
  return out;
}

LoadedInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_input, "cannot open instance file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

nlohmann::ordered_json instance_to_json(const MarketInstance& inst, const InstanceOptions& options) {
  nlohmann::ordered_json j;
  j["schema_version"] = kInstanceSchemaVersion;
  j["periods"] = inst.periods;
  j["producers"] = nlohmann::ordered_json::array();
  for (const Producer& p : inst.producers) {
    nlohmann::ordered_json q;
    q["c_inv"] = p.c_inv;
    q["c_var"] = p.c_var;
    q["a"] = p.a;
    if (p.a_per_period) q["a_per_period"] = to_json(*p.a_per_period);
    j["producers"].push_back(q);
  }
  if (inst.fixed_demand()) {
    j["demand"] = {{"mode", "fixed"}, {"d", to_json(inst.fixed().d)}};
  } else {
    j["demand"] = {{"mode", "elastic"}, {"alpha", to_json(inst.elastic().alpha)}, {"beta", to_json(inst.elastic().beta)}};
  }
  j["uncertainty"] = {{"form", "inequalities"}, {"P", to_json(inst.uncertainty.P)}, {"r", to_json(inst.uncertainty.r)}};
  nlohmann::ordered_json opt = nlohmann::ordered_json::object();
  const Tolerances def;
  if (options.tol.feas != def.feas || options.tol.cert != def.cert || options.tol.zero_pivot != def.zero_pivot) {
    opt["tolerances"] = {{"feas", options.tol.feas}, {"cert", options.tol.cert}, {"zero_pivot", options.tol.zero_pivot}};
  }
  if (options.sample_count) opt["sample_count"] = *options.sample_count;
  if (options.grid) opt["grid"] = *options.grid;
  if (options.seed) opt["seed"] = *options.seed;
  if (!opt.empty()) j["options"] = opt;
  return j;
}

}  // namespace peakload
