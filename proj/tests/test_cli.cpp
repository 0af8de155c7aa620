#include "peakload/cli.hpp"
#include "peakload/errors.hpp"
#include "peakload/instance_io.hpp"
#include "peakload/report.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace peakload;
namespace fs = std::filesystem;

namespace {

const std::string kDir = PEAKLOAD_INSTANCE_DIR;

std::string inst(const std::string& name) { return kDir + "/" + name; }

struct Run {
  int code = -1;
  std::string out, err;
  ReportJson json() const { return parse_report(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "peakload");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

Run run_json(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("json");
  args.push_back("--no-timing");
  return run(std::move(args));
}

fs::path temp_file(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / ("peakload_cli_" + name);
  std::ofstream(p) << body;
  return p;
}

double num(const ReportJson& j) { return j.get<double>(); }

}  // namespace

TEST_CASE("solve: robust market prices on the two-period example") {
  const Run r = run_json({"solve", "--instance", inst("prices_reform.json"), "--mode", "robust"});
  REQUIRE(r.code == kExitOk);
  const ReportJson j = r.json();
  CHECK(num(j["result"]["solution"]["prices"][0]) == doctest::Approx(2.0));
  CHECK(num(j["result"]["solution"]["prices"][1]) == doctest::Approx(3.0));
  CHECK(j["instance_digest"].get<std::string>().rfind("sha256:", 0) == 0);
}

TEST_CASE("solve: zero demand and subsidy example planner") {
  const Run z = run_json({"solve", "--instance", inst("zero_demand.json")});
  REQUIRE(z.code == kExitOk);
  CHECK(num(z.json()["result"]["solution"]["objective"]) == 0.0);

  const Run s = run_json({"solve", "--instance", inst("subsidy_example.json"), "--mode", "robust-cp"});
  REQUIRE(s.code == kExitOk);
  const ReportJson j = s.json();
  CHECK(num(j["result"]["value"]) == doctest::Approx(1.62));
  CHECK(j["result"]["certificates"]["adjustable"]["passed"].get<bool>());
}

TEST_CASE("solve: expected mode needs a mean") {
  CHECK(run({"solve", "--instance", inst("single_period_vertices.json"), "--mode", "expected"}).code ==
        kExitInputError);
  const Run r = run_json(
      {"solve", "--instance", inst("single_period_vertices.json"), "--mode", "expected", "--mean", "0.5,0.5"});
  REQUIRE(r.code == kExitOk);
  CHECK(num(r.json()["result"]["solution"]["objective"]) == doctest::Approx(3.0));
  CHECK(run({"solve", "--instance", inst("single_period_vertices.json"), "--mode", "expected", "--mean", "1,2,3"})
            .code == kExitInputError);
}

TEST_CASE("poa: generated families") {
  const Run e = run_json({"poa", "--generate", "elastic-family", "--alpha", "2"});
  REQUIRE(e.code == kExitOk);
  CHECK(std::abs(num(e.json()["result"]["poa"]["ratio"]) - 2.25) <= 1e-4);

  const Run t = run_json({"poa", "--generate", "tight-fixed", "--delta", "0.5"});
  REQUIRE(t.code == kExitOk);
  CHECK(num(t.json()["result"]["poa"]["E"]) == doctest::Approx(0.5));

  const Run b = run_json({"poa", "--instance", inst("box_set.json")});
  REQUIRE(b.code == kExitOk);
  CHECK(num(b.json()["result"]["poa"]["ratio"]) == doctest::Approx(1.0));

  CHECK(run({"poa", "--generate", "tight-fixed", "--delta", "1.5"}).code == kExitInputError);
  CHECK(run({"poa", "--generate", "elastic-family", "--alpha", "-1"}).code == kExitInputError);
  CHECK(run({"poa", "--generate", "tight-restricted", "--delta", "0.1"}).code == kExitInputError);
  CHECK(run({"poa", "--generate", "mystery"}).code == kExitInputError);
  CHECK(run({"poa"}).code == kExitInputError);
  CHECK(run({"poa", "--instance", inst("box_set.json"), "--generate", "tight-fixed"}).code == kExitInputError);
}

TEST_CASE("poa: emitted instances load back") {
  const fs::path out = fs::temp_directory_path() / "peakload_cli_emitted.json";
  const Run g = run_json({"poa", "--generate", "tight-restricted", "--rho", "2", "--delta", "0.1", "--emit-instance",
                          out.string()});
  REQUIRE(g.code == kExitOk);
  const Run back = run_json({"poa", "--instance", out.string()});
  REQUIRE(back.code == kExitOk);
  CHECK(num(back.json()["result"]["poa"]["ratio"]) == doctest::Approx(num(g.json()["result"]["poa"]["ratio"])));
  CHECK(back.json()["instance_digest"] == g.json()["instance_digest"]);
}

TEST_CASE("poa: risk sections") {
  const Run v = run_json({"poa", "--instance", inst("var_risk.json")});
  REQUIRE(v.code == kExitOk);
  const ReportJson j = v.json();
  CHECK(num(j["result"]["poa"]["bound"]) == doctest::Approx(1.0));
  CHECK(num(j["result"]["poa"]["E"]) == doctest::Approx(num(j["result"]["poa"]["C"])));
  CHECK(j["result"]["risk"]["kind"] == "var");

  const Run c = run_json({"poa", "--instance", inst("coherent_risk.json")});
  REQUIRE(c.code == kExitOk);
  CHECK(num(c.json()["result"]["poa"]["tau"]) == doctest::Approx(0.75));
}

TEST_CASE("subsidy command") {
  const Run s = run_json({"subsidy", "--instance", inst("subsidy_example.json")});
  REQUIRE(s.code == kExitOk);
  const ReportJson j = s.json();
  CHECK(num(j["result"]["eta"][0]) == doctest::Approx(0.2));
  CHECK(num(j["result"]["eta"][1]) == doctest::Approx(0.2));
  CHECK(j["result"]["verification"]["is_equilibrium"].get<bool>());
  CHECK(j["result"]["scenarios"].size() == 4);

  const Run zero = run_json({"subsidy", "--instance", inst("subsidy_example.json"), "--eta", "0,0"});
  CHECK(zero.code == kExitNotEquilibrium);
  CHECK(zero.err.find("producer 0") != std::string::npos);
  CHECK_FALSE(zero.json()["result"]["verification"]["is_equilibrium"].get<bool>());

  const Run nominal = run_json({"subsidy", "--instance", inst("no_uncertainty_elastic.json")});
  REQUIRE(nominal.code == kExitOk);
  CHECK(std::abs(num(nominal.json()["result"]["eta"][0])) <= 1e-9);
  // a = 0: every vertex of the box prices alike.
  const ReportJson sc = nominal.json()["result"]["scenarios"];
  for (const auto& row : sc) CHECK(num(row["prices"][0]) == doctest::Approx(num(sc[0]["prices"][0])));

  CHECK(run({"subsidy", "--instance", inst("prices_reform.json")}).code == kExitInputError);
  CHECK(run({"subsidy", "--instance", inst("subsidy_example.json"), "--eta", "1"}).code == kExitInputError);
}

TEST_CASE("tau and validate-set") {
  const Run s = run_json({"tau", "--instance", inst("subsidy_example.json")});
  REQUIRE(s.code == kExitOk);
  CHECK(num(s.json()["result"]["tau"]) == doctest::Approx(0.75));
  CHECK(s.json()["result"]["vertex_count"] == 4);

  CHECK(num(run_json({"tau", "--instance", inst("prices_reform.json")}).json()["result"]["tau"]) ==
        doctest::Approx(0.5));
  CHECK(num(run_json({"tau", "--instance", inst("box_set.json")}).json()["result"]["tau"]) == doctest::Approx(1.0));

  CHECK(run({"tau", "--instance", inst("empty_set.json")}).code == kExitInfeasible);
  const Run v = run_json({"validate-set", "--instance", inst("empty_set.json")});
  REQUIRE(v.code == kExitOk);
  CHECK_FALSE(v.json()["result"]["validation"]["nonempty"].get<bool>());
  CHECK(v.json()["result"]["tau"].is_null());
}

TEST_CASE("infeasible or unbounded programs exit with 2") {
  CHECK(run({"solve", "--instance", inst("empty_set.json"), "--mode", "robust-cp"}).code == kExitInfeasible);
}

TEST_CASE("failed certificates exit with 4") {
  const fs::path p = temp_file("tight.json", R"({
    "schema_version": "1.0", "periods": 1,
    "producers": [{"c_inv": 0.2, "c_var": 0.1, "a": 4}, {"c_inv": 0.3, "c_var": 0, "a": 4}],
    "demand": {"mode": "elastic", "alpha": [4.7], "beta": [1.3]},
    "uncertainty": {"form": "simplex"},
    "options": {"tolerances": {"feas": 1e-300, "cert": 1e-300}}
  })");
  const Run r = run({"solve", "--instance", p.string()});
  CHECK(r.code == kExitCertificate);
  CHECK(r.err.find("certificate") != std::string::npos);
}

TEST_CASE("input errors name the field or position") {
  const auto diag = [](const std::string& name, const std::string& body) {
    const Run r = run({"solve", "--instance", temp_file(name, body).string()});
    CHECK(r.code == kExitInputError);
    return r.err;
  };
  CHECK(diag("syntax.json", "{\n  \"schema_version\": \"1.0\",\n  \"periods\": ,\n}").find("line 3") !=
        std::string::npos);
  const std::string base = R"("schema_version": "1.0", "periods": 1, "demand": {"mode": "fixed", "d": [1]},
    "uncertainty": {"form": "box"})";
  CHECK(diag("unknown.json", "{" + base + R"(, "producers": [{"c_inv": 1, "c_var": 1, "colour": 2}]})")
            .find("/producers/0/colour") != std::string::npos);
  CHECK(diag("negative.json", "{" + base + R"(, "producers": [{"c_inv": -1, "c_var": 1}]})")
            .find("/producers/0/c_inv") != std::string::npos);
  CHECK(diag("missing.json", "{" + base + "}").find("/producers") != std::string::npos);
  CHECK(diag("version.json",
             R"({"schema_version": "0.9", "periods": 1, "demand": {"mode": "fixed", "d": [1]},
                 "uncertainty": {"form": "box"}, "producers": [{"c_inv": 1, "c_var": 1}]})")
            .find("/schema_version") != std::string::npos);
  CHECK(diag("length.json",
             R"({"schema_version": "1.0", "periods": 2, "demand": {"mode": "fixed", "d": [1]},
                 "uncertainty": {"form": "box"}, "producers": [{"c_inv": 1, "c_var": 1}]})")
            .find("/demand/d") != std::string::npos);
  CHECK(diag("both.json",
             R"({"schema_version": "1.0", "periods": 1, "demand": {"mode": "fixed", "d": [1]},
                 "uncertainty": {"form": "box"}, "risk": {"var": {"alpha": 0.1, "marginal_var": [1]}},
                 "producers": [{"c_inv": 1, "c_var": 1}]})")
            .find("/uncertainty") != std::string::npos);
  CHECK(diag("badvar.json",
             R"({"schema_version": "1.0", "periods": 1, "demand": {"mode": "fixed", "d": [1]},
                 "risk": {"var": {"alpha": 0.1, "marginal_var": [0]}},
                 "producers": [{"c_inv": 1, "c_var": 1}]})")
            .find("BadVar") != std::string::npos);
  CHECK(diag("form.json",
             R"({"schema_version": "1.0", "periods": 1, "demand": {"mode": "fixed", "d": [1]},
                 "uncertainty": {"form": "ball"}, "producers": [{"c_inv": 1, "c_var": 1}]})")
            .find("/uncertainty/form") != std::string::npos);
  CHECK(run({"solve", "--instance", inst("prices_reform.json"), "--mode", "fastest"}).code == kExitInputError);
  CHECK(run({}).code == kExitInputError);
  CHECK(run({"solve"}).code == kExitInputError);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("reports round-trip byte for byte") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"solve", "--instance", inst("subsidy_example.json"), "--mode", "robust-cp"},
           {"subsidy", "--instance", inst("subsidy_example.json")},
           {"poa", "--generate", "elastic-family", "--alpha", "0.75"},
           {"solve", "--instance", inst("box_set.json"), "--mode", "robust"}}) {
    const Run r = run_json(args);
    REQUIRE(r.code == kExitOk);
    CHECK(emit_json(parse_report(r.out)) == r.out);
  }
  const ReportJson odd = {{"x", 0.1}, {"inf", to_json(1.0 / 0.0)}, {"neg0", -0.0}, {"big", 1e300}, {"n", 3}};
  const std::string once = emit_json(odd);
  CHECK(emit_json(parse_report(once)) == once);
  CHECK(once.find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("identical inputs give identical reports") {
  const std::vector<std::string> args{"solve", "--instance", inst("coherent_risk.json"), "--mode", "robust-cp"};
  CHECK(run_json(args).out == run_json(args).out);

  // With timing included the reports differ only in the timing field.
  std::vector<std::string> timed = args;
  timed.insert(timed.end(), {"--format", "json"});
  ReportJson a = run(timed).json(), b = run(timed).json();
  REQUIRE(a.contains("timing"));
  a.erase("timing");
  b.erase("timing");
  CHECK(emit_json(a) == emit_json(b));
}

TEST_CASE("seed precedence") {
  const std::vector<std::string> args{"subsidy", "--instance", inst("subsidy_example.json"), "--samples", "8"};
  std::vector<std::string> with_flag = args;
  with_flag.insert(with_flag.end(), {"--seed", "5"});
  CHECK(run_json(with_flag).json()["result"]["audit"]["seed"] == 5);
  CHECK(run_json(args).json()["result"]["audit"]["seed"] == kDefaultSeed);

  ::setenv(kSeedEnv, "99", 1);
  CHECK(run_json(with_flag).json()["result"]["audit"]["seed"] == 99);
  ::setenv(kSeedEnv, "not-a-number", 1);
  CHECK(run(with_flag).code == kExitInputError);
  ::unsetenv(kSeedEnv);

  // The instance's options.seed applies when no flag is given.
  const Run c = run_json({"solve", "--instance", inst("coherent_risk.json"), "--mode", "robust-cp"});
  CHECK(c.json()["result"]["certificates"]["adjustable"]["seed"] == 7);
}

TEST_CASE("text output") {
  const Run r = run({"tau", "--instance", inst("box_set.json"), "--no-timing"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("tau: 1\n") != std::string::npos);
}

TEST_CASE("instance writer round trip") {
  const LoadedInstance a = load_instance(inst("subsidy_example.json"));
  const LoadedInstance b = parse_instance(emit_json(instance_to_json(a.market)));
  CHECK(b.market.uncertainty.P.isApprox(a.market.uncertainty.P));
  CHECK(b.market.elastic().alpha(0) == 5.0);
}
