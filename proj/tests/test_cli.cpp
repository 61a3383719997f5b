#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "xrt_cli_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(XRT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

// Minimal validator covering the subset of JSON Schema the report schema
// uses: type, const, enum, required, properties, additionalProperties.
void validate(const json& schema, const json& doc) {
  if (schema.contains("type")) {
    const std::string t = schema["type"];
    if (t == "object") CHECK(doc.is_object());
    if (t == "string") CHECK(doc.is_string());
    if (t == "number") CHECK(doc.is_number());
  }
  if (schema.contains("const")) CHECK(doc == schema["const"]);
  if (schema.contains("enum")) {
    bool hit = false;
    for (const json& v : schema["enum"]) hit = hit || doc == v;
    CHECK(hit);
  }
  if (schema.contains("required"))
    for (const json& key : schema["required"])
      CHECK(doc.contains(key.get<std::string>()));
  if (schema.value("additionalProperties", json(true)) == json(false))
    for (const auto& el : doc.items())
      CHECK(schema["properties"].contains(el.key()));
  if (schema.contains("properties") && doc.is_object())
    for (const auto& el : schema["properties"].items())
      if (doc.contains(el.key())) validate(el.value(), doc[el.key()]);
}

json schema() { return load_json(XRT_SCHEMA_PATH); }

int crlf_rows(const std::string& body) {
  int rows = 0;
  for (std::size_t i = 0; i + 1 < body.size(); ++i)
    if (body[i] == '\r' && body[i + 1] == '\n') ++rows;
  return rows;
}

}  // namespace

TEST_CASE("transform writes a CSV and a schema-valid report") {
  fs::path d = fresh_dir("transform");
  REQUIRE(run_cli("transform --out " + d.string() +
                  " --seeds random:20:1.5 --seed 3") == 0);
  const std::string csv = slurp(d / "transform.csv");
  CHECK(crlf_rows(csv) == 21);  // header + 20 seeds
  CHECK(csv.rfind("x,y,vx,vy,value,tail_bound,horizon\r\n", 0) == 0);
  json rep = load_json(d / "report.json");
  validate(schema(), rep);
  CHECK(rep["subcommand"] == "transform");
  CHECK(rep["config"]["seed"] == 3);
  CHECK(rep["results"]["count"] == 20);
  CHECK(fs::exists(d / "transform.csv"));
  CHECK(!fs::exists(d / "transform.csv.tmp"));  // atomic write leaves no temp
}

TEST_CASE("same config and seed give a byte-identical report modulo timings") {
  fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  const std::string args = " --seeds random:15:1.2 --seed 42 --model powerlaw:1,3";
  REQUIRE(run_cli("transform --out " + d1.string() + args) == 0);
  REQUIRE(run_cli("transform --out " + d2.string() + args) == 0);
  json r1 = load_json(d1 / "report.json");
  json r2 = load_json(d2 / "report.json");
  r1.erase("timings");
  r2.erase("timings");
  r1["config"].erase("out");
  r2["config"].erase("out");
  CHECK(r1.dump() == r2.dump());
  // the data artifact itself is byte-identical
  CHECK(slurp(d1 / "transform.csv") == slurp(d2 / "transform.csv"));
}

TEST_CASE("config file fills unset options; flags win; unknown keys rejected") {
  fs::path d = fresh_dir("config");
  {
    std::ofstream out(d / "cfg.json");
    out << R"({"seeds": "random:5:1.0", "tol": 1e-7, "seed": 11})";
  }
  REQUIRE(run_cli("transform --config " + (d / "cfg.json").string() + " --out " +
                  d.string() + " --tol 1e-9") == 0);
  json rep = load_json(d / "report.json");
  CHECK(rep["config"]["seeds"] == "random:5:1.0");
  CHECK(rep["config"]["seed"] == 11);
  CHECK(rep["config"]["tol"] == 1e-9);  // the flag overrides the file
  {
    std::ofstream out(d / "bad.json");
    out << R"({"sedes": "random:5:1.0"})";
  }
  CHECK(run_cli("transform --config " + (d / "bad.json").string() + " --out " +
                d.string()) == 1);
}

TEST_CASE("validation failures exit 1") {
  fs::path d = fresh_dir("validation");
  CHECK(run_cli("transform --model nosuch --out " + d.string()) == 1);
  CHECK(run_cli("transform --field radial:0.5 --out " + d.string()) == 1);
  CHECK(run_cli("transform --out " + (d / "missing").string()) == 1);
  CHECK(run_cli("jacobi --init q --out " + d.string()) == 1);
  CHECK(run_cli("harmonics --field gaussian --out " + d.string()) == 1);
}

TEST_CASE("numerical failures exit 2 and leave a diagnostics file") {
  fs::path d = fresh_dir("numerical");
  CHECK(run_cli("transform --field radial:1.5 --tol 1e-10 --max-horizon 30 "
                "--seeds random:3:1.0 --out " +
                d.string()) == 2);
  json diag = load_json(d / "diagnostics.json");
  CHECK(diag.contains("error"));
  CHECK(!diag["error"].get<std::string>().empty());
}

TEST_CASE("verify-all passes on each model preset and writes the check table") {
  for (const std::string model : {"flat", "hyperbolic:1", "powerlaw:1,3"}) {
    fs::path d = fresh_dir("verify_" + model.substr(0, 4));
    REQUIRE(run_cli("verify-all --model " + model + " --seed 3 --out " +
                    d.string()) == 0);
    const std::string csv = slurp(d / "verify.csv");
    CHECK(crlf_rows(csv) >= 9);
    CHECK(csv.find(",0\r\n") == std::string::npos);  // no failed checks
    json rep = load_json(d / "report.json");
    validate(schema(), rep);
    CHECK(rep["results"]["failures"] == 0);
  }
}

TEST_CASE("reconstruct report carries residual and error") {
  fs::path d = fresh_dir("recon");
  REQUIRE(run_cli("reconstruct --out " + d.string() +
                  " --grid-n 24 --nseeds 500 --max-iter 400") == 0);
  json rep = load_json(d / "report.json");
  validate(schema(), rep);
  CHECK(rep["results"]["rel_residual"].get<double>() < 1e-3);
  CHECK(rep["results"]["rel_error"].get<double>() < 1e-2);
  CHECK(crlf_rows(slurp(d / "reconstruction.csv")) == 24 * 24 + 1);
}
