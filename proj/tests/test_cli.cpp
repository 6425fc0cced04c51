#include <doctest.h>

#include <json.hpp>

#include "cli_runner.hpp"

using nlohmann::json;

TEST_CASE("primes") {
  auto r = run_cli("primes 3");
  CHECK(r.code == 0);
  CHECK(r.out == "n\t2^(n+1)\tp_n\n1\t4\t5\n2\t8\t11\n3\t16\t17\n");
  r = run_cli("primes 0 --json");
  CHECK(r.code == 0);
  CHECK(r.out == "[]\n");
  CHECK(run_cli("primes 62").code == 1);
}

TEST_CASE("usage errors") {
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("build --profile huge").code == 1);
  CHECK(run_cli("build --s 3").code == 1);
  CHECK(run_cli("verify pn").code == 1);
  CHECK(run_cli("verify pn --set 3:").code == 1);
  CHECK(run_cli("build --n-min 4").code == 1);
}

TEST_CASE("build, persist, verify") {
  const auto dir = scratch_dir("lacunary_cli_test");
  const auto fam = (dir / "tiny.json").string();
  auto r = run_cli("build --profile tiny --out " + fam);
  CHECK(r.code == 0);
  CHECK(r.out.find("n_feasible=4") != std::string::npos);
  const auto stdout_build = run_cli("build --profile tiny");
  CHECK(stdout_build.out == slurp(fam));

  for (const char* kind : {"pn", "zs", "leinert", "qi"}) {
    const auto cert = (dir / (std::string(kind) + ".json")).string();
    r = run_cli(std::string("verify ") + kind + " " + fam + " --out " + cert);
    CHECK(r.code == 0);
    const auto j = json::parse(slurp(cert));
    CHECK(j.at("kind") == kind);
    CHECK(j.at("format_version") == 1);
  }
  r = run_cli("verify zs " + fam + " --json --strategy naive");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out).at("payload").at("certificate").at("strategy") == "naive");

  CHECK(run_cli("verify zs " + fam + " --budget-tuples 3").code == 3);
  CHECK(run_cli("verify pn " + (dir / "absent.json").string()).code == 4);
  std::ofstream(dir / "garbage.json") << "{\"format_version\": 1}";
  CHECK(run_cli("verify pn " + (dir / "garbage.json").string()).code == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("partial builds") {
  const auto r = run_cli("build --profile paper --s 2 --n-min 3 --n-max 3");
  CHECK(r.code == 2);
  const auto j = json::parse(r.out);
  CHECK(j.at("payload").at("factors").at(0).at("feasible") == false);
  CHECK(j.at("payload").at("n_feasible").is_null());
}

TEST_CASE("explicit sets") {
  auto r = run_cli("verify leinert --set 3:1,2,3,4 --json");
  CHECK(r.code == 2);
  const auto search = json::parse(r.out).at("payload").at("searches").at(0).at("search");
  CHECK(search.at("outcome") == "found");
  r = run_cli("verify pn --set 3:1,3");
  CHECK(r.code == 0);
  r = run_cli("verify pn --set 3:1,2");
  CHECK(r.code == 2);
  CHECK(r.out.find("eps=(2,-1)") != std::string::npos);
  CHECK(run_cli("verify qi --set 3:1,2,4,8").code == 0);
  CHECK(run_cli("verify pn --set 3:1,99").code == 1);
}

TEST_CASE("norms, witnesses and reports") {
  auto r = run_cli("norms --n-min 1 --n-max 3 --q 3 --q 5");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAILED") == std::string::npos);
  CHECK(run_cli("norms --q 0.5").code == 1);
  r = run_cli("witness-weak-sidon --C 0 --C 1 --C 2 --json");
  CHECK(r.code == 0);
  const auto rows = json::parse(r.out).at("payload").at("weak_sidon");
  CHECK(rows.at(0).at("n") == 1);
  CHECK(rows.at(1).at("n") == 41);
  CHECK(rows.at(2).at("n") == 161);
  CHECK(run_cli("witness-weak-sidon --C -1").code == 1);

  const auto dir = scratch_dir("lacunary_cli_report");
  const auto fam = (dir / "tiny.json").string();
  REQUIRE(run_cli("build --profile tiny --out " + fam).code == 0);
  r = run_cli("report " + fam + " --json");
  CHECK(r.code == 0);
  const auto sections = json::parse(r.out).at("payload").at("sections");
  for (const auto& [name, section] : sections.items()) CHECK(section.at("status") == "verified");
  CHECK(sections.at("weak_sidon").at("rows").at(0).at("n") == 41);

  auto empty = json::parse(slurp(fam));
  empty["payload"]["factors"] = json::array();
  empty["payload"]["n_feasible"] = nullptr;
  std::ofstream(dir / "empty.json") << empty.dump(2) << '\n';
  r = run_cli("report " + (dir / "empty.json").string() + " --json");
  CHECK(r.code == 3);
  for (const auto& [name, section] : json::parse(r.out).at("payload").at("sections").items()) {
    CHECK(section.at("status") == "unverified");
  }
  std::filesystem::remove_all(dir);
}
