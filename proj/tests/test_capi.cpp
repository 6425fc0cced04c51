#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "lacunary/lacunary.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  lac_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("primes through the C interface") {
  std::uint64_t p = 0;
  CHECK(lac_smallest_admissible_prime(8, &p) == LAC_OK);
  CHECK(p == 521);
  CHECK(lac_smallest_admissible_prime(0, &p) == LAC_INVALID_ARGUMENT);
  CHECK(std::strlen(lac_last_error()) > 0);
  CHECK(lac_smallest_admissible_prime(62, &p) == LAC_OVERFLOW);
  char* json = nullptr;
  CHECK(lac_primes_json(3, &json) == LAC_OK);
  CHECK(take(json) == R"([{"n":1,"p":5,"power":4},{"n":2,"p":11,"power":8},{"n":3,"p":17,"power":16}])");
  CHECK(lac_primes_json(0, &json) == LAC_OK);
  CHECK(take(json) == "[]");
  CHECK(std::string(lac_version()) == "1.0.0");
}

TEST_CASE("family lifecycle") {
  lac_build_config config;
  lac_build_config_default(&config);
  config.profile = "tiny";
  lac_family* fam = nullptr;
  char* text = nullptr;
  REQUIRE(lac_family_build(&config, &fam, &text) == LAC_OK);
  CHECK(take(text).find("n=8") != std::string::npos);
  std::uint32_t s = 0, factors = 0;
  std::uint64_t elements = 0;
  CHECK(lac_family_counts(fam, &s, &factors, &elements) == LAC_OK);
  CHECK(s == 2);
  CHECK(factors == 5);
  CHECK(elements == 15);

  char* serialized = nullptr;
  REQUIRE(lac_family_serialize(fam, &serialized) == LAC_OK);
  const std::string first = take(serialized);
  lac_family* again = nullptr;
  REQUIRE(lac_family_parse(first.c_str(), &again) == LAC_OK);
  REQUIRE(lac_family_serialize(again, &serialized) == LAC_OK);
  CHECK(take(serialized) == first);

  const auto path = std::filesystem::temp_directory_path() / "lacunary_capi_family.json";
  CHECK(lac_family_save(fam, path.c_str()) == LAC_OK);
  lac_family* loaded = nullptr;
  CHECK(lac_family_load(path.c_str(), &loaded) == LAC_OK);
  lac_family_free(loaded);
  std::filesystem::remove(path);

  lac_budgets budgets;
  lac_budgets_default(&budgets);
  char* cert = nullptr;
  CHECK(lac_verify_pn(fam, &budgets, &cert, nullptr) == LAC_OK);
  CHECK(take(cert).find("\"kind\": \"pn\"") != std::string::npos);
  CHECK(lac_verify_zs(fam, 0, "naive", &budgets, nullptr, nullptr) == LAC_OK);
  CHECK(lac_verify_zs(fam, 0, "bogus", &budgets, nullptr, nullptr) == LAC_INVALID_ARGUMENT);
  CHECK(lac_verify_leinert(fam, 0, 0, &budgets, nullptr, nullptr) == LAC_OK);
  CHECK(lac_verify_qi(fam, &budgets, nullptr, nullptr) == LAC_OK);
  CHECK(lac_report(fam, &budgets, nullptr, &text) == LAC_OK);
  CHECK(take(text).find("[weak-sidon]") != std::string::npos);

  budgets.tuples = 5;
  CHECK(lac_verify_zs(fam, 0, "naive", &budgets, nullptr, nullptr) == LAC_BUDGET_REFUSED);
  budgets.tuples = 0;
  CHECK(lac_verify_zs(fam, 0, "naive", &budgets, nullptr, nullptr) == LAC_INVALID_ARGUMENT);

  lac_family_free(again);
  lac_family_free(fam);
}

TEST_CASE("error statuses") {
  lac_family* fam = nullptr;
  CHECK(lac_family_load("/nonexistent/family.json", &fam) == LAC_IO_ERROR);
  CHECK(lac_family_parse("{", &fam) == LAC_FORMAT_ERROR);
  CHECK(lac_family_load(nullptr, &fam) == LAC_INVALID_ARGUMENT);
  lac_build_config config;
  lac_build_config_default(&config);
  config.s = 3;
  CHECK(lac_family_build(&config, &fam, nullptr) == LAC_INVALID_ARGUMENT);
  config.s = 2;
  config.profile = "paper";
  config.n_min = config.n_max = 3;
  REQUIRE(lac_family_build(&config, &fam, nullptr) == LAC_CLAIM_VIOLATED);
  lac_family_free(fam);
}

TEST_CASE("explicit sets") {
  const std::uint64_t e[] = {1, 2, 3, 4};
  lac_family* fam = nullptr;
  REQUIRE(lac_family_from_set(2, 3, e, 4, &fam) == LAC_OK);
  char* cert = nullptr;
  CHECK(lac_verify_leinert(fam, 0, 0, nullptr, &cert, nullptr) == LAC_CLAIM_VIOLATED);
  CHECK(take(cert).find("\"found\"") != std::string::npos);
  CHECK(lac_verify_pn(fam, nullptr, nullptr, nullptr) == LAC_CLAIM_VIOLATED);
  lac_family_free(fam);
  const std::uint64_t dup[] = {1, 1};
  CHECK(lac_family_from_set(2, 3, dup, 2, &fam) == LAC_INVALID_ARGUMENT);
  const std::uint64_t big[] = {17};
  CHECK(lac_family_from_set(2, 3, big, 1, &fam) == LAC_INVALID_ARGUMENT);
}

TEST_CASE("norms and weak-Sidon through the C interface") {
  char* text = nullptr;
  CHECK(lac_norms(1, 3, nullptr, 0, nullptr, nullptr, &text) == LAC_OK);
  CHECK(take(text).find("n=3") != std::string::npos);
  const double bad[] = {0.5};
  CHECK(lac_norms(1, 3, bad, 1, nullptr, nullptr, nullptr) == LAC_INVALID_ARGUMENT);
  CHECK(lac_norms(3, 1, nullptr, 0, nullptr, nullptr, nullptr) == LAC_INVALID_ARGUMENT);
  const char* cs[] = {"0", "1", "2"};
  char* cert = nullptr;
  CHECK(lac_weak_sidon_witness(cs, 3, &cert, nullptr) == LAC_OK);
  const std::string c = take(cert);
  CHECK(c.find("\"n\": 161") != std::string::npos);
  const char* neg[] = {"-1"};
  CHECK(lac_weak_sidon_witness(neg, 1, nullptr, nullptr) == LAC_INVALID_ARGUMENT);
}
