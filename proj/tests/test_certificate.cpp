#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "lacunary/commands.hpp"
#include "lacunary/errors.hpp"

using namespace lacunary;
namespace cmd = lacunary::commands;

namespace {

bool no_float_numbers(const Json& j) {
  if (j.is_number_float()) return false;
  if (j.is_structured()) {
    for (const auto& v : j) {
      if (!no_float_numbers(v)) return false;
    }
  }
  return true;
}

void check_stable(const CertificateFile& file) {
  const std::string a = serialize(file);
  const CertificateFile parsed = parse_certificate(a);
  CHECK(parsed == file);
  CHECK(serialize(parsed) == a);
  CHECK(no_float_numbers(parsed.payload));
  CHECK(a.back() == '\n');
}

LacunaryFamily desk2() { return build_family(2, 8, 12, named_profile("desk", 2)); }

}  // namespace

TEST_CASE("structural round trips") {
  const auto family = desk2();
  CHECK(family_from_json(to_json(family)) == family);
  for (const auto& f : family.factors) {
    CHECK(pn_certificate_from_json(to_json(f.certificate)) == f.certificate);
    CHECK(factor_subset_from_json(to_json(f.set)) == f.set);
    const auto qi = extract_quasi_independent(f.set);
    CHECK(qi_witness_from_json(to_json(qi)) == qi);
  }
  const auto words = family.union_words();
  const auto z = z_value(words, 2);
  CHECK(zs_certificate_from_json(to_json(z), family.table) == z);
  const auto t17 = std::make_shared<const FactorTable>(FactorTable::standard(3));
  std::vector<Word> small;
  for (std::int64_t e = 1; e <= 4; ++e) small.push_back(Word::letter(t17, 3, e));
  const auto l = leinert_violation(small, 2);
  CHECK(leinert_search_from_json(to_json(l), t17) == l);
  const auto spectrum = transform(fejer_kernel(3, 17), {3, 4.5});
  CHECK(spectrum_report_from_json(to_json(spectrum)) == spectrum);
  const auto k = kernel_norm_check(3, 17, 6);
  CHECK(kernel_norm_check_from_json(to_json(k)) == k);
  const auto chain = kernel_chain(family.factors[0].set, 100, 4);
  CHECK(kernel_chain_from_json(to_json(chain)) == chain);
  const auto w = weak_sidon_witness({7, 4});
  CHECK(weak_sidon_witness_from_json(to_json(w)) == w);
  CHECK(word_from_json(word_to_json(words[3]), family.table) == words[3]);
}

TEST_CASE("every certificate kind is byte-stable") {
  const auto family = desk2();
  const cmd::Budgets budgets;
  check_stable(family_file(family));
  check_stable(cmd::verify_pn(family, budgets).certificate);
  check_stable(cmd::verify_zs(family, 0, ZsStrategy::meet_in_middle, budgets).certificate);
  check_stable(cmd::verify_leinert(family, 0, false, budgets).certificate);
  check_stable(cmd::verify_qi(family, budgets).certificate);
  check_stable(cmd::norms(1, 4, {}, budgets).certificate);
  check_stable(cmd::report(family, budgets).certificate);
  check_stable(cmd::weak_sidon({{1, 1}, {1, 3}}).certificate);
  CHECK(family_from_certificate(parse_certificate(serialize(family_file(family)))) == family);
}

TEST_CASE("format errors") {
  CHECK_THROWS_AS(parse_certificate("not json"), FormatError);
  CHECK_THROWS_AS(parse_certificate("{}"), FormatError);
  Json j = Json::parse(serialize(family_file(desk2())));
  j["format_version"] = 2;
  CHECK_THROWS_AS(parse_certificate(j.dump()), FormatError);
  j["format_version"] = 1;
  j["kind"] = "mystery";
  CHECK_THROWS_AS(parse_certificate(j.dump()), FormatError);
  j["kind"] = "pn";
  CHECK_THROWS_AS(family_from_certificate(parse_certificate(j.dump())), FormatError);
  CHECK_THROWS_AS(parse_kind("mystery"), FormatError);
  CHECK(parse_kind(to_string(CertificateKind::spectrum)) == CertificateKind::spectrum);
}

TEST_CASE("cached construction records are not trusted") {
  const auto family = desk2();
  Json j = Json::parse(serialize(family_file(family)));
  for (auto& f : j["payload"]["factors"]) {
    f.erase("certificate");
    f.erase("feasible");
  }
  const auto stripped = family_from_certificate(parse_certificate(j.dump()));
  const cmd::Budgets budgets;
  CHECK(cmd::verify_pn(stripped, budgets).verdict == cmd::verify_pn(family, budgets).verdict);
  CHECK(cmd::verify_qi(stripped, budgets).verdict == cmd::verify_qi(family, budgets).verdict);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2) == "2");
  CHECK(parse_double(Json("0.10000000000000001")) == 0.1);
  CHECK_THROWS_AS(parse_double(Json("abc")), FormatError);
}

TEST_CASE("timestamps follow SOURCE_DATE_EPOCH") {
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(reproducible_timestamp() == "1970-01-01T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  CHECK(reproducible_timestamp() == "1970-01-02T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "lacunary_cert_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "family.json";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  CHECK(read_text_file(path) == "second\n");
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  CHECK_THROWS_AS(read_text_file(dir / "missing.json"), IoError);
  CHECK_THROWS_AS(write_file_atomic(dir / "no" / "such" / "dir.json", "x"), IoError);
  std::filesystem::remove_all(dir);
}
