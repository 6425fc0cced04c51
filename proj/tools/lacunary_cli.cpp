// lacunary: build lacunary families in free products of cyclic groups and
// certify their combinatorial and spectral properties.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lacunary/lacunary.h"

namespace {

int exit_code(lac_status s) {
  switch (s) {
    case LAC_OK:
    case LAC_CLAIM_VIOLATED:
    case LAC_BUDGET_REFUSED:
      return static_cast<int>(s);
    case LAC_IO_ERROR:
    case LAC_FORMAT_ERROR:
      return 4;
    default:
      return 1;
  }
}

// Owns a string handed out by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { lac_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct FamilyHandle {
  lac_family* f = nullptr;
  ~FamilyHandle() { lac_family_free(f); }
};

int report_error(lac_status s) {
  std::cerr << "lacunary: " << lac_last_error() << '\n';
  return exit_code(s);
}

struct Common {
  lac_budgets budgets{};
  std::string out;
  bool json = false;
};

void add_budget_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--budget-tuples", c.budgets.tuples, "Z_s tuple enumeration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--budget-subsets", c.budgets.subsets, "largest set size for 2^m subset-sum enumeration")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget-spectral", c.budgets.spectral, "largest transform order")->check(CLI::PositiveNumber);
  cmd->add_option("--budget-epsilons", c.budgets.epsilons, "epsilon vectors in the (P) brute force")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget-nodes", c.budgets.leinert_nodes, "DFS nodes in the Leinert search")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", c.budgets.tolerance, "floating-point tolerance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", c.budgets.threads, "worker threads")->check(CLI::PositiveNumber);
}

void add_output_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "write the certificate file here");
  cmd->add_flag("--json", c.json, "print the certificate instead of the summary");
}

// Prints and persists a finished computation.
int emit(lac_status s, const Common& c, const Owned& cert, const Owned& text) {
  if (s != LAC_OK && s != LAC_CLAIM_VIOLATED && !(s == LAC_BUDGET_REFUSED && cert.p)) return report_error(s);
  if (!c.out.empty()) {
    const lac_status w = lac_write_file_atomic(c.out.c_str(), cert.p);
    if (w != LAC_OK) return report_error(w);
  }
  std::cout << (c.json ? cert.str() : text.str());
  return exit_code(s);
}

// "n:e1,e2,..."
bool parse_set(const std::string& spec, std::uint32_t& n, std::vector<std::uint64_t>& exps) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return false;
  try {
    n = static_cast<std::uint32_t>(std::stoul(spec.substr(0, colon)));
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) return false;
      exps.push_back(std::stoull(item));
    }
  } catch (const std::exception&) {
    return false;
  }
  return !exps.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lacunary sets in free products of cyclic groups: construction and certification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lac_version());

  Common common;
  lac_budgets_default(&common.budgets);

  // primes
  unsigned primes_n = 8;
  auto* primes = app.add_subcommand("primes", "table of p_n, the smallest odd prime above 2^(n+1)");
  primes->add_option("n_max", primes_n, "largest n")->required();
  primes->add_flag("--json", common.json, "print JSON rows");

  // build
  lac_build_config config;
  lac_build_config_default(&config);
  std::string profile = "desk", avoidance;
  std::optional<std::uint64_t> seed;
  auto* build = app.add_subcommand("build", "construct a family E_n and write the family file");
  build->add_option("--s", config.s, "even s >= 2")->capture_default_str();
  build->add_option("--n-min", config.n_min, "first factor index (default: profile range)");
  build->add_option("--n-max", config.n_max, "last factor index (default: profile range)");
  build->add_option("--profile", profile, "size profile")->check(CLI::IsMember({"paper", "desk", "tiny"}))
      ->capture_default_str();
  build->add_option("--avoidance", avoidance, "forbidden-weight rule")->check(CLI::IsMember({"strict", "sufficient"}));
  build->add_option("--seed", seed, "random admissible choices instead of smallest-first");
  build->add_option("--threads", config.threads, "worker threads")->check(CLI::PositiveNumber);
  build->add_option("--out", common.out, "family file (default: stdout, summary on stderr)");

  // verify
  std::string kind, family_path, set_spec, strategy = "meet-in-middle";
  unsigned verify_s = 0;
  bool union_scope = false;
  auto* verify = app.add_subcommand("verify", "recompute a claim from a family file");
  verify->add_option("kind", kind, "claim to check")->required()->check(CLI::IsMember({"pn", "zs", "leinert", "qi"}));
  verify->add_option("family", family_path, "family file");
  verify->add_option("--set", set_spec, "explicit set n:e1,e2,... inside factor n instead of a family file");
  verify->add_option("--s", verify_s, "even s (default: the family's)");
  verify->add_option("--strategy", strategy, "Z_s strategy")
      ->check(CLI::IsMember({"naive", "meet-in-middle", "mitm"}))
      ->capture_default_str();
  verify->add_flag("--union", union_scope, "Leinert search over the union instead of each factor");
  add_budget_flags(verify, common);
  add_output_flags(verify, common);

  // norms
  unsigned norms_min = 1, norms_max = 8;
  std::vector<double> qs;
  auto* norms = app.add_subcommand("norms", "kernel norm and interpolation checks");
  norms->add_option("--n-min", norms_min)->capture_default_str();
  norms->add_option("--n-max", norms_max)->capture_default_str();
  norms->add_option("--q", qs, "exponents q > 1 (default 3 4 6 10 2n)");
  add_budget_flags(norms, common);
  add_output_flags(norms, common);

  // report
  std::string report_path;
  auto* report = app.add_subcommand("report", "full desk-scale report for a family file");
  report->add_option("family", report_path, "family file")->required();
  add_budget_flags(report, common);
  add_output_flags(report, common);

  // witness-weak-sidon
  std::vector<std::string> constants{"1", "2", "4"};
  auto* weak = app.add_subcommand("witness-weak-sidon", "least n with n^2 > 40 C^2 n");
  weak->add_option("--C", constants, "constants C >= 0 (decimal or a/b)")->capture_default_str();
  add_output_flags(weak, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Owned cert, text;

  if (*primes) {
    Owned rows;
    const lac_status s = lac_primes_json(primes_n, &rows.p);
    if (s != LAC_OK) return report_error(s);
    if (common.json) {
      std::cout << rows.str() << '\n';
      return 0;
    }
    std::cout << "n\t2^(n+1)\tp_n\n";
    for (const auto& r : nlohmann::json::parse(rows.str())) {
      std::cout << r.at("n") << '\t' << r.at("power") << '\t' << r.at("p") << '\n';
    }
    return 0;
  }

  if (*build) {
    config.profile = profile.c_str();
    config.avoidance = avoidance.empty() ? nullptr : avoidance.c_str();
    if (seed) {
      config.has_seed = 1;
      config.seed = *seed;
    }
    if ((config.n_min == 0) != (config.n_max == 0)) {
      std::cerr << "lacunary: give both --n-min and --n-max or neither\n";
      return 1;
    }
    FamilyHandle fam;
    const lac_status s = lac_family_build(&config, &fam.f, &text.p);
    if (s != LAC_OK && s != LAC_CLAIM_VIOLATED) return report_error(s);
    if (common.out.empty()) {
      Owned file;
      const lac_status w = lac_family_serialize(fam.f, &file.p);
      if (w != LAC_OK) return report_error(w);
      std::cout << file.str();
      std::cerr << text.str();
    } else {
      const lac_status w = lac_family_save(fam.f, common.out.c_str());
      if (w != LAC_OK) return report_error(w);
      std::cout << text.str();
    }
    return exit_code(s);
  }

  if (*verify) {
    FamilyHandle fam;
    if (!set_spec.empty()) {
      std::uint32_t n = 0;
      std::vector<std::uint64_t> exps;
      if (!parse_set(set_spec, n, exps)) {
        std::cerr << "lacunary: --set expects n:e1,e2,...\n";
        return 1;
      }
      const lac_status s = lac_family_from_set(verify_s == 0 ? 2 : verify_s, n, exps.data(), exps.size(), &fam.f);
      if (s != LAC_OK) return report_error(s);
    } else if (!family_path.empty()) {
      const lac_status s = lac_family_load(family_path.c_str(), &fam.f);
      if (s != LAC_OK) return report_error(s);
    } else {
      std::cerr << "lacunary: verify needs a family file or --set\n";
      return 1;
    }
    lac_status s = LAC_INTERNAL;
    if (kind == "pn") {
      s = lac_verify_pn(fam.f, &common.budgets, &cert.p, &text.p);
    } else if (kind == "zs") {
      s = lac_verify_zs(fam.f, verify_s, strategy.c_str(), &common.budgets, &cert.p, &text.p);
    } else if (kind == "leinert") {
      s = lac_verify_leinert(fam.f, verify_s, union_scope ? 1 : 0, &common.budgets, &cert.p, &text.p);
    } else {
      s = lac_verify_qi(fam.f, &common.budgets, &cert.p, &text.p);
    }
    return emit(s, common, cert, text);
  }

  if (*norms) {
    const lac_status s = lac_norms(norms_min, norms_max, qs.data(), qs.size(), &common.budgets, &cert.p, &text.p);
    return emit(s, common, cert, text);
  }

  if (*report) {
    FamilyHandle fam;
    const lac_status l = lac_family_load(report_path.c_str(), &fam.f);
    if (l != LAC_OK) return report_error(l);
    const lac_status s = lac_report(fam.f, &common.budgets, &cert.p, &text.p);
    return emit(s, common, cert, text);
  }

  if (*weak) {
    std::vector<const char*> cs;
    for (const auto& c : constants) cs.push_back(c.c_str());
    const lac_status s = lac_weak_sidon_witness(cs.data(), cs.size(), &cert.p, &text.p);
    return emit(s, common, cert, text);
  }
  return 1;
}
