#include "lacunary/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "lacunary/errors.hpp"

namespace lacunary::commands {
namespace {

CertificateFile make_file(CertificateKind kind, Json payload, Json parameters,
                          std::optional<std::uint64_t> seed = std::nullopt) {
  CertificateFile f;
  f.kind = kind;
  f.payload = std::move(payload);
  f.provenance.parameters = std::move(parameters);
  f.provenance.seed = seed;
  f.provenance.timestamp = reproducible_timestamp();
  return f;
}

Json family_parameters(const LacunaryFamily& family) {
  return {{"s", family.s},
          {"n_min", family.n_min},
          {"n_max", family.n_max},
          {"profile", family.profile.name},
          {"avoidance", to_string(family.profile.avoidance)}};
}

std::string join_eps(const std::vector<int>& eps) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < eps.size(); ++i) os << (i ? "," : "") << eps[i];
  os << ')';
  return os.str();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::violated || b == Verdict::violated) return Verdict::violated;
  if (a == Verdict::refused || b == Verdict::refused) return Verdict::refused;
  return Verdict::verified;
}

const char* status_name(Verdict v) {
  switch (v) {
    case Verdict::verified:
      return "verified";
    case Verdict::violated:
      return "violated";
    case Verdict::refused:
      return "unverified";
  }
  return "unverified";
}

bool uses_pool(const LacunaryFamily& family) { return family.profile.name != "explicit"; }

}  // namespace

Json budgets_to_json(const Budgets& b) {
  return {{"tuples", b.tuples},
          {"subsets", b.subsets},
          {"spectral", b.spectral},
          {"epsilons", b.epsilons},
          {"leinert_nodes", b.leinert_nodes},
          {"threads", b.threads},
          {"tolerance", format_double(b.tolerance)}};
}

std::vector<PrimeRow> primes(unsigned n_max) {
  std::vector<PrimeRow> rows;
  for (unsigned n = 1; n <= n_max; ++n) {
    rows.push_back({n, std::uint64_t{1} << (n + 1), smallest_admissible_prime(n)});
  }
  return rows;
}

std::uint64_t kernel_prime(unsigned n) {
  for (unsigned k = 1; k <= kMaxFactorIndex; ++k) {
    const std::uint64_t p = smallest_admissible_prime(k);
    if (p > 4 * static_cast<std::uint64_t>(n)) return p;
  }
  throw OverflowError("no table prime exceeds 4n");
}

Outcome build(const BuildConfig& config) {
  Profile profile = named_profile(config.profile, config.s);
  if (!config.avoidance.empty()) profile.avoidance = parse_avoidance(config.avoidance);
  const LacunaryFamily family = build_family(config.s, config.n_min, config.n_max, profile, config.seed, config.threads);

  Outcome out;
  out.certificate = family_file(family);
  std::ostringstream text;
  text << "family s=" << family.s << " profile=" << profile.name << " avoidance=" << to_string(profile.avoidance)
       << " n=[" << family.n_min << "," << family.n_max << "]\n";
  for (const auto& f : family.factors) {
    const auto& c = f.certificate;
    text << "  n=" << c.n << " p=" << c.p << " target=" << c.target << " achieved=" << c.achieved
         << (f.feasible ? "" : "  INFEASIBLE") << '\n';
    if (!f.feasible) out.verdict = Verdict::violated;
  }
  text << "n_feasible=" << (family.n_feasible ? std::to_string(*family.n_feasible) : "none") << '\n';
  out.text = text.str();
  return out;
}

LacunaryFamily explicit_family(unsigned s, unsigned n, std::vector<Residue> exponents) {
  if (s == 0) throw UsageError("s must be >= 1");
  LacunaryFamily family;
  family.s = s % 2 == 0 ? s : s + 1;
  family.n_min = n;
  family.n_max = n;
  family.table = std::make_shared<const FactorTable>(FactorTable::standard(n));
  family.profile = {"explicit", {SizeRule::Kind::constant, exponents.size()}, AvoidanceRule::strict};
  FactorBuild b;
  b.set = FactorSubset(n, family.table->order(n), exponents);
  b.certificate.n = n;
  b.certificate.p = b.set.order();
  b.certificate.s = family.s;
  b.certificate.chosen = b.set.exponents();
  b.certificate.pool_bound = b.set.order() - 1;
  b.certificate.target = b.set.size();
  b.certificate.achieved = b.set.size();
  b.certificate.avoidance = "explicit";
  b.feasible = true;
  family.factors.push_back(std::move(b));
  family.n_feasible = n;
  return family;
}

Outcome verify_pn(const LacunaryFamily& family, const Budgets& budgets) {
  Outcome out;
  Json rows = Json::array();
  std::ostringstream text;
  text << "verify pn (s=" << family.s << ", weight <= " << 2 * family.s << ")\n";
  for (const auto& f : family.factors) {
    const auto& set = f.set;
    const unsigned n = set.factor();
    bool in_pool = true;
    if (uses_pool(family) && !set.empty() && set.exponents().back() > pool_bound(n)) in_pool = false;
    const PNVerdict v = verify_pn_bruteforce(set, family.s, budgets.epsilons, budgets.threads);
    const bool holds = v.holds && in_pool;
    rows.push_back({{"n", n},
                    {"p", set.order()},
                    {"exponents", set.exponents()},
                    {"in_pool", in_pool},
                    {"holds", holds},
                    {"witness", v.witness ? Json(*v.witness) : Json(nullptr)},
                    {"examined", v.examined}});
    text << "  n=" << n << " |E|=" << set.size() << ' ';
    if (holds) {
      text << "holds (" << v.examined << " eps vectors)\n";
    } else {
      out.verdict = Verdict::violated;
      if (!in_pool) text << "exponent outside pool [1," << pool_bound(n) << "] ";
      if (v.witness) text << "VIOLATED eps=" << join_eps(*v.witness);
      text << '\n';
    }
  }
  out.certificate = make_file(CertificateKind::pn,
                              {{"s", family.s}, {"factors", std::move(rows)}, {"holds", out.verdict == Verdict::verified}},
                              {{"family", family_parameters(family)}, {"budgets", budgets_to_json(budgets)}},
                              family.seed);
  out.text = text.str();
  return out;
}

Outcome verify_zs(const LacunaryFamily& family, unsigned s, ZsStrategy strategy, const Budgets& budgets) {
  if (s == 0) s = family.s;
  const auto elements = family.union_words();
  const ZsCertificate cert = z_value(elements, s, budgets.tuples, strategy, budgets.threads);
  const auto [half_sq, fact] = zs_targets(s);
  const bool holds = cert.value <= half_sq;
  Outcome out;
  out.verdict = holds ? Verdict::verified : Verdict::violated;
  out.certificate = make_file(CertificateKind::zs,
                              {{"certificate", to_json(cert)},
                               {"target_half_squared", half_sq},
                               {"target_factorial", fact},
                               {"holds", holds},
                               {"table", table_to_json(*family.table)},
                               {"table_rule", family.table->rule()}},
                              {{"family", family_parameters(family)},
                               {"s", s},
                               {"strategy", to_string(strategy)},
                               {"budgets", budgets_to_json(budgets)}},
                              family.seed);
  std::ostringstream text;
  text << "verify zs: Z_" << s << " over " << cert.ground_size << " elements = " << cert.value
       << (holds ? " <= " : " > ") << half_sq << " = ((s/2)!)^2  (s! = " << fact << ", strategy " << cert.strategy
       << ", " << cert.tuples_examined << " tuples)\n";
  if (cert.value > 0) text << "  witness x = " << to_string(cert.witness) << '\n';
  out.text = text.str();
  return out;
}

Outcome verify_leinert(const LacunaryFamily& family, unsigned s, bool union_scope, const Budgets& budgets) {
  if (s == 0) s = family.s;
  Outcome out;
  Json searches = Json::array();
  std::ostringstream text;
  text << "verify leinert (tuple length " << 2 * s << ", scope " << (union_scope ? "union" : "factor") << ")\n";
  auto run = [&](const std::vector<Word>& elements, Json label) {
    const LeinertSearch search = leinert_violation(elements, s, budgets.leinert_nodes);
    if (search.witness && !validate_leinert_witness(*search.witness)) {
      throw std::logic_error("Leinert witness failed re-validation");
    }
    searches.push_back({{"scope", label}, {"search", to_json(search)}});
    text << "  " << (label.is_string() ? label.get<std::string>() : "n=" + label.dump()) << ": "
         << to_string(search.outcome);
    if (search.witness) {
      out.verdict = Verdict::violated;
      text << " (";
      for (std::size_t i = 0; i < search.witness->tuple.size(); ++i) {
        text << (i ? ", " : "") << to_string(search.witness->tuple[i]);
      }
      text << ')';
    } else if (search.outcome == LeinertSearch::Outcome::none_truncated) {
      out.verdict = combine(out.verdict, Verdict::refused);
    }
    text << "  [" << search.nodes << " nodes]\n";
  };
  if (union_scope) {
    run(family.union_words(), "union");
  } else {
    for (const auto& f : family.factors) run(f.set.words(family.table), f.set.factor());
  }
  out.certificate = make_file(CertificateKind::leinert,
                              {{"s", s},
                               {"scope", union_scope ? "union" : "factor"},
                               {"searches", std::move(searches)},
                               {"holds", out.verdict == Verdict::verified},
                               {"table", table_to_json(*family.table)},
                               {"table_rule", family.table->rule()}},
                              {{"family", family_parameters(family)}, {"s", s}, {"budgets", budgets_to_json(budgets)}},
                              family.seed);
  out.text = text.str();
  return out;
}

Outcome verify_qi(const LacunaryFamily& family, const Budgets& budgets) {
  Outcome out;
  Json rows = Json::array();
  std::ostringstream text;
  text << "verify qi (greedy maximal quasi-independent extraction)\n";
  for (const auto& f : family.factors) {
    if (f.set.empty()) continue;
    const QIWitness w = extract_quasi_independent(f.set, budgets.subsets);
    const unsigned required = ceil_log3(f.set.size());
    bool maximal_verified = false;
    if (!w.truncated) {
      maximal_verified = true;
      for (Residue x : f.set.exponents()) {
        if (w.extracted.contains(x)) continue;
        auto extended = w.extracted.exponents();
        extended.push_back(x);
        if (is_quasi_independent(FactorSubset(f.set.factor(), f.set.order(), extended), budgets.subsets + 1)
                .independent) {
          maximal_verified = false;
        }
      }
    }
    const bool holds = !w.truncated && maximal_verified && w.extracted.size() >= required;
    if (w.truncated) {
      out.verdict = combine(out.verdict, Verdict::refused);
    } else if (!holds) {
      out.verdict = Verdict::violated;
    }
    rows.push_back({{"n", f.set.factor()},
                    {"witness", to_json(w)},
                    {"size", w.extracted.size()},
                    {"required", required},
                    {"maximal_verified", maximal_verified},
                    {"holds", holds}});
    text << "  n=" << f.set.factor() << " N=" << f.set.size() << " |F|=" << w.extracted.size()
         << " ceil(log3 N)=" << required << (w.truncated ? " TRUNCATED" : holds ? " ok" : " FAILED") << '\n';
  }
  out.certificate = make_file(CertificateKind::qi,
                              {{"entries", std::move(rows)}, {"holds", out.verdict == Verdict::verified}},
                              {{"family", family_parameters(family)}, {"budgets", budgets_to_json(budgets)}},
                              family.seed);
  out.text = text.str();
  return out;
}

Outcome norms(unsigned n_min, unsigned n_max, const std::vector<double>& qs, const Budgets& budgets) {
  Outcome out;
  Json kernels = Json::array();
  std::ostringstream text;
  text << "kernel norms (||K||_A = 1, ||K||_VN = 2n, ||K||_q' <= ||K||_A^(1/q') ||K||_VN^(1/q) <= (4n+1)^(1/q))\n";
  for (unsigned n = n_min; n <= n_max; ++n) {
    const std::uint64_t p = kernel_prime(n);
    const std::vector<double> grid = qs.empty() ? default_q_grid(n) : qs;
    const SpectrumReport spectrum = transform(fejer_kernel(n, p), grid, budgets.spectral);
    bool half_on_window = true;
    for (std::int64_t j = 1; j <= static_cast<std::int64_t>(n); ++j) {
      const Rational c = fejer_coefficient(n, j);
      if (2 * c.num < c.den) half_on_window = false;
    }
    const bool a_ok = std::abs(spectrum.norm_a - 1.0) <= budgets.tolerance;
    const bool vn_ok = std::abs(spectrum.norm_vn - 2.0 * n) <= budgets.tolerance;
    Json checks = Json::array();
    bool all = a_ok && vn_ok && half_on_window;
    for (double q : grid) {
      const KernelNormCheck c = kernel_norm_check(n, p, q, budgets.tolerance);
      all = all && c.holds();
      checks.push_back(to_json(c));
      text << "  n=" << n << " p=" << p << " q=" << fmt(q) << ": " << fmt(c.norm_dual, 10)
           << " <= " << fmt(c.interpolated, 10) << " <= " << fmt(c.ceiling, 10) << (c.holds() ? "  ok" : "  FAILED")
           << '\n';
    }
    text << "  n=" << n << " ||K||_A=" << format_double(spectrum.norm_a) << " ||K||_VN="
         << format_double(spectrum.norm_vn) << (half_on_window ? " K>=1/2 on [1,n]" : " K<1/2 somewhere on [1,n]")
         << '\n';
    if (!all) out.verdict = Verdict::violated;
    kernels.push_back({{"n", n},
                       {"p", p},
                       {"spectrum", to_json(spectrum)},
                       {"norm_a_ok", a_ok},
                       {"norm_vn_ok", vn_ok},
                       {"half_on_window", half_on_window},
                       {"checks", std::move(checks)}});
  }
  Json q_param = Json::array();
  for (double q : qs) q_param.push_back(format_double(q));
  out.certificate = make_file(CertificateKind::spectrum,
                              {{"kernels", std::move(kernels)}, {"holds", out.verdict == Verdict::verified}},
                              {{"n_min", n_min}, {"n_max", n_max}, {"q", q_param}, {"budgets", budgets_to_json(budgets)}});
  out.text = text.str();
  return out;
}

Outcome weak_sidon(const std::vector<Rational>& constants) {
  Outcome out;
  Json rows = Json::array();
  std::ostringstream text;
  text << "weak-Sidon witness: least n with n^2 > 40 C^2 n (p = 2n substitution)\n";
  Json params = Json::array();
  for (const auto& c : constants) {
    const WeakSidonWitness w = weak_sidon_witness(c);
    if (!w.holds) out.verdict = Verdict::violated;
    rows.push_back(to_json(w));
    params.push_back(to_string(c));
    text << "  C=" << to_string(c) << " n=" << w.n << "  n^2=" << w.lhs << " > 40C^2n=" << w.rhs
         << (w.holds ? "" : "  FAILED") << '\n';
  }
  out.certificate = make_file(CertificateKind::report, {{"weak_sidon", std::move(rows)}}, {{"constants", params}});
  out.text = text.str();
  return out;
}

Outcome report(const LacunaryFamily& family, const Budgets& budgets) {
  Outcome out;
  std::ostringstream text;
  Json sections = Json::object();
  const bool empty = family.factors.empty();
  const auto& s = family.s;
  auto unverified = [](const std::string& reason) { return Json{{"status", "unverified"}, {"reason", reason}}; };
  Verdict overall = Verdict::verified;
  auto note = [&](Verdict v) { overall = combine(overall, v); };

  text << "Lacunary family report: s=" << s << ", profile=" << family.profile.name << ", n in [" << family.n_min
       << ", " << family.n_max << "], " << family.element_count() << " elements, n_feasible="
       << (family.n_feasible ? std::to_string(*family.n_feasible) : "none") << "\n\n";

  // Construction and (P).
  if (empty) {
    sections["construction"] = unverified("family has no factors");
    note(Verdict::refused);
  } else {
    try {
      const Outcome pn = verify_pn(family, budgets);
      Json rows = Json::array();
      text << "[construction] (P) with weight <= " << 2 * s << '\n';
      const auto& pn_rows = pn.certificate.payload.at("factors");
      for (std::size_t i = 0; i < family.factors.size(); ++i) {
        const auto& f = family.factors[i];
        const bool holds = pn_rows[i].at("holds").get<bool>();
        rows.push_back({{"n", f.set.factor()},
                        {"p", f.set.order()},
                        {"target", f.certificate.target},
                        {"achieved", f.set.size()},
                        {"feasible", f.feasible},
                        {"pn_holds", holds}});
        text << "  n=" << std::setw(2) << f.set.factor() << "  p=" << std::setw(7) << f.set.order()
             << "  |E_n|=" << std::setw(3) << f.set.size() << " / " << f.certificate.target
             << (f.feasible ? "" : " (infeasible)") << "  (P) " << (holds ? "verified" : "VIOLATED") << '\n';
      }
      sections["construction"] = {{"status", status_name(pn.verdict)}, {"rows", std::move(rows)}};
      note(pn.verdict);
    } catch (const BudgetExceeded& e) {
      sections["construction"] = unverified(e.what());
      note(Verdict::refused);
    }
  }

  // Z_s.
  if (empty) {
    sections["zs"] = unverified("family has no factors");
  } else {
    try {
      const Outcome zs = verify_zs(family, s, ZsStrategy::meet_in_middle, budgets);
      const auto& p = zs.certificate.payload;
      const auto value = p.at("certificate").at("value").get<std::uint64_t>();
      sections["zs"] = {{"status", status_name(zs.verdict)},
                        {"value", value},
                        {"ground_size", p.at("certificate").at("ground_size")},
                        {"target_half_squared", p.at("target_half_squared")},
                        {"target_factorial", p.at("target_factorial")},
                        {"consequence", "Z(s) property implies completely bounded Lambda(2s)"},
                        {"consequence_status", "asserted-by-theory"}};
      text << "\n[zs] Z_" << s << "(union) = " << value << "  vs ((s/2)!)^2 = " << p.at("target_half_squared")
           << ", s! = " << p.at("target_factorial") << "  -> " << status_name(zs.verdict) << '\n'
           << "     Z(s) => completely bounded Lambda(2s): asserted-by-theory\n";
      note(zs.verdict);
    } catch (const BudgetExceeded& e) {
      sections["zs"] = unverified(e.what());
      note(Verdict::refused);
    }
  }

  // Leinert condition inside each factor.
  if (empty) {
    sections["leinert_within_factors"] = unverified("family has no factors");
  } else {
    // Length-4 relations are excluded by (P) for every s >= 2; longer ones need not be.
    const Outcome le = verify_leinert(family, 2, false, budgets);
    Json rows = Json::array();
    for (const auto& r : le.certificate.payload.at("searches")) {
      rows.push_back({{"n", r.at("scope")}, {"outcome", r.at("search").at("outcome")}});
    }
    sections["leinert_within_factors"] = {{"status", status_name(le.verdict)}, {"tuple_length", 4}, {"rows", rows}};
    text << "\n[leinert] adjacent-distinct 4-tuples inside single factors: " << status_name(le.verdict)
         << (le.verdict == Verdict::violated ? " (relation found)" : " (no relation)") << '\n';
    note(le.verdict);
  }

  // Quasi-independent subsets and the Leinert-constant lower bounds.
  if (empty) {
    sections["quasi_independent"] = unverified("family has no factors");
  } else {
    try {
      const Outcome qi = verify_qi(family, budgets);
      Json rows = Json::array();
      bool nondecreasing = true;
      double previous = 0;
      text << "\n[qi] greedy maximal quasi-independent F_n, Leinert-constant lower bound ||1_F||_VN/sqrt|F|\n";
      for (const auto& e : qi.certificate.payload.at("entries")) {
        const FactorSubset extracted = factor_subset_from_json(e.at("witness").at("extracted"));
        const double bound = leinert_lower_bound(extracted);
        const SidonQICheck sc = sidon_qi_check(extracted, budgets.tolerance);
        if (bound + budgets.tolerance < previous) nondecreasing = false;
        previous = bound;
        rows.push_back({{"n", e.at("n")},
                        {"size", e.at("size")},
                        {"required", e.at("required")},
                        {"holds", e.at("holds")},
                        {"leinert_lower_bound", format_double(bound)},
                        {"sidon_slack", format_double(sc.slack)},
                        {"sidon_holds", sc.holds}});
        text << "  n=" << std::setw(2) << e.at("n") << "  |F|=" << std::setw(2) << e.at("size")
             << " >= " << e.at("required") << "  bound=" << fmt(bound) << "  6sqrt6 slack=" << fmt(sc.slack)
             << '\n';
        if (!sc.holds) note(Verdict::violated);
      }
      sections["quasi_independent"] = {
          {"status", status_name(qi.verdict)},
          {"rows", std::move(rows)},
          {"lower_bound_nondecreasing", nondecreasing},
          {"consequence", "|F_n| unbounded forces an unbounded Leinert constant: E is not Leinert, hence not an L-set"},
          {"consequence_status", "asserted-by-theory"}};
      text << "  lower bound nondecreasing across n: " << (nondecreasing ? "yes" : "no") << '\n';
      note(qi.verdict);
    } catch (const BudgetExceeded& e) {
      sections["quasi_independent"] = unverified(e.what());
      note(Verdict::refused);
    }
  }

  // Density bounds and the kernel chain.
  if (empty) {
    sections["density"] = unverified("family has no factors");
  } else {
    try {
      Json rows = Json::array();
      Json chains = Json::array();
      bool chains_hold = true;
      text << "\n[density] implied Lambda(q) lower bounds sqrt(M / (2 (4m+1)^(2/q))), window m = 2^n\n";
      for (const auto& f : family.factors) {
        if (f.set.empty()) continue;
        const unsigned n = f.set.factor();
        const std::uint64_t window = pool_bound(n);
        const std::uint64_t chain_window = std::min<std::uint64_t>(window, (f.set.order() - 1) / 4);
        text << "  n=" << std::setw(2) << n;
        for (double q : default_q_grid(n)) {
          const double bound = density_lower_bound(f.set, window, q);
          rows.push_back({{"n", n}, {"window", window}, {"q", format_double(q)}, {"bound", format_double(bound)}});
          text << "  q=" << fmt(q) << ":" << fmt(bound, 4);
          const KernelChain chain = kernel_chain(f.set, chain_window, q, budgets.tolerance);
          chains_hold = chains_hold && chain.holds();
          Json cj = to_json(chain);
          cj["n"] = n;
          chains.push_back(std::move(cj));
        }
        text << '\n';
      }
      const Verdict v = chains_hold ? Verdict::verified : Verdict::violated;
      sections["density"] = {{"status", status_name(v)}, {"rows", std::move(rows)}, {"chains", std::move(chains)}};
      text << "  kernel chain M/2 <= <K,1_E> <= ||K||_q' ||1_E||_q <= (4m+1)^(1/q) ||1_E||_q: " << status_name(v)
           << '\n';
      note(v);
    } catch (const BudgetExceeded& e) {
      sections["density"] = unverified(e.what());
      note(Verdict::refused);
    }
  }

  // Weak-Sidon contradiction table.
  if (empty) {
    sections["weak_sidon"] = unverified("family has no factors");
  } else {
    const Outcome ws = weak_sidon({{1, 1}, {2, 1}, {4, 1}});
    sections["weak_sidon"] = {{"status", status_name(ws.verdict)},
                              {"rows", ws.certificate.payload.at("weak_sidon")},
                              {"consequence", "n^2 = |E_n| exceeds 10 C^2 p 2^(2n/p) at p = 2n: E is not weak Sidon"},
                              {"consequence_status", "asserted-by-theory"}};
    text << '\n' << "[weak-sidon]\n";
    std::istringstream lines(ws.text);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) text << line << '\n';
    note(ws.verdict);
  }

  if (empty) {
    overall = Verdict::refused;
    text << "family is empty: all sections unverified\n";
  }
  out.verdict = overall;
  out.certificate = make_file(CertificateKind::report,
                              {{"family",
                                {{"s", s},
                                 {"profile", family.profile.name},
                                 {"n_min", family.n_min},
                                 {"n_max", family.n_max},
                                 {"elements", family.element_count()},
                                 {"n_feasible", family.n_feasible ? Json(*family.n_feasible) : Json(nullptr)}}},
                               {"sections", std::move(sections)},
                               {"status", status_name(overall)}},
                              {{"family", family_parameters(family)}, {"budgets", budgets_to_json(budgets)}},
                              family.seed);
  out.text = text.str();
  return out;
}

}  // namespace lacunary::commands
