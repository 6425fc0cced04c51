#include "lacunary/certificate.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "lacunary/errors.hpp"

namespace lacunary {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

std::optional<std::uint64_t> optional_u64(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<std::uint64_t>(j, key);
}

Json optional_json(const std::optional<std::uint64_t>& v) { return v ? Json(*v) : Json(nullptr); }

Json complex_to_json(const Complex& c) { return Json::array({format_double(c.real()), format_double(c.imag())}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("complex value must be [re, im]");
  return {parse_double(j[0]), parse_double(j[1])};
}

}  // namespace

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::family:
      return "family";
    case CertificateKind::pn:
      return "pn";
    case CertificateKind::zs:
      return "zs";
    case CertificateKind::leinert:
      return "leinert";
    case CertificateKind::qi:
      return "qi";
    case CertificateKind::spectrum:
      return "spectrum";
    case CertificateKind::report:
      return "report";
  }
  return "unknown";
}

CertificateKind parse_kind(const std::string& name) {
  for (auto k : {CertificateKind::family, CertificateKind::pn, CertificateKind::zs, CertificateKind::leinert,
                 CertificateKind::qi, CertificateKind::spectrum, CertificateKind::report}) {
    if (to_string(k) == name) return k;
  }
  throw FormatError("unknown certificate kind '" + name + "'");
}

std::string reproducible_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const Json& j) {
  if (!j.is_string()) throw FormatError("floating-point values must be decimal strings");
  const auto& s = j.get_ref<const std::string&>();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end == nullptr || *end != '\0') throw FormatError("bad floating-point value '" + s + "'");
  return v;
}

std::string serialize(const CertificateFile& file) {
  Json j;
  j["format_version"] = file.format_version;
  j["kind"] = to_string(file.kind);
  j["payload"] = file.payload;
  Json prov;
  prov["tool"] = file.provenance.tool;
  prov["version"] = file.provenance.version;
  prov["parameters"] = file.provenance.parameters;
  prov["seed"] = optional_json(file.provenance.seed);
  prov["timestamp"] = file.provenance.timestamp;
  j["provenance"] = std::move(prov);
  return j.dump(2) + "\n";
}

CertificateFile parse_certificate(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("certificate is not valid JSON: ") + e.what());
  }
  CertificateFile f;
  f.format_version = get<int>(j, "format_version");
  if (f.format_version != kFormatVersion) {
    throw FormatError("unsupported format_version " + std::to_string(f.format_version));
  }
  f.kind = parse_kind(get<std::string>(j, "kind"));
  f.payload = field(j, "payload");
  const Json& prov = field(j, "provenance");
  f.provenance.tool = get<std::string>(prov, "tool");
  f.provenance.version = get<std::string>(prov, "version");
  f.provenance.parameters = field(prov, "parameters");
  f.provenance.seed = optional_u64(prov, "seed");
  f.provenance.timestamp = get<std::string>(prov, "timestamp");
  return f;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

Json word_to_json(const Word& w) {
  Json out = Json::array();
  for (const auto& l : w.letters()) out.push_back(Json::array({l.factor, l.exp}));
  return out;
}

Word word_from_json(const Json& j, const TablePtr& table) {
  if (!j.is_array()) throw FormatError("word must be an array of [factor, exponent]");
  std::vector<RawLetter> raw;
  for (const auto& l : j) {
    if (!l.is_array() || l.size() != 2) throw FormatError("letter must be [factor, exponent]");
    const auto exp = l[1].get<std::uint64_t>();
    if (exp >= (std::uint64_t{1} << 63)) throw FormatError("exponent out of range");
    raw.push_back({l[0].get<unsigned>(), static_cast<std::int64_t>(exp)});
  }
  try {
    Word w = reduce(table, raw);
    if (w.letters().size() != raw.size()) throw FormatError("stored word is not reduced");
    return w;
  } catch (const UsageError& e) {
    throw FormatError(std::string("bad word: ") + e.what());
  }
}

Json table_to_json(const FactorTable& table) {
  Json out = Json::array();
  for (const auto& e : table.entries()) out.push_back({{"n", e.index}, {"p", e.order}});
  return out;
}

TablePtr table_from_json(const Json& entries, const std::string& rule) {
  if (!entries.is_array()) throw FormatError("table must be an array");
  std::vector<FactorEntry> es;
  for (const auto& e : entries) es.push_back({get<unsigned>(e, "n"), get<std::uint64_t>(e, "p")});
  try {
    return std::make_shared<const FactorTable>(std::move(es), rule);
  } catch (const UsageError& e) {
    throw FormatError(std::string("bad factor table: ") + e.what());
  }
}

Json to_json(const PNCertificate& c) {
  return {{"n", c.n},
          {"p", c.p},
          {"s", c.s},
          {"chosen", c.chosen},
          {"pool_bound", c.pool_bound},
          {"target", c.target},
          {"achieved", c.achieved},
          {"forbidden_trace", c.forbidden_trace},
          {"avoidance", c.avoidance}};
}

PNCertificate pn_certificate_from_json(const Json& j) {
  PNCertificate c;
  c.n = get<unsigned>(j, "n");
  c.p = get<std::uint64_t>(j, "p");
  c.s = get<unsigned>(j, "s");
  c.chosen = get<std::vector<Residue>>(j, "chosen");
  c.pool_bound = get<Residue>(j, "pool_bound");
  c.target = get<std::uint64_t>(j, "target");
  c.achieved = get<std::uint64_t>(j, "achieved");
  c.forbidden_trace = get<std::vector<std::uint64_t>>(j, "forbidden_trace");
  c.avoidance = get<std::string>(j, "avoidance");
  return c;
}

namespace {

Json size_rule_to_json(const SizeRule& r) {
  const char* kind = r.kind == SizeRule::Kind::square ? "square" : r.kind == SizeRule::Kind::linear ? "linear" : "constant";
  return {{"kind", kind}, {"value", r.value}};
}

SizeRule size_rule_from_json(const Json& j) {
  SizeRule r;
  const auto kind = get<std::string>(j, "kind");
  if (kind == "square") {
    r.kind = SizeRule::Kind::square;
  } else if (kind == "linear") {
    r.kind = SizeRule::Kind::linear;
  } else if (kind == "constant") {
    r.kind = SizeRule::Kind::constant;
  } else {
    throw FormatError("unknown size rule '" + kind + "'");
  }
  r.value = get<std::uint64_t>(j, "value");
  return r;
}

}  // namespace

Json to_json(const LacunaryFamily& f) {
  Json factors = Json::array();
  for (const auto& b : f.factors) {
    factors.push_back({{"n", b.set.factor()},
                       {"p", b.set.order()},
                       {"exponents", b.set.exponents()},
                       {"feasible", b.feasible},
                       {"certificate", to_json(b.certificate)}});
  }
  return {{"s", f.s},
          {"n_min", f.n_min},
          {"n_max", f.n_max},
          {"profile",
           {{"name", f.profile.name},
            {"size_rule", size_rule_to_json(f.profile.size)},
            {"pool_rule", "pow2"},
            {"avoidance", to_string(f.profile.avoidance)}}},
          {"seed", optional_json(f.seed)},
          {"table", f.table ? table_to_json(*f.table) : Json::array()},
          {"table_rule", f.table ? f.table->rule() : std::string(FactorTable::kStandardRule)},
          {"factors", std::move(factors)},
          {"n_feasible", f.n_feasible ? Json(*f.n_feasible) : Json(nullptr)}};
}

LacunaryFamily family_from_json(const Json& j) {
  LacunaryFamily f;
  f.s = get<unsigned>(j, "s");
  if (f.s < 2 || f.s % 2 != 0) throw FormatError("family s must be even and >= 2");
  f.n_min = get<unsigned>(j, "n_min");
  f.n_max = get<unsigned>(j, "n_max");
  const Json& prof = field(j, "profile");
  f.profile.name = get<std::string>(prof, "name");
  f.profile.size = size_rule_from_json(field(prof, "size_rule"));
  if (get<std::string>(prof, "pool_rule") != "pow2") throw FormatError("only the pow2 pool rule is supported");
  try {
    f.profile.avoidance = parse_avoidance(get<std::string>(prof, "avoidance"));
  } catch (const UsageError& e) {
    throw FormatError(e.what());
  }
  f.seed = optional_u64(j, "seed");
  f.table = table_from_json(field(j, "table"), get<std::string>(j, "table_rule"));
  for (const auto& fj : field(j, "factors")) {
    FactorBuild b;
    const auto n = get<unsigned>(fj, "n");
    const auto p = get<std::uint64_t>(fj, "p");
    if (!f.table->contains(n) || f.table->order(n) != p) throw FormatError("factor does not match the table");
    try {
      b.set = FactorSubset(n, p, get<std::vector<Residue>>(fj, "exponents"));
    } catch (const UsageError& e) {
      throw FormatError(std::string("bad factor set: ") + e.what());
    }
    // Cached construction records are optional; verification never reads them.
    if (fj.contains("certificate")) {
      b.certificate = pn_certificate_from_json(fj.at("certificate"));
    } else {
      b.certificate.n = n;
      b.certificate.p = p;
      b.certificate.s = f.s;
      b.certificate.chosen = b.set.exponents();
      b.certificate.pool_bound = pool_bound(n);
      b.certificate.target = f.profile.size.at(n);
      b.certificate.achieved = b.set.size();
      b.certificate.avoidance = to_string(f.profile.avoidance);
    }
    b.feasible = fj.contains("feasible") ? get<bool>(fj, "feasible") : b.set.size() >= f.profile.size.at(n);
    f.factors.push_back(std::move(b));
  }
  f.n_feasible = optional_u64(j, "n_feasible");
  return f;
}

Json to_json(const ZsCertificate& c) {
  Json samples = Json::array();
  for (const auto& s : c.samples) samples.push_back(s);
  return {{"s", c.s},
          {"ground_size", c.ground_size},
          {"value", c.value},
          {"witness", word_to_json(c.witness)},
          {"samples", std::move(samples)},
          {"strategy", c.strategy},
          {"tuples_examined", c.tuples_examined}};
}

ZsCertificate zs_certificate_from_json(const Json& j, const TablePtr& table) {
  ZsCertificate c;
  c.s = get<unsigned>(j, "s");
  c.ground_size = get<std::uint64_t>(j, "ground_size");
  c.value = get<std::uint64_t>(j, "value");
  c.witness = word_from_json(field(j, "witness"), table);
  c.samples = get<std::vector<std::vector<std::size_t>>>(j, "samples");
  c.strategy = get<std::string>(j, "strategy");
  c.tuples_examined = get<std::uint64_t>(j, "tuples_examined");
  return c;
}

Json to_json(const LeinertSearch& s) {
  Json witness(nullptr);
  if (s.witness) {
    Json tuple = Json::array();
    for (const auto& w : s.witness->tuple) tuple.push_back(word_to_json(w));
    witness = {{"s", s.witness->s}, {"indices", s.witness->indices}, {"tuple", std::move(tuple)}};
  }
  return {{"outcome", to_string(s.outcome)}, {"witness", std::move(witness)}, {"nodes", s.nodes}};
}

LeinertSearch leinert_search_from_json(const Json& j, const TablePtr& table) {
  LeinertSearch s;
  s.outcome = parse_leinert_outcome(get<std::string>(j, "outcome"));
  s.nodes = get<std::uint64_t>(j, "nodes");
  const Json& w = field(j, "witness");
  if (!w.is_null()) {
    LeinertWitness lw;
    lw.s = get<unsigned>(w, "s");
    lw.indices = get<std::vector<std::size_t>>(w, "indices");
    for (const auto& t : field(w, "tuple")) lw.tuple.push_back(word_from_json(t, table));
    s.witness = std::move(lw);
  }
  return s;
}

Json to_json(const FactorSubset& s) {
  return {{"n", s.factor()}, {"p", s.order()}, {"exponents", s.exponents()}};
}

FactorSubset factor_subset_from_json(const Json& j) {
  try {
    return FactorSubset(get<unsigned>(j, "n"), get<std::uint64_t>(j, "p"), get<std::vector<Residue>>(j, "exponents"));
  } catch (const UsageError& e) {
    throw FormatError(std::string("bad factor subset: ") + e.what());
  }
}

Json to_json(const QIWitness& w) {
  return {{"parent", to_json(w.parent)},
          {"extracted", to_json(w.extracted)},
          {"subset_sum_digest", w.subset_sum_digest},
          {"maximal", w.maximal},
          {"truncated", w.truncated}};
}

QIWitness qi_witness_from_json(const Json& j) {
  QIWitness w;
  w.parent = factor_subset_from_json(field(j, "parent"));
  w.extracted = factor_subset_from_json(field(j, "extracted"));
  w.subset_sum_digest = get<std::string>(j, "subset_sum_digest");
  w.maximal = get<bool>(j, "maximal");
  w.truncated = get<bool>(j, "truncated");
  return w;
}

Json to_json(const SpectrumReport& r) {
  Json spectrum = Json::array();
  for (const auto& v : r.spectrum) spectrum.push_back(complex_to_json(v));
  Json lq = Json::array();
  for (const auto& [q, v] : r.norm_lq) lq.push_back(Json::array({format_double(q), format_double(v)}));
  return {{"p", r.p},
          {"spectrum", std::move(spectrum)},
          {"norm_a", format_double(r.norm_a)},
          {"norm_vn", format_double(r.norm_vn)},
          {"norm_l2", format_double(r.norm_l2)},
          {"norm_lq", std::move(lq)}};
}

SpectrumReport spectrum_report_from_json(const Json& j) {
  SpectrumReport r;
  r.p = get<std::uint64_t>(j, "p");
  for (const auto& v : field(j, "spectrum")) r.spectrum.push_back(complex_from_json(v));
  r.norm_a = parse_double(field(j, "norm_a"));
  r.norm_vn = parse_double(field(j, "norm_vn"));
  r.norm_l2 = parse_double(field(j, "norm_l2"));
  for (const auto& v : field(j, "norm_lq")) {
    if (!v.is_array() || v.size() != 2) throw FormatError("norm_lq entries must be [q, value]");
    r.norm_lq.emplace_back(parse_double(v[0]), parse_double(v[1]));
  }
  return r;
}

Json to_json(const KernelNormCheck& c) {
  return {{"n", c.n},
          {"p", c.p},
          {"q", format_double(c.q)},
          {"q_dual", format_double(c.q_dual)},
          {"norm_a", format_double(c.norm_a)},
          {"norm_vn", format_double(c.norm_vn)},
          {"norm_dual", format_double(c.norm_dual)},
          {"interpolated", format_double(c.interpolated)},
          {"ceiling", format_double(c.ceiling)},
          {"interpolation_holds", c.interpolation_holds},
          {"ceiling_holds", c.ceiling_holds}};
}

KernelNormCheck kernel_norm_check_from_json(const Json& j) {
  KernelNormCheck c;
  c.n = get<unsigned>(j, "n");
  c.p = get<std::uint64_t>(j, "p");
  c.q = parse_double(field(j, "q"));
  c.q_dual = parse_double(field(j, "q_dual"));
  c.norm_a = parse_double(field(j, "norm_a"));
  c.norm_vn = parse_double(field(j, "norm_vn"));
  c.norm_dual = parse_double(field(j, "norm_dual"));
  c.interpolated = parse_double(field(j, "interpolated"));
  c.ceiling = parse_double(field(j, "ceiling"));
  c.interpolation_holds = get<bool>(j, "interpolation_holds");
  c.ceiling_holds = get<bool>(j, "ceiling_holds");
  return c;
}

Json to_json(const KernelChain& c) {
  return {{"window", c.window},
          {"q", format_double(c.q)},
          {"m", c.m},
          {"half_m", format_double(c.half_m)},
          {"pairing", format_double(c.pairing)},
          {"holder_rhs", format_double(c.holder_rhs)},
          {"ceiling_rhs", format_double(c.ceiling_rhs)},
          {"lower_link", c.lower_link},
          {"holder_link", c.holder_link},
          {"ceiling_link", c.ceiling_link}};
}

KernelChain kernel_chain_from_json(const Json& j) {
  KernelChain c;
  c.window = get<std::uint64_t>(j, "window");
  c.q = parse_double(field(j, "q"));
  c.m = get<std::uint64_t>(j, "m");
  c.half_m = parse_double(field(j, "half_m"));
  c.pairing = parse_double(field(j, "pairing"));
  c.holder_rhs = parse_double(field(j, "holder_rhs"));
  c.ceiling_rhs = parse_double(field(j, "ceiling_rhs"));
  c.lower_link = get<bool>(j, "lower_link");
  c.holder_link = get<bool>(j, "holder_link");
  c.ceiling_link = get<bool>(j, "ceiling_link");
  return c;
}

Json to_json(const WeakSidonWitness& w) {
  return {{"c", to_string(w.c)}, {"n", w.n}, {"lhs", w.lhs}, {"rhs", w.rhs}, {"holds", w.holds}};
}

WeakSidonWitness weak_sidon_witness_from_json(const Json& j) {
  WeakSidonWitness w;
  try {
    w.c = parse_rational(get<std::string>(j, "c"));
  } catch (const UsageError& e) {
    throw FormatError(e.what());
  }
  w.n = get<std::uint64_t>(j, "n");
  w.lhs = get<std::string>(j, "lhs");
  w.rhs = get<std::string>(j, "rhs");
  w.holds = get<bool>(j, "holds");
  return w;
}

CertificateFile family_file(const LacunaryFamily& family) {
  CertificateFile f;
  f.kind = CertificateKind::family;
  f.payload = to_json(family);
  f.provenance.seed = family.seed;
  f.provenance.timestamp = reproducible_timestamp();
  f.provenance.parameters = {{"s", family.s},
                             {"n_min", family.n_min},
                             {"n_max", family.n_max},
                             {"profile", family.profile.name},
                             {"avoidance", to_string(family.profile.avoidance)}};
  return f;
}

LacunaryFamily family_from_certificate(const CertificateFile& file) {
  if (file.kind != CertificateKind::family) throw FormatError("expected a family file, got kind " + to_string(file.kind));
  return family_from_json(file.payload);
}

LacunaryFamily load_family(const std::filesystem::path& path) {
  return family_from_certificate(parse_certificate(read_text_file(path)));
}

}  // namespace lacunary
