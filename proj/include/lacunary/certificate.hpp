#pragma once

// Versioned JSON certificate files. Keys are sorted, floating-point values
// are 17-significant-digit decimal strings, and output ends with a newline,
// so serialize(parse(serialize(x))) is byte-stable.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lacunary/builder.hpp"
#include "lacunary/combinatorics.hpp"
#include "lacunary/spectral.hpp"

namespace lacunary {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolName = "lacunary";
inline constexpr const char* kToolVersion = "1.0.0";

enum class CertificateKind { family, pn, zs, leinert, qi, spectrum, report };

std::string to_string(CertificateKind kind);
CertificateKind parse_kind(const std::string& name);

struct Provenance {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  Json parameters = Json::object();
  std::optional<std::uint64_t> seed;
  std::string timestamp;

  bool operator==(const Provenance&) const = default;
};

// ISO-8601 UTC time from SOURCE_DATE_EPOCH, or the epoch when unset.
std::string reproducible_timestamp();

struct CertificateFile {
  int format_version = kFormatVersion;
  CertificateKind kind = CertificateKind::report;
  Json payload = Json::object();
  Provenance provenance;

  bool operator==(const CertificateFile&) const = default;
};

std::string serialize(const CertificateFile& file);
// Throws FormatError on malformed input or a format_version mismatch.
CertificateFile parse_certificate(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string format_double(double v);
double parse_double(const Json& j);

Json word_to_json(const Word& w);
Word word_from_json(const Json& j, const TablePtr& table);
Json table_to_json(const FactorTable& table);
TablePtr table_from_json(const Json& entries, const std::string& rule);

Json to_json(const PNCertificate& c);
PNCertificate pn_certificate_from_json(const Json& j);

Json to_json(const LacunaryFamily& f);
LacunaryFamily family_from_json(const Json& payload);

Json to_json(const ZsCertificate& c);
ZsCertificate zs_certificate_from_json(const Json& j, const TablePtr& table);

Json to_json(const LeinertSearch& s);
LeinertSearch leinert_search_from_json(const Json& j, const TablePtr& table);

Json to_json(const FactorSubset& s);
FactorSubset factor_subset_from_json(const Json& j);

Json to_json(const QIWitness& w);
QIWitness qi_witness_from_json(const Json& j);

Json to_json(const SpectrumReport& r);
SpectrumReport spectrum_report_from_json(const Json& j);

Json to_json(const KernelNormCheck& c);
KernelNormCheck kernel_norm_check_from_json(const Json& j);

Json to_json(const KernelChain& c);
KernelChain kernel_chain_from_json(const Json& j);

Json to_json(const WeakSidonWitness& w);
WeakSidonWitness weak_sidon_witness_from_json(const Json& j);

// Family persistence.
CertificateFile family_file(const LacunaryFamily& family);
LacunaryFamily load_family(const std::filesystem::path& path);
LacunaryFamily family_from_certificate(const CertificateFile& file);

}  // namespace lacunary
