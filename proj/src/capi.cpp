#include "lacunary/lacunary.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "lacunary/commands.hpp"
#include "lacunary/errors.hpp"

struct lac_family {
  lacunary::LacunaryFamily family;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
lac_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const lacunary::BudgetExceeded& e) {
    last_error = e.what();
    return LAC_BUDGET_REFUSED;
  } catch (const lacunary::FormatError& e) {
    last_error = e.what();
    return LAC_FORMAT_ERROR;
  } catch (const lacunary::OverflowError& e) {
    last_error = e.what();
    return LAC_OVERFLOW;
  } catch (const lacunary::IoError& e) {
    last_error = e.what();
    return LAC_IO_ERROR;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return LAC_IO_ERROR;
  } catch (const std::ios_base::failure& e) {
    last_error = e.what();
    return LAC_IO_ERROR;
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return LAC_INVALID_ARGUMENT;
  } catch (const std::out_of_range& e) {
    last_error = e.what();
    return LAC_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LAC_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return LAC_INTERNAL;
  }
}

lac_status fail(lac_status status, const char* message) {
  last_error = message;
  return status;
}

lacunary::commands::Budgets to_budgets(const lac_budgets* b) {
  lacunary::commands::Budgets out;
  if (!b) return out;
  if (b->tuples == 0 || b->subsets == 0 || b->spectral == 0 || b->epsilons == 0 || b->leinert_nodes == 0) {
    throw lacunary::UsageError("budgets must be positive");
  }
  if (!(b->tolerance >= 0)) throw lacunary::UsageError("tolerance must be non-negative");
  out.tuples = b->tuples;
  out.subsets = b->subsets;
  out.spectral = b->spectral;
  out.epsilons = b->epsilons;
  out.leinert_nodes = b->leinert_nodes;
  out.threads = b->threads == 0 ? 1 : b->threads;
  out.tolerance = b->tolerance;
  return out;
}

lac_status finish(const lacunary::commands::Outcome& o, char** cert_out, char** text_out) {
  if (cert_out) *cert_out = dup(lacunary::serialize(o.certificate));
  if (text_out) *text_out = dup(o.text);
  return static_cast<lac_status>(static_cast<int>(o.verdict));
}

}  // namespace

extern "C" {

const char* lac_last_error(void) { return last_error.c_str(); }

const char* lac_version(void) { return lacunary::kToolVersion; }

void lac_string_free(char* s) { std::free(s); }

lac_status lac_smallest_admissible_prime(uint32_t n, uint64_t* out) {
  if (!out) return fail(LAC_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = lacunary::smallest_admissible_prime(n);
    return LAC_OK;
  });
}

lac_status lac_primes_json(uint32_t n_max, char** json_out) {
  if (!json_out) return fail(LAC_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    lacunary::Json rows = lacunary::Json::array();
    for (const auto& r : lacunary::commands::primes(n_max)) rows.push_back({{"n", r.n}, {"power", r.power}, {"p", r.p}});
    *json_out = dup(rows.dump());
    return LAC_OK;
  });
}

void lac_build_config_default(lac_build_config* config) {
  if (!config) return;
  *config = lac_build_config{};
  config->s = 2;
  config->profile = "desk";
  config->threads = 1;
}

void lac_budgets_default(lac_budgets* budgets) {
  if (!budgets) return;
  const lacunary::commands::Budgets d;
  budgets->tuples = d.tuples;
  budgets->subsets = d.subsets;
  budgets->spectral = d.spectral;
  budgets->epsilons = d.epsilons;
  budgets->leinert_nodes = d.leinert_nodes;
  budgets->threads = d.threads;
  budgets->tolerance = d.tolerance;
}

lac_status lac_family_build(const lac_build_config* config, lac_family** out, char** text_out) {
  if (!config || !out) return fail(LAC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    lacunary::commands::BuildConfig c;
    c.s = config->s;
    c.profile = config->profile ? config->profile : "desk";
    if (c.s < 2 || c.s % 2 != 0) throw lacunary::UsageError("s must be even and >= 2");
    if (config->n_min == 0 && config->n_max == 0) {
      std::tie(c.n_min, c.n_max) = lacunary::default_range(c.profile, c.s);
    } else {
      c.n_min = config->n_min;
      c.n_max = config->n_max;
    }
    if (config->avoidance) c.avoidance = config->avoidance;
    if (config->has_seed) c.seed = config->seed;
    c.threads = config->threads == 0 ? 1 : config->threads;
    const auto o = lacunary::commands::build(c);
    *out = new lac_family{lacunary::family_from_certificate(o.certificate)};
    if (text_out) *text_out = dup(o.text);
    return static_cast<lac_status>(static_cast<int>(o.verdict));
  });
}

lac_status lac_family_load(const char* path, lac_family** out) {
  if (!path || !out) return fail(LAC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lac_family{lacunary::load_family(path)};
    return LAC_OK;
  });
}

lac_status lac_family_parse(const char* text, lac_family** out) {
  if (!text || !out) return fail(LAC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lac_family{lacunary::family_from_certificate(lacunary::parse_certificate(text))};
    return LAC_OK;
  });
}

lac_status lac_family_from_set(uint32_t s, uint32_t n, const uint64_t* exponents, size_t count, lac_family** out) {
  if (!out || (count > 0 && !exponents)) return fail(LAC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (s < 2 || s % 2 != 0) throw lacunary::UsageError("s must be even and >= 2");
    std::vector<lacunary::Residue> e(exponents, exponents + count);
    *out = new lac_family{lacunary::commands::explicit_family(s, n, std::move(e))};
    return LAC_OK;
  });
}

lac_status lac_family_serialize(const lac_family* family, char** text_out) {
  if (!family || !text_out) return fail(LAC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *text_out = dup(lacunary::serialize(lacunary::family_file(family->family)));
    return LAC_OK;
  });
}

lac_status lac_family_save(const lac_family* family, const char* path) {
  if (!family || !path) return fail(LAC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    lacunary::write_file_atomic(path, lacunary::serialize(lacunary::family_file(family->family)));
    return LAC_OK;
  });
}

lac_status lac_family_counts(const lac_family* family, uint32_t* s, uint32_t* factors, uint64_t* elements) {
  if (!family) return fail(LAC_INVALID_ARGUMENT, "null family");
  if (s) *s = family->family.s;
  if (factors) *factors = static_cast<uint32_t>(family->family.factors.size());
  if (elements) *elements = family->family.element_count();
  return LAC_OK;
}

void lac_family_free(lac_family* family) { delete family; }

lac_status lac_verify_pn(const lac_family* family, const lac_budgets* budgets, char** cert_out, char** text_out) {
  if (!family) return fail(LAC_INVALID_ARGUMENT, "null family");
  return guarded([&] {
    return finish(lacunary::commands::verify_pn(family->family, to_budgets(budgets)), cert_out, text_out);
  });
}

lac_status lac_verify_zs(const lac_family* family, uint32_t s, const char* strategy, const lac_budgets* budgets,
                         char** cert_out, char** text_out) {
  if (!family) return fail(LAC_INVALID_ARGUMENT, "null family");
  return guarded([&] {
    const auto st = lacunary::parse_strategy(strategy ? strategy : "meet-in-middle");
    return finish(lacunary::commands::verify_zs(family->family, s, st, to_budgets(budgets)), cert_out, text_out);
  });
}

lac_status lac_verify_leinert(const lac_family* family, uint32_t s, int union_scope, const lac_budgets* budgets,
                              char** cert_out, char** text_out) {
  if (!family) return fail(LAC_INVALID_ARGUMENT, "null family");
  return guarded([&] {
    return finish(lacunary::commands::verify_leinert(family->family, s, union_scope != 0, to_budgets(budgets)),
                  cert_out, text_out);
  });
}

lac_status lac_verify_qi(const lac_family* family, const lac_budgets* budgets, char** cert_out, char** text_out) {
  if (!family) return fail(LAC_INVALID_ARGUMENT, "null family");
  return guarded([&] {
    return finish(lacunary::commands::verify_qi(family->family, to_budgets(budgets)), cert_out, text_out);
  });
}

lac_status lac_norms(uint32_t n_min, uint32_t n_max, const double* qs, size_t q_count, const lac_budgets* budgets,
                     char** cert_out, char** text_out) {
  if (q_count > 0 && !qs) return fail(LAC_INVALID_ARGUMENT, "null exponent list");
  return guarded([&] {
    if (n_min == 0 || n_min > n_max) throw lacunary::UsageError("need 1 <= n_min <= n_max");
    std::vector<double> q(qs, qs + q_count);
    for (double v : q) {
      if (!(v > 1)) throw lacunary::UsageError("exponents q must exceed 1");
    }
    return finish(lacunary::commands::norms(n_min, n_max, q, to_budgets(budgets)), cert_out, text_out);
  });
}

lac_status lac_report(const lac_family* family, const lac_budgets* budgets, char** cert_out, char** text_out) {
  if (!family) return fail(LAC_INVALID_ARGUMENT, "null family");
  return guarded([&] {
    return finish(lacunary::commands::report(family->family, to_budgets(budgets)), cert_out, text_out);
  });
}

lac_status lac_weak_sidon_witness(const char* const* constants, size_t count, char** cert_out, char** text_out) {
  if (count > 0 && !constants) return fail(LAC_INVALID_ARGUMENT, "null constant list");
  return guarded([&] {
    std::vector<lacunary::Rational> cs;
    for (size_t i = 0; i < count; ++i) {
      if (!constants[i]) throw lacunary::UsageError("null constant");
      cs.push_back(lacunary::parse_rational(constants[i]));
    }
    return finish(lacunary::commands::weak_sidon(cs), cert_out, text_out);
  });
}

lac_status lac_write_file_atomic(const char* path, const char* content) {
  if (!path || !content) return fail(LAC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    lacunary::write_file_atomic(path, content);
    return LAC_OK;
  });
}

}  // extern "C"
