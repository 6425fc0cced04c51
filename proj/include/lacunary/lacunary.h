#ifndef LACUNARY_LACUNARY_H
#define LACUNARY_LACUNARY_H

/* C interface to the lacunary library. Strings returned through char**
   out-parameters are heap-allocated and must be released with
   lac_string_free. Handles are released with lac_family_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define LAC_API __attribute__((visibility("default")))
#else
#define LAC_API
#endif

typedef enum lac_status {
  LAC_OK = 0,
  LAC_INVALID_ARGUMENT = 1,
  LAC_CLAIM_VIOLATED = 2,
  LAC_BUDGET_REFUSED = 3,
  LAC_IO_ERROR = 4,
  LAC_FORMAT_ERROR = 5,
  LAC_OVERFLOW = 6,
  LAC_INTERNAL = 7
} lac_status;

typedef struct lac_family lac_family;

typedef struct lac_budgets {
  uint64_t tuples;        /* Z_s tuple enumerations */
  uint32_t subsets;       /* largest set whose 2^m subset sums are enumerated */
  uint64_t spectral;      /* largest transform order */
  uint64_t epsilons;      /* epsilon vectors in the (P) brute force */
  uint64_t leinert_nodes; /* DFS nodes in the Leinert search */
  uint32_t threads;
  double tolerance;
} lac_budgets;

typedef struct lac_build_config {
  uint32_t s;
  uint32_t n_min; /* 0 with n_max 0: profile default range */
  uint32_t n_max;
  const char* profile;   /* "paper", "desk" or "tiny" */
  const char* avoidance; /* NULL: profile default */
  int has_seed;
  uint64_t seed;
  uint32_t threads;
} lac_build_config;

/* Message for the last failing call on this thread. */
LAC_API const char* lac_last_error(void);
LAC_API const char* lac_version(void);
LAC_API void lac_string_free(char* s);

LAC_API lac_status lac_smallest_admissible_prime(uint32_t n, uint64_t* out);
/* JSON array of {"n","power","p"} rows. */
LAC_API lac_status lac_primes_json(uint32_t n_max, char** json_out);

LAC_API void lac_build_config_default(lac_build_config* config);
LAC_API void lac_budgets_default(lac_budgets* budgets);

/* LAC_OK when every target is met, LAC_CLAIM_VIOLATED when a factor is
   infeasible; the family is returned in both cases. */
LAC_API lac_status lac_family_build(const lac_build_config* config, lac_family** out, char** text_out);
LAC_API lac_status lac_family_load(const char* path, lac_family** out);
LAC_API lac_status lac_family_parse(const char* text, lac_family** out);
LAC_API lac_status lac_family_from_set(uint32_t s, uint32_t n, const uint64_t* exponents, size_t count,
                                       lac_family** out);
LAC_API lac_status lac_family_serialize(const lac_family* family, char** text_out);
LAC_API lac_status lac_family_save(const lac_family* family, const char* path);
LAC_API lac_status lac_family_counts(const lac_family* family, uint32_t* s, uint32_t* factors, uint64_t* elements);
LAC_API void lac_family_free(lac_family* family);

/* Verifications return LAC_OK, LAC_CLAIM_VIOLATED or LAC_BUDGET_REFUSED
   on completion. cert_out receives the certificate file, text_out a
   readable summary; either may be NULL. */
LAC_API lac_status lac_verify_pn(const lac_family* family, const lac_budgets* budgets, char** cert_out,
                                 char** text_out);
/* s == 0: the family's s. strategy: "naive" or "meet-in-middle". */
LAC_API lac_status lac_verify_zs(const lac_family* family, uint32_t s, const char* strategy,
                                 const lac_budgets* budgets, char** cert_out, char** text_out);
LAC_API lac_status lac_verify_leinert(const lac_family* family, uint32_t s, int union_scope,
                                      const lac_budgets* budgets, char** cert_out, char** text_out);
LAC_API lac_status lac_verify_qi(const lac_family* family, const lac_budgets* budgets, char** cert_out,
                                 char** text_out);

/* qs may be NULL with q_count 0 for the default exponent grid. */
LAC_API lac_status lac_norms(uint32_t n_min, uint32_t n_max, const double* qs, size_t q_count,
                             const lac_budgets* budgets, char** cert_out, char** text_out);
LAC_API lac_status lac_report(const lac_family* family, const lac_budgets* budgets, char** cert_out,
                              char** text_out);
/* constants: decimal or fraction strings such as "2", "0.5", "7/4". */
LAC_API lac_status lac_weak_sidon_witness(const char* const* constants, size_t count, char** cert_out,
                                          char** text_out);

LAC_API lac_status lac_write_file_atomic(const char* path, const char* content);

#ifdef __cplusplus
}
#endif

#endif
