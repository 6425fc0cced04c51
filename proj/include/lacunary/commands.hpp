#pragma once

// Orchestration behind the CLI subcommands. Every verification recomputes
// from the stored exponents; cached construction records are never trusted.

#include <string>
#include <vector>

#include "lacunary/certificate.hpp"

namespace lacunary::commands {

enum class Verdict {
  verified = 0,  // every claim holds
  violated = 2,  // a claim failed, witness attached
  refused = 3,   // a budget stopped an exhaustive check
};

struct Budgets {
  std::uint64_t tuples = kDefaultTupleBudget;
  unsigned subsets = kDefaultSubsetBudget;
  std::uint64_t spectral = kDefaultSpectralBudget;
  std::uint64_t epsilons = kDefaultEpsilonBudget;
  std::uint64_t leinert_nodes = kDefaultLeinertBudget;
  unsigned threads = 1;
  double tolerance = kDefaultTolerance;
};

Json budgets_to_json(const Budgets& b);

struct Outcome {
  Verdict verdict = Verdict::verified;
  CertificateFile certificate;
  std::string text;  // human-readable summary
};

struct PrimeRow {
  unsigned n;
  std::uint64_t power;  // 2^(n+1)
  std::uint64_t p;
};
std::vector<PrimeRow> primes(unsigned n_max);

struct BuildConfig {
  unsigned s = 2;
  unsigned n_min = 8;
  unsigned n_max = 16;
  std::string profile = "desk";
  std::string avoidance;  // empty: profile default
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

// verified when every target is met, violated when any factor is Infeasible.
Outcome build(const BuildConfig& config);

// Single-factor family holding an explicit exponent set of factor n.
LacunaryFamily explicit_family(unsigned s, unsigned n, std::vector<Residue> exponents);

Outcome verify_pn(const LacunaryFamily& family, const Budgets& budgets);
// s == 0 uses the family's s.
Outcome verify_zs(const LacunaryFamily& family, unsigned s, ZsStrategy strategy, const Budgets& budgets);
Outcome verify_leinert(const LacunaryFamily& family, unsigned s, bool union_scope, const Budgets& budgets);
Outcome verify_qi(const LacunaryFamily& family, const Budgets& budgets);

// Kernel norms for n in [n_min, n_max] with p the first table prime > 4n.
// Empty qs: default grid per n.
Outcome norms(unsigned n_min, unsigned n_max, const std::vector<double>& qs, const Budgets& budgets);

Outcome weak_sidon(const std::vector<Rational>& constants);

Outcome report(const LacunaryFamily& family, const Budgets& budgets);

// First standard-rule prime exceeding 4n.
std::uint64_t kernel_prime(unsigned n);

}  // namespace lacunary::commands
