#pragma once

// Harmonic analysis on a single cyclic factor Z_p. With
// fhat(k) = sum_j f(j) exp(-2 pi i j k / p):
//   A-norm    (1/p) sum_k |fhat(k)|
//   VN-norm   max_k |fhat(k)|
//   L^q norm  ((1/p) sum_k |fhat(k)|^q)^(1/q)   (normalized trace)

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lacunary/subset.hpp"

namespace lacunary {

using Complex = std::complex<double>;

inline constexpr std::uint64_t kDefaultSpectralBudget = std::uint64_t{1} << 20;
inline constexpr double kDefaultTolerance = 1e-9;

class CyclicFunction {
 public:
  explicit CyclicFunction(std::uint64_t order);

  std::uint64_t order() const noexcept { return order_; }
  // Residue j is taken mod p; zero values are dropped.
  void set(std::int64_t j, Complex value);
  Complex at(std::int64_t j) const;
  const std::map<Residue, Complex>& values() const noexcept { return values_; }
  std::size_t support_size() const noexcept { return values_.size(); }

 private:
  std::uint64_t order_;
  std::map<Residue, Complex> values_;
};

CyclicFunction indicator(const FactorSubset& set);

struct SpectrumReport {
  std::uint64_t p = 0;
  std::vector<Complex> spectrum;
  double norm_a = 0;
  double norm_vn = 0;
  double norm_l2 = 0;
  std::vector<std::pair<double, double>> norm_lq;  // (q, norm)

  bool operator==(const SpectrumReport&) const = default;
};

// L^q norm from a spectrum; q may be any real >= 1.
double lq_norm(const std::vector<Complex>& spectrum, double q);

// Direct evaluation of the definition, O(p * support).
std::vector<Complex> direct_dft(const CyclicFunction& f);
// FFTW-backed transform, O(p log p).
std::vector<Complex> fast_dft(const CyclicFunction& f);

// Throws BudgetExceeded when p > budget. Uses direct_dft for small
// p * support, fast_dft otherwise.
SpectrumReport transform(const CyclicFunction& f, const std::vector<double>& qs = {},
                         std::uint64_t budget = kDefaultSpectralBudget);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool operator==(const Rational&) const = default;
};

// Coefficient of a^j in the kernel: max(1 - |j|/(2n), 0), reduced.
Rational fejer_coefficient(unsigned n, std::int64_t j);
// Requires p > 4n.
CyclicFunction fejer_kernel(unsigned n, std::uint64_t p);

struct KernelNormCheck {
  unsigned n = 0;
  std::uint64_t p = 0;
  double q = 0;
  double q_dual = 0;
  double norm_a = 0;
  double norm_vn = 0;
  double norm_dual = 0;     // ||K||_{q'}
  double interpolated = 0;  // ||K||_A^{1/q'} ||K||_VN^{1/q}
  double ceiling = 0;       // (4n+1)^{1/q}
  bool interpolation_holds = false;
  bool ceiling_holds = false;

  bool holds() const noexcept { return interpolation_holds && ceiling_holds; }
  bool operator==(const KernelNormCheck&) const = default;
};

KernelNormCheck kernel_norm_check(unsigned n, std::uint64_t p, double q, double tolerance = kDefaultTolerance);

struct HolderCheck {
  Complex direct;    // sum_j f(j) conj(g(j))
  Complex spectral;  // (1/p) sum_k fhat(k) conj(ghat(k))
  double lhs = 0;    // |pairing|
  double rhs = 0;    // ||f||_{q'} ||g||_q
  bool pairing_consistent = false;
  bool holds = false;
};

HolderCheck holder_check(const CyclicFunction& f, const CyclicFunction& g, double q,
                         double tolerance = kDefaultTolerance);

// Lower bound on the Lambda(q) constant implied by M = |set ∩ [1, window]|:
// sqrt(M / (2 (4 window + 1)^{2/q})).
double density_lower_bound(const FactorSubset& set, std::uint64_t window, double q);

// The kernel chain for E ∩ [1, window] at exponent q:
// M/2 <= sum K 1_E <= ||K||_{q'} ||1_E||_q <= (4 window + 1)^{1/q} ||1_E||_q.
struct KernelChain {
  std::uint64_t window = 0;
  double q = 0;
  std::uint64_t m = 0;
  double half_m = 0;
  double pairing = 0;
  double holder_rhs = 0;
  double ceiling_rhs = 0;
  bool lower_link = false;
  bool holder_link = false;
  bool ceiling_link = false;

  bool holds() const noexcept { return lower_link && holder_link && ceiling_link; }
  bool operator==(const KernelChain&) const = default;
};

KernelChain kernel_chain(const FactorSubset& set, std::uint64_t window, double q,
                       double tolerance = kDefaultTolerance);

// Parses "3", "-1.25", "7/4" exactly.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);

struct WeakSidonWitness {
  Rational c;
  std::uint64_t n = 0;
  std::string lhs;  // n^2, exact
  std::string rhs;  // 40 C^2 n, exact rational
  bool holds = false;

  bool operator==(const WeakSidonWitness&) const = default;
};

// Least n with n^2 > 40 C^2 n, i.e. floor(40 C^2) + 1, checked exactly.
WeakSidonWitness weak_sidon_witness(const Rational& c);

struct SidonQICheck {
  std::uint64_t size = 0;
  double norm_vn = 0;
  double bound = 0;  // 6 sqrt(6) ||1_F||_VN
  double slack = 0;  // bound - |F|
  bool holds = false;
};

inline const double kQuasiIndependentSidonConstant = 6.0 * std::sqrt(6.0);

// Throws UsageError when F is not quasi-independent.
SidonQICheck sidon_qi_check(const FactorSubset& f, double tolerance = kDefaultTolerance);

// ||1_F||_VN / sqrt(|F|); throws UsageError for empty F.
double leinert_lower_bound(const FactorSubset& f);

// Default exponent grid {3, 4, 6, 10, 2n}, deduplicated and sorted.
std::vector<double> default_q_grid(unsigned n);

}  // namespace lacunary
