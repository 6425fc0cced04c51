#include "lacunary/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <limits>
#include <numeric>

#include "lacunary/combinatorics.hpp"
#include "lacunary/errors.hpp"

namespace lacunary {
namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kDirectWorkLimit = std::uint64_t{1} << 22;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

Residue normalize(std::int64_t j, std::uint64_t p) {
  const auto pm = static_cast<std::int64_t>(p);
  std::int64_t r = j % pm;
  if (r < 0) r += pm;
  return static_cast<Residue>(r);
}

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

CyclicFunction::CyclicFunction(std::uint64_t order) : order_(order) {
  if (order < 2) throw UsageError("cyclic function order must be at least 2");
}

void CyclicFunction::set(std::int64_t j, Complex value) {
  const Residue r = normalize(j, order_);
  if (value == Complex{}) {
    values_.erase(r);
  } else {
    values_[r] = value;
  }
}

Complex CyclicFunction::at(std::int64_t j) const {
  auto it = values_.find(normalize(j, order_));
  return it == values_.end() ? Complex{} : it->second;
}

CyclicFunction indicator(const FactorSubset& set) {
  CyclicFunction f(set.order());
  for (Residue e : set.exponents()) f.set(static_cast<std::int64_t>(e), 1.0);
  return f;
}

double lq_norm(const std::vector<Complex>& spectrum, double q) {
  if (q < 1) throw UsageError("L^q norm requires q >= 1");
  if (spectrum.empty()) return 0;
  double peak = 0;
  for (const auto& v : spectrum) peak = std::max(peak, std::abs(v));
  if (peak == 0) return 0;
  double acc = 0;
  for (const auto& v : spectrum) acc += std::pow(std::abs(v) / peak, q);
  return peak * std::pow(acc / static_cast<double>(spectrum.size()), 1.0 / q);
}

std::vector<Complex> direct_dft(const CyclicFunction& f) {
  const std::uint64_t p = f.order();
  std::vector<Complex> twiddle(p);
  const double step = -2.0 * std::numbers::pi / static_cast<double>(p);
  for (std::uint64_t t = 0; t < p; ++t) twiddle[t] = std::polar(1.0, step * static_cast<double>(t));
  std::vector<Complex> out(p);
  for (std::uint64_t k = 0; k < p; ++k) {
    Complex acc{};
    for (const auto& [j, v] : f.values()) {
      acc += v * twiddle[static_cast<std::uint64_t>(static_cast<u128>(j) * k % p)];
    }
    out[k] = acc;
  }
  return out;
}

std::vector<Complex> fast_dft(const CyclicFunction& f) {
  const std::uint64_t p = f.order();
  if (p > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) throw BudgetExceeded("order too large for FFT");
  const int n = static_cast<int>(p);
  std::vector<Complex> in(p), out(p);
  for (const auto& [j, v] : f.values()) in[j] = v;
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

SpectrumReport transform(const CyclicFunction& f, const std::vector<double>& qs, std::uint64_t budget) {
  const std::uint64_t p = f.order();
  if (p > budget) {
    throw BudgetExceeded("transform: order " + std::to_string(p) + " exceeds spectral budget " +
                         std::to_string(budget));
  }
  SpectrumReport r;
  r.p = p;
  const u128 work = static_cast<u128>(p) * std::max<std::size_t>(f.support_size(), 1);
  r.spectrum = work <= kDirectWorkLimit ? direct_dft(f) : fast_dft(f);
  double sum_abs = 0;
  double sum_sq = 0;
  for (const auto& v : r.spectrum) {
    const double a = std::abs(v);
    sum_abs += a;
    sum_sq += a * a;
    r.norm_vn = std::max(r.norm_vn, a);
  }
  r.norm_a = sum_abs / static_cast<double>(p);
  r.norm_l2 = std::sqrt(sum_sq / static_cast<double>(p));
  for (double q : qs) r.norm_lq.emplace_back(q, lq_norm(r.spectrum, q));
  return r;
}

Rational fejer_coefficient(unsigned n, std::int64_t j) {
  if (n == 0) throw UsageError("kernel scale must be >= 1");
  const std::int64_t width = 2 * static_cast<std::int64_t>(n);
  const std::int64_t a = j < 0 ? -j : j;
  if (a >= width) return {0, 1};
  const std::int64_t num = width - a;
  const std::int64_t g = std::gcd(num, width);
  return {num / g, width / g};
}

CyclicFunction fejer_kernel(unsigned n, std::uint64_t p) {
  if (n == 0) throw UsageError("kernel scale must be >= 1");
  if (p <= 4 * static_cast<std::uint64_t>(n)) throw UsageError("fejer_kernel requires p > 4n");
  CyclicFunction k(p);
  const auto width = 2 * static_cast<std::int64_t>(n);
  for (std::int64_t j = -width; j <= width; ++j) {
    const Rational c = fejer_coefficient(n, j);
    if (c.num != 0) k.set(j, static_cast<double>(c.num) / static_cast<double>(c.den));
  }
  return k;
}

KernelNormCheck kernel_norm_check(unsigned n, std::uint64_t p, double q, double tolerance) {
  if (q <= 1) throw UsageError("kernel_norm_check requires q > 1");
  const SpectrumReport r = transform(fejer_kernel(n, p));
  KernelNormCheck c;
  c.n = n;
  c.p = p;
  c.q = q;
  c.q_dual = q / (q - 1);
  c.norm_a = r.norm_a;
  c.norm_vn = r.norm_vn;
  c.norm_dual = lq_norm(r.spectrum, c.q_dual);
  c.interpolated = std::pow(c.norm_a, 1.0 / c.q_dual) * std::pow(c.norm_vn, 1.0 / q);
  c.ceiling = std::pow(4.0 * n + 1.0, 1.0 / q);
  c.interpolation_holds = c.norm_dual <= c.interpolated + tolerance;
  c.ceiling_holds = c.interpolated <= c.ceiling + tolerance;
  return c;
}

HolderCheck holder_check(const CyclicFunction& f, const CyclicFunction& g, double q, double tolerance) {
  if (f.order() != g.order()) throw UsageError("holder_check: functions live on different groups");
  if (q <= 1) throw UsageError("holder_check requires q > 1");
  HolderCheck h;
  for (const auto& [j, v] : f.values()) h.direct += v * std::conj(g.at(static_cast<std::int64_t>(j)));
  const SpectrumReport rf = transform(f);
  const SpectrumReport rg = transform(g);
  Complex acc{};
  for (std::size_t k = 0; k < rf.spectrum.size(); ++k) acc += rf.spectrum[k] * std::conj(rg.spectrum[k]);
  h.spectral = acc / static_cast<double>(f.order());
  h.lhs = std::abs(h.direct);
  h.rhs = lq_norm(rf.spectrum, q / (q - 1)) * lq_norm(rg.spectrum, q);
  h.pairing_consistent = std::abs(h.direct - h.spectral) <= tolerance * std::max(1.0, h.lhs);
  h.holds = h.lhs <= h.rhs + tolerance;
  return h;
}

double density_lower_bound(const FactorSubset& set, std::uint64_t window, double q) {
  if (window == 0) throw UsageError("density window must be >= 1");
  const auto& e = set.exponents();
  const auto m = static_cast<double>(std::upper_bound(e.begin(), e.end(), window) - e.begin());
  return std::sqrt(m / (2.0 * std::pow(4.0 * static_cast<double>(window) + 1.0, 2.0 / q)));
}

KernelChain kernel_chain(const FactorSubset& set, std::uint64_t window, double q, double tolerance) {
  if (q <= 1) throw UsageError("kernel_chain requires q > 1");
  if (window == 0 || window > std::numeric_limits<unsigned>::max()) throw UsageError("window out of range");
  const std::uint64_t p = set.order();
  const CyclicFunction kernel = fejer_kernel(static_cast<unsigned>(window), p);
  CyclicFunction e(p);
  KernelChain c;
  c.window = window;
  c.q = q;
  for (Residue x : set.exponents()) {
    if (x > window) break;
    e.set(static_cast<std::int64_t>(x), 1.0);
    ++c.m;
    c.pairing += kernel.at(static_cast<std::int64_t>(x)).real();
  }
  c.half_m = static_cast<double>(c.m) / 2.0;
  const SpectrumReport rk = transform(kernel);
  const SpectrumReport re = transform(e);
  const double norm_e = lq_norm(re.spectrum, q);
  c.holder_rhs = lq_norm(rk.spectrum, q / (q - 1)) * norm_e;
  c.ceiling_rhs = std::pow(4.0 * static_cast<double>(window) + 1.0, 1.0 / q) * norm_e;
  c.lower_link = c.half_m <= c.pairing + tolerance;
  c.holder_link = c.pairing <= c.holder_rhs + tolerance;
  c.ceiling_link = c.holder_rhs <= c.ceiling_rhs + tolerance;
  return c;
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw UsageError("empty number");
  auto parse_int = [&](const std::string& s) -> std::int64_t {
    if (s.empty() || s.size() > 12 || s.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("cannot parse '" + text + "' as an exact rational (at most 12 digits per part)");
    }
    return std::stoll(s);
  };
  std::string body = text;
  bool negative = false;
  if (body[0] == '-' || body[0] == '+') {
    negative = body[0] == '-';
    body.erase(0, 1);
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    num = parse_int(body.substr(0, slash));
    den = parse_int(body.substr(slash + 1));
    if (den == 0) throw UsageError("zero denominator in '" + text + "'");
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    const std::string whole = body.substr(0, dot);
    const std::string frac = body.substr(dot + 1);
    if (whole.size() + frac.size() > 12 || (whole.empty() && frac.empty())) {
      throw UsageError("cannot parse '" + text + "' as an exact rational");
    }
    num = parse_int(whole.empty() ? "0" : whole);
    for (char c : frac) {
      if (c < '0' || c > '9') throw UsageError("cannot parse '" + text + "' as an exact rational");
      num = num * 10 + (c - '0');
      den *= 10;
    }
  } else {
    num = parse_int(body);
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {negative ? -num : num, den};
}

std::string to_string(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

WeakSidonWitness weak_sidon_witness(const Rational& c) {
  if (c.num < 0 || c.den <= 0) throw UsageError("weak_sidon_witness requires C >= 0");
  constexpr std::int64_t kLimit = std::int64_t{1} << 31;
  if (c.num >= kLimit || c.den >= kLimit) throw OverflowError("C numerator/denominator exceed 31 bits");
  const u128 num2 = static_cast<u128>(c.num) * static_cast<u128>(c.num);
  const u128 den2 = static_cast<u128>(c.den) * static_cast<u128>(c.den);
  const u128 forty_num2 = 40 * num2;
  const u128 floor_val = forty_num2 / den2;
  if (floor_val >= std::numeric_limits<std::uint64_t>::max()) throw OverflowError("witness n exceeds 64 bits");
  WeakSidonWitness w;
  w.c = c;
  w.n = static_cast<std::uint64_t>(floor_val) + 1;
  const u128 n = w.n;
  // n^2 > 40 C^2 n  <=>  n * den^2 > 40 num^2   (n > 0)
  w.holds = n * den2 > forty_num2;
  w.lhs = u128_to_string(n * n);
  u128 rhs_num = forty_num2 * n;
  u128 rhs_den = den2;
  const u128 g = gcd128(rhs_num, rhs_den);
  rhs_num /= g;
  rhs_den /= g;
  w.rhs = u128_to_string(rhs_num) + (rhs_den == 1 ? "" : "/" + u128_to_string(rhs_den));
  return w;
}

SidonQICheck sidon_qi_check(const FactorSubset& f, double tolerance) {
  if (!is_quasi_independent(f).independent) throw UsageError("sidon_qi_check requires a quasi-independent set");
  SidonQICheck c;
  c.size = f.size();
  c.norm_vn = transform(indicator(f)).norm_vn;
  c.bound = kQuasiIndependentSidonConstant * c.norm_vn;
  c.slack = c.bound - static_cast<double>(c.size);
  c.holds = static_cast<double>(c.size) <= c.bound + tolerance;
  return c;
}

double leinert_lower_bound(const FactorSubset& f) {
  if (f.empty()) throw UsageError("leinert_lower_bound requires a nonempty set");
  return transform(indicator(f)).norm_vn / std::sqrt(static_cast<double>(f.size()));
}

std::vector<double> default_q_grid(unsigned n) {
  std::vector<double> qs{3, 4, 6, 10};
  if (n >= 1) qs.push_back(2.0 * n);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  // q = 2 has no interpolation content; keep q > 2 only.
  qs.erase(std::remove_if(qs.begin(), qs.end(), [](double q) { return q <= 2; }), qs.end());
  return qs;
}

}  // namespace lacunary
