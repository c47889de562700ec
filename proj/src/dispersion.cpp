#include "qlab/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace qlab {

DispersionSymbol::DispersionSymbol(int j_, std::vector<Rational> gammas_)
    : j(j_), gammas(std::move(gammas_)) {
  if (j < 2) throw ConfigError("dispersion order parameter j must be >= 2");
  if (static_cast<int>(gammas.size()) != j + 1)
    throw ConfigError("dispersion symbol needs j+1 coefficients");
  if (gammas[0].is_zero())
    throw ConfigError("leading dispersion coefficient must be nonzero");
}

DispersionSymbol DispersionSymbol::negated() const {
  std::vector<Rational> g = gammas;
  for (Rational& x : g) x = -x;
  return DispersionSymbol(j, std::move(g));
}

namespace {

__int128 ipow128(long long k, int n) {
  __int128 r = 1;
  for (int i = 0; i < n; ++i) r *= k;
  return r;
}

long long lcm_ll(long long a, long long b) {
  return a / std::gcd(a, b) * b;
}

long long common_den(const DispersionSymbol& sym) {
  long long d = 1;
  for (const Rational& g : sym.gammas) d = lcm_ll(d, g.den());
  return d;
}

// Numerator of Im phi(k) over common_den(sym).
__int128 phi_num(const DispersionSymbol& sym, long long k, long long den) {
  __int128 acc = 0;
  for (int l = 0; l <= sym.j; ++l) {
    const Rational& g = sym.gammas[l];
    if (g.is_zero()) continue;
    __int128 coef = static_cast<__int128>(g.num()) * (den / g.den());
    __int128 term = coef * ipow128(k, 2 * (sym.j - l) + 1);
    acc += ((sym.j - l) % 2 == 0) ? term : -term;
  }
  return acc;
}

std::complex<double> ik_pow(long long k, int n) {
  // (ik)^n
  double mag = 1.0;
  for (int i = 0; i < n; ++i) mag *= static_cast<double>(k);
  switch (((n % 4) + 4) % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

}  // namespace

Q128 phi_im_exact(const DispersionSymbol& sym, long long k) {
  long long den = common_den(sym);
  return Q128::of(phi_num(sym, k, den), den);
}

std::complex<double> phi_symbol(const DispersionSymbol& sym, long long k) {
  return {0.0, phi_im_exact(sym, k).to_double()};
}

void require_zero_sum(const FreqTuple& kt) {
  if (kt.size() < 2) throw NotZeroSum("tuple too short");
  long long s = 0;
  for (int k : kt) s += k;
  if (s != 0) throw NotZeroSum("frequency tuple does not sum to zero");
}

Q128 resonance_im_exact(const DispersionSymbol& sym, const FreqTuple& kt) {
  require_zero_sum(kt);
  long long den = common_den(sym);
  __int128 acc = 0;
  for (int k : kt) acc += phi_num(sym, k, den);
  return Q128::of(-acc, den);
}

std::complex<double> resonance_fn(const DispersionSymbol& sym,
                                  const FreqTuple& kt) {
  return {0.0, resonance_im_exact(sym, kt).to_double()};
}

namespace {

// min^exponent >= C * maxsmall, exact when exponent = 4/5 and C is integral:
// min^4 >= (C*maxsmall)^5.
bool mh_predicate(long long mn, long long maxsmall, double C, double exponent) {
  if (maxsmall == 0) return true;
  if (exponent == 0.8 && C > 0 && C == std::floor(C) && C < 1e9) {
    __int128 lhs = ipow128(mn, 4);
    __int128 rhs = ipow128(static_cast<long long>(C) * maxsmall, 5);
    return lhs >= rhs;
  }
  return std::pow(static_cast<double>(mn), exponent) >=
         C * static_cast<double>(maxsmall);
}

}  // namespace

bool cutoff_mh(const FreqTuple& kt, double C, double exponent) {
  require_zero_sum(kt);
  const int p = static_cast<int>(kt.size()) - 1;
  long long maxsmall = 0;
  for (int l = 0; l < p - 1; ++l)
    maxsmall = std::max(maxsmall, static_cast<long long>(std::abs(kt[l])));
  long long mn = std::min(std::abs(static_cast<long long>(kt[p - 1])),
                          std::abs(static_cast<long long>(kt[p])));
  return mh_predicate(mn, maxsmall, C, exponent);
}

bool cutoff_mnz(const FreqTuple& kt) {
  require_zero_sum(kt);
  long long s = 0;
  for (size_t l = 0; l + 2 < kt.size(); ++l) s += kt[l];
  return s != 0;
}

std::complex<double> d_block(const FreqTuple& kt, int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0)
    throw ArityMismatch("negative block length in D_{a,b,c}");
  if (a + b + c > static_cast<int>(kt.size()))
    throw ArityMismatch("D_{a,b,c} blocks exceed tuple length");
  std::complex<double> r = 1.0;
  int idx = 0;
  for (int l = 0; l < a; ++l) r *= ik_pow(kt[idx++], 3);
  for (int l = 0; l < b; ++l) r *= ik_pow(kt[idx++], 2);
  for (int l = 0; l < c; ++l) r *= ik_pow(kt[idx++], 1);
  return r;
}

std::complex<double> m_nr(const Monomial& mono, int s, double C,
                          const FreqTuple& kt, double mh_exponent) {
  const int p = mono.degree();
  if (static_cast<int>(kt.size()) != p + 1)
    throw ArityMismatch("tuple length " + std::to_string(kt.size()) +
                        " does not match monomial degree p+1 = " +
                        std::to_string(p + 1));
  if (!cutoff_mh(kt, C, mh_exponent) || !cutoff_mnz(kt)) return {0.0, 0.0};

  long long head = 0;
  for (int l = 0; l < p - 1; ++l) head += kt[l];

  std::complex<double> total = 0.0;
  if (mono.a > 0) {
    std::complex<double> ik_head(0.0, static_cast<double>(head));
    total += (static_cast<double>(s) - 1.5) * static_cast<double>(mono.a) *
             ik_head * d_block(kt, mono.a - 1, mono.b, mono.c);
  }
  if (mono.b > 0)
    total += static_cast<double>(mono.b) *
             d_block(kt, mono.a, mono.b - 1, mono.c);
  return mono.lambda.to_double() * total;
}

Multiplier transpose(const Multiplier& m, int l, int mm) {
  if (l < 1 || mm <= l || mm > m.p + 1)
    throw SlotIndexError("transpose slots must satisfy 1 <= l < m <= p+1");
  auto base = m.eval;
  int li = l - 1, mi = mm - 1;
  return Multiplier{m.p, [base, li, mi](const FreqTuple& kt) {
                      FreqTuple sw = kt;
                      std::swap(sw[li], sw[mi]);
                      return base(sw);
                    }};
}

Multiplier symmetrize(const Multiplier& m, int l, int mm) {
  Multiplier t = transpose(m, l, mm);
  auto base = m.eval;
  auto swapped = t.eval;
  return Multiplier{m.p, [base, swapped](const FreqTuple& kt) {
                      return 0.5 * (base(kt) + swapped(kt));
                    }};
}

// ---------------------------------------------------------------------------
// Resonance search.

double resonance_search_cost(int p, int K) {
  // Number of non-decreasing p-tuples over 2K+1 values: C(2K+p, p).
  double c = 1.0;
  for (int i = 1; i <= p; ++i)
    c *= static_cast<double>(2 * K + i) / static_cast<double>(i);
  return c;
}

namespace {

bool trivially_paired(const FreqTuple& kt) {
  std::map<int, int> count;
  for (int k : kt)
    if (k != 0) count[k]++;
  for (const auto& [k, c] : count) {
    if (k < 0) continue;
    auto it = count.find(-k);
    if (it == count.end() || it->second != c) return false;
  }
  for (const auto& [k, c] : count) {
    if (k > 0) continue;
    auto it = count.find(-k);
    if (it == count.end() || it->second != c) return false;
  }
  return true;
}

}  // namespace

std::vector<FreqTuple> resonance_search(const DispersionSymbol& sym, int p,
                                        int K, double budget) {
  if (p < 2 || K < 1) throw ConfigError("resonance_search: need p >= 2, K >= 1");
  if (resonance_search_cost(p, K) > budget)
    throw BudgetExceeded("resonance scan cost " +
                         std::to_string(resonance_search_cost(p, K)) +
                         " exceeds budget " + std::to_string(budget));

  const long long den = common_den(sym);
  std::vector<__int128> phi_table(2 * K + 1);
  for (int k = -K; k <= K; ++k) phi_table[k + K] = phi_num(sym, k, den);

  std::set<FreqTuple> found;
  FreqTuple cur(p + 1, 0);

  // Depth-first over non-decreasing (k_1..k_p); k_{p+1} closes the sum.
  auto rec = [&](auto&& self, int depth, int lo, long long sum,
                 __int128 phisum) -> void {
    if (depth == p) {
      long long last = -sum;
      if (last < -K || last > K) return;
      if (phisum + phi_table[last + K] != 0) return;
      cur[p] = static_cast<int>(last);
      FreqTuple canon = cur;
      std::sort(canon.begin(), canon.end());
      if (p >= 4 && trivially_paired(canon)) return;
      found.insert(canon);
      return;
    }
    int remaining = p - depth;
    for (int k = lo; k <= K; ++k) {
      // Remaining entries are >= k, so the closing entry is <= -(sum + r*k);
      // it must reach at least -K.
      if (sum + static_cast<long long>(remaining) * k > K) break;
      cur[depth] = k;
      self(self, depth + 1, k, sum + k, phisum + phi_table[k + K]);
    }
  };
  rec(rec, 0, -K, 0, 0);

  return {found.begin(), found.end()};
}

// ---------------------------------------------------------------------------
// Oscillation scans.

int mh_small_bound(int K, double C, double exponent) {
  int hi = 0;
  while (hi + 1 <= K && mh_predicate(K, hi + 1, C, exponent)) ++hi;
  return hi;
}

OscillationReport verify_oscillation(const DispersionSymbol& sym, int p,
                                     double C, int K, double budget) {
  if (p < 2 || K < 1)
    throw ConfigError("verify_oscillation: need p >= 2, K >= 1");
  OscillationReport rep;
  rep.p = p;
  rep.K = K;
  rep.C = C;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.min_ratio_sym = std::numeric_limits<double>::infinity();
  rep.max_cprime = 0.0;

  const long long den = common_den(sym);
  std::vector<__int128> phi_table(2 * K + 1);
  for (int k = -K; k <= K; ++k) phi_table[k + K] = phi_num(sym, k, den);
  const double dden = static_cast<double>(den);
  const int twoj = 2 * sym.j;
  const int kl = mh_small_bound(K, C);
  const int nsmall = 2 * kl + 1;

  // Main bound: |Phi| >= c |k_p|^{2j} |k_{(1,p-1)}| on the M_H*M_NZ support.
  {
    double cost = std::pow(nsmall, p - 1) * (2.0 * K + 1);
    if (cost > budget)
      throw BudgetExceeded("oscillation scan cost exceeds budget");
    FreqTuple kt(p + 1, 0);
    auto rec = [&](auto&& self, int depth, long long sum,
                   __int128 phisum) -> void {
      if (depth == p - 1) {
        if (sum == 0) return;  // M_NZ
        long long maxsmall = 0;
        for (int l = 0; l < p - 1; ++l)
          maxsmall = std::max(maxsmall, std::abs((long long)kt[l]));
        for (int kp = -K; kp <= K; ++kp) {
          long long last = -(sum + kp);
          if (last < -K || last > K) continue;
          long long mn = std::min(std::abs((long long)kp), std::abs(last));
          if (!mh_predicate(mn, maxsmall, C, 0.8)) continue;
          kt[p - 1] = kp;
          kt[p] = static_cast<int>(last);
          __int128 tot = phisum + phi_table[kp + K] + phi_table[last + K];
          double phi_abs = std::abs(static_cast<double>(tot)) / dden;
          double denom = std::pow(std::abs((double)kp), twoj) *
                         std::abs((double)sum);
          double ratio = phi_abs / denom;
          ++rep.support_count;
          if (ratio < rep.min_ratio) {
            rep.min_ratio = ratio;
            rep.argmin = kt;
          }
        }
        return;
      }
      for (int k = -kl; k <= kl; ++k) {
        kt[depth] = k;
        self(self, depth + 1, sum + k, phisum + phi_table[k + K]);
      }
    };
    rec(rec, 0, 0, 0);
  }

  // Symmetrized-difference bound of the q = 2 case: slots 1..p small,
  // slots p+1, p+2 large and comparable.
  {
    double cost = std::pow(nsmall, p) * (2.0 * K + 1);
    if (cost > budget)
      throw BudgetExceeded("oscillation (sym) scan cost exceeds budget");
    FreqTuple kt(p + 2, 0);
    FreqTuple arg_a(p + 1), arg_b(p + 1);
    auto rec = [&](auto&& self, int depth, long long sum) -> void {
      if (depth == p) {
        long long head = 0;
        for (int l = 0; l < p - 1; ++l) head += kt[l];
        if (head == 0) return;
        long long maxsmall = 0;
        for (int l = 0; l < p; ++l)
          maxsmall = std::max(maxsmall, std::abs((long long)kt[l]));
        if (maxsmall == 0) return;
        for (int ka = -K; ka <= K; ++ka) {
          long long kb = -(sum + ka);
          if (kb < -K || kb > K) continue;
          long long aa = std::abs((long long)ka), ab = std::abs(kb);
          if (aa > 2 * ab || ab > 2 * aa) continue;  // comparable sizes
          if (!mh_predicate(std::min(aa, ab), maxsmall, C, 0.8)) continue;
          kt[p] = ka;
          kt[p + 1] = static_cast<int>(kb);
          // Phi^(p) at (k_1..k_{p-1}, k_p + k_{p+1}, k_{p+2}) and transposed.
          for (int l = 0; l < p - 1; ++l) arg_a[l] = arg_b[l] = kt[l];
          arg_a[p - 1] = kt[p - 1] + ka;
          arg_a[p] = static_cast<int>(kb);
          arg_b[p - 1] = kt[p - 1] + static_cast<int>(kb);
          arg_b[p] = ka;
          __int128 pa = 0, pb = 0;
          bool in_range = true;
          for (int l = 0; l <= p; ++l) {
            if (std::abs(arg_a[l]) > 2 * K || std::abs(arg_b[l]) > 2 * K) {
              in_range = false;
              break;
            }
          }
          if (!in_range) continue;
          for (int l = 0; l <= p; ++l) {
            pa += phi_num(sym, arg_a[l], den);
            pb += phi_num(sym, arg_b[l], den);
          }
          pa = -pa;
          pb = -pb;
          if (pa == 0 || pb == 0) {
            ++rep.sym_resonance_hits;
            continue;
          }
          double va = dden / static_cast<double>(pa);
          double vb = dden / static_cast<double>(pb);
          double value = 0.5 * std::abs(va - vb);
          double rhs = static_cast<double>(maxsmall) * maxsmall /
                       std::pow(static_cast<double>(aa), 5);
          double ratio = value / rhs;
          ++rep.sym_count;
          if (ratio < rep.min_ratio_sym) {
            rep.min_ratio_sym = ratio;
            rep.argmin_sym = kt;
          }
          if (ratio > rep.max_ratio_sym) {
            rep.max_ratio_sym = ratio;
            rep.argmax_sym = kt;
          }
        }
        return;
      }
      for (int k = -kl; k <= kl; ++k) {
        kt[depth] = k;
        self(self, depth + 1, sum + k);
      }
    };
    rec(rec, 0, 0);
  }

  // Shadow of the complementary-support estimate: on supp(1 - M_H),
  // max(|k_p|, |k_{p+1}|) <= C' max_{l<p} |k_l|^{5/4}.
  {
    double cost = std::pow(2.0 * K + 1, p);
    if (cost > budget)
      throw BudgetExceeded("off-support scan cost exceeds budget");
    FreqTuple kt(p + 1, 0);
    auto rec = [&](auto&& self, int depth, long long sum) -> void {
      if (depth == p) {
        long long last = -sum;
        if (last < -K || last > K) return;
        long long maxsmall = 0;
        for (int l = 0; l < p - 1; ++l)
          maxsmall = std::max(maxsmall, std::abs((long long)kt[l]));
        long long ap = std::abs((long long)kt[p - 1]), aq = std::abs(last);
        if (mh_predicate(std::min(ap, aq), maxsmall, C, 0.8)) return;
        kt[p] = static_cast<int>(last);
        ++rep.offsupport_count;
        // maxsmall >= 1 off the support
        double cprime = static_cast<double>(std::max(ap, aq)) /
                        std::pow(static_cast<double>(maxsmall), 1.25);
        if (cprime > rep.max_cprime) {
          rep.max_cprime = cprime;
          rep.arg_cprime = kt;
        }
        return;
      }
      for (int k = -K; k <= K; ++k) {
        kt[depth] = k;
        self(self, depth + 1, sum + k);
      }
    };
    rec(rec, 0, 0);
  }

  return rep;
}

// ---------------------------------------------------------------------------
// CSV.

namespace {
std::string tuple_cols(const FreqTuple& kt, int width) {
  std::ostringstream os;
  for (int i = 0; i < width; ++i) {
    os << ",";
    if (i < static_cast<int>(kt.size())) os << kt[i];
  }
  return os.str();
}
}  // namespace

std::string resonance_csv(const DispersionSymbol& sym, int p, int K, double C,
                          const std::vector<FreqTuple>& tuples) {
  std::ostringstream os;
  os.precision(17);
  os << "p,K,C";
  for (int i = 1; i <= p + 1; ++i) os << ",k" << i;
  os << ",phi_value\n";
  for (const FreqTuple& kt : tuples) {
    os << p << "," << K << "," << C << tuple_cols(kt, p + 1) << ","
       << resonance_im_exact(sym, kt).to_double() << "\n";
  }
  return os.str();
}

std::string oscillation_csv(const OscillationReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "p,K,C,min_ratio,argmin_tuple\n";
  os << rep.p << "," << rep.K << "," << rep.C << "," << rep.min_ratio << ",\"";
  for (size_t i = 0; i < rep.argmin.size(); ++i) {
    if (i) os << " ";
    os << rep.argmin[i];
  }
  os << "\"\n";
  return os.str();
}

}  // namespace qlab
