#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qlab/nonlinearity.hpp"
#include "qlab/rational.hpp"

namespace qlab {

/// Linear dispersion symbol of a (2j+1)-st order equation:
///   phi(k) = i((-1)^j g_0 k^{2j+1} + (-1)^{j-1} g_1 k^{2j-1} + ... + g_j k),
/// which for j = 2 reads i(g_0 k^5 - g_1 k^3 + g_2 k). Coefficients are
/// rational so that resonance detection stays exact.
struct DispersionSymbol {
  int j;
  std::vector<Rational> gammas;  // (g_0, ..., g_j), g_0 != 0

  DispersionSymbol(int j_, std::vector<Rational> gammas_);

  static DispersionSymbol fifth_order(const Rational& g0, const Rational& g1,
                                      const Rational& g2) {
    return DispersionSymbol(2, {g0, g1, g2});
  }
  static DispersionSymbol pure_power(int j_) {
    std::vector<Rational> g(j_ + 1, Rational(0));
    g[0] = Rational(1);
    return DispersionSymbol(j_, std::move(g));
  }

  DispersionSymbol negated() const;
  int order() const { return 2 * j + 1; }
};

/// Exact imaginary part of phi(k) as a rational over __int128.
Q128 phi_im_exact(const DispersionSymbol& sym, long long k);
std::complex<double> phi_symbol(const DispersionSymbol& sym, long long k);

/// (k_1, ..., k_{p+1}) with zero sum.
using FreqTuple = std::vector<int>;

void require_zero_sum(const FreqTuple& kt);

/// Phi^(p)(k) = -sum_l phi(k_l), exact.
Q128 resonance_im_exact(const DispersionSymbol& sym, const FreqTuple& kt);
std::complex<double> resonance_fn(const DispersionSymbol& sym,
                                  const FreqTuple& kt);

/// M_H^(p): 1 iff min(|k_p|, |k_{p+1}|)^exponent >= C max(|k_1|..|k_{p-1}|).
/// Exact integer comparison for the canonical exponent 4/5 and integral C.
bool cutoff_mh(const FreqTuple& kt, double C, double exponent = 0.8);

/// M_NZ^(p): 1 iff k_1 + ... + k_{p-1} != 0.
bool cutoff_mnz(const FreqTuple& kt);

/// Largest admissible max|k_l| (l < p) on the M_H support when the last two
/// slots are bounded by K.
int mh_small_bound(int K, double C, double exponent = 0.8);

/// D_{a,b,c} = prod_{l=1}^{a} (ik_l)^3 prod_{l=a+1}^{a+b} (ik_l)^2
///             prod_{l=a+b+1}^{a+b+c} (ik_l).
std::complex<double> d_block(const FreqTuple& kt, int a, int b, int c);

/// M_{NR,j} at a monomial: M_H M_NZ lambda ((s-3/2) a (ik_{(1,p-1)})
/// D_{a-1,b,c} + b D_{a,b-1,c}); terms with vanishing a or b contribute 0.
std::complex<double> m_nr(const Monomial& mono, int s, double C,
                          const FreqTuple& kt, double mh_exponent = 0.8);

/// Evaluable multiplier on Z_0^(p).
struct Multiplier {
  int p;
  std::function<std::complex<double>(const FreqTuple&)> eval;

  std::complex<double> operator()(const FreqTuple& kt) const { return eval(kt); }
};

/// Swap slots l and m (1-based, 1 <= l < m <= p+1).
Multiplier transpose(const Multiplier& m, int l, int mm);
/// S = (1 + T)/2.
Multiplier symmetrize(const Multiplier& m, int l, int mm);

/// All zero-sum tuples in |k_l| <= K with Phi^(p) = 0 exactly, one canonical
/// representative (entries sorted ascending) per multiset. For p >= 4 tuples
/// that vanish trivially -- the entries pair up as {k, -k} plus zeros -- are
/// excluded; for p = 2, 3 the full factorization families are returned.
std::vector<FreqTuple> resonance_search(const DispersionSymbol& sym, int p,
                                        int K, double budget = 1e9);

struct OscillationReport {
  int p = 0;
  int K = 0;
  double C = 0;
  // min |Phi| / (|k_p|^{2j} |k_{(1,p-1)}|) over the M_H * M_NZ support.
  double min_ratio = 0;
  FreqTuple argmin;
  long long support_count = 0;
  // Symmetrized-difference quantity at q = 2:
  // |(1-S)[1/Phi^(p)(k_1..k_{p-1}, k_p+k_{p+1}, k_{p+2})]| against
  // max_{l<=p} |k_l|^2 / |k_{p+1}|^5 on its support. The difference vanishes
  // identically at k_p = 0 (the transposition fixes the argument multiset),
  // so the certifiable direction is the upper bound: max_ratio_sym finite.
  double min_ratio_sym = 0;
  FreqTuple argmin_sym;
  double max_ratio_sym = 0;
  FreqTuple argmax_sym;
  long long sym_count = 0;
  long long sym_resonance_hits = 0;
  // Shadow of the complementary-support bound: max over supp(1 - M_H) of
  // max(|k_p|, |k_{p+1}|) / max_{l<p} |k_l|^{5/4}.
  double max_cprime = 0;
  FreqTuple arg_cprime;
  long long offsupport_count = 0;
};

OscillationReport verify_oscillation(const DispersionSymbol& sym, int p,
                                     double C, int K, double budget = 1e9);

std::string resonance_csv(const DispersionSymbol& sym, int p, int K, double C,
                          const std::vector<FreqTuple>& tuples);
std::string oscillation_csv(const OscillationReport& rep);

/// Cost proxy used against the scan budget.
double resonance_search_cost(int p, int K);

}  // namespace qlab
