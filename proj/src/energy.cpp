#include "qlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace qlab {

namespace {

std::complex<double> ik_pow(long long k, int n) {
  double mag = 1.0;
  for (int i = 0; i < n; ++i) mag *= static_cast<double>(k);
  switch (((n % 4) + 4) % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

std::complex<double> pairwise(std::span<const std::complex<double>> v) {
  if (v.empty()) return {0.0, 0.0};
  if (v.size() == 1) return v[0];
  size_t mid = v.size() / 2;
  return pairwise(v.subspan(0, mid)) + pairwise(v.subspan(mid));
}

}  // namespace

std::complex<double> gamma_form(const Multiplier& M,
                                std::span<const Field> fields, int p,
                                int K_corr) {
  if (p < 1 || static_cast<int>(fields.size()) != p + 1)
    throw ArityMismatch("gamma_form: need p+1 field slots");
  if (M.p != p) throw ArityMismatch("gamma_form: multiplier arity mismatch");
  if (K_corr < 1) throw ConfigError("gamma_form: K_corr must be >= 1");

  const int K = K_corr;
  FreqTuple kt(p + 1, 0);
  // Partial sums per k_1 value, combined by a fixed pairwise tree so the
  // result does not depend on any outer partitioning.
  std::vector<std::complex<double>> partials(2 * K + 1, {0.0, 0.0});

  auto rec = [&](auto&& self, int depth, long long sum,
                 std::complex<double> prod) -> std::complex<double> {
    if (prod == std::complex<double>(0.0, 0.0)) return 0.0;
    if (depth == p) {
      long long last = -sum;
      if (last < -K || last > K) return 0.0;
      kt[p] = static_cast<int>(last);
      std::complex<double> fp = fields[p].mode(kt[p]);
      if (fp == std::complex<double>(0.0, 0.0)) return 0.0;
      return M(kt) * prod * fp;
    }
    std::complex<double> acc = 0.0;
    for (int k = -K; k <= K; ++k) {
      kt[depth] = k;
      std::complex<double> fk = fields[depth].mode(k);
      if (fk == std::complex<double>(0.0, 0.0)) continue;
      acc += self(self, depth + 1, sum + k, prod * fk);
    }
    return acc;
  };

  for (int k1 = -K; k1 <= K; ++k1) {
    kt[0] = k1;
    std::complex<double> f1 = fields[0].mode(k1);
    if (f1 == std::complex<double>(0.0, 0.0)) continue;
    partials[k1 + K] = rec(rec, 1, k1, f1);
  }
  return pairwise(partials);
}

// ---------------------------------------------------------------------------
// Correction kernel.

namespace {

// Core of M_{NR} without the cutoffs (enforced by the support enumeration).
std::complex<double> mnr_core(const Monomial& m, int s, const FreqTuple& kt) {
  long long head = 0;
  for (size_t l = 0; l + 2 < kt.size(); ++l) head += kt[l];
  std::complex<double> total = 0.0;
  if (m.a > 0)
    total += (static_cast<double>(s) - 1.5) * static_cast<double>(m.a) *
             std::complex<double>(0.0, static_cast<double>(head)) *
             d_block(kt, m.a - 1, m.b, m.c);
  if (m.b > 0)
    total += static_cast<double>(m.b) * d_block(kt, m.a, m.b - 1, m.c);
  return m.lambda.to_double() * total;
}

}  // namespace

CorrectionKernel::CorrectionKernel(const Nonlinearity& n,
                                   const DispersionSymbol& sym,
                                   const EnergyParams& prm) {
  const int K = prm.K_corr;
  const int kl = mh_small_bound(K, prm.C_mh, prm.mh_exponent);
  for (const Monomial& m : n.monomials()) {
    entries_.emplace_back();
    degrees_.push_back(m.degree());
    if (m.a == 0 && m.b == 0) continue;  // M_NR vanishes identically
    const int p = m.degree();
    std::vector<Entry>& list = entries_.back();
    FreqTuple kt(p + 1, 0);
    auto rec = [&](auto&& self, int depth, long long sum) -> void {
      if (depth == p - 1) {
        if (sum == 0) return;  // M_NZ
        for (int kp = -K; kp <= K; ++kp) {
          long long last = -(sum + kp);
          if (last < -K || last > K) continue;
          kt[p - 1] = kp;
          kt[p] = static_cast<int>(last);
          if (!cutoff_mh(kt, prm.C_mh, prm.mh_exponent)) continue;
          Q128 phi = resonance_im_exact(sym, kt);
          if (phi.is_zero())
            throw InternalResonanceHit(
                "Phi vanishes on the M_H*M_NZ support; C_mh too small");
          std::complex<double> val =
              ik_pow(kp, prm.s + 1) * ik_pow(last, prm.s + 1) *
              mnr_core(m, prm.s, kt) /
              std::complex<double>(0.0, phi.to_double());
          list.push_back(Entry{kt, val});
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
}

double CorrectionKernel::evaluate(const Field& f, const Field& g) const {
  Field diff = f - g;
  std::vector<std::complex<double>> vals;
  for (size_t j = 0; j < entries_.size(); ++j) {
    const int p = degrees_[j];
    for (const Entry& e : entries_[j]) {
      std::complex<double> prod = e.value;
      for (int l = 0; l < p - 1; ++l) prod *= f.mode(e.kt[l]);
      prod *= diff.mode(e.kt[p - 1]);
      prod *= diff.mode(e.kt[p]);
      vals.push_back(prod);
    }
  }
  std::complex<double> total = pairwise(vals);
  double scale = 1.0 + std::abs(total);
  if (std::abs(total.imag()) > 1e-8 * scale)
    throw NotReal("correction term has imaginary part " +
                  std::to_string(total.imag()));
  return total.real();
}

double correction_term(const Nonlinearity& n, const DispersionSymbol& sym,
                       const EnergyParams& prm, const Field& f,
                       const Field& g) {
  return CorrectionKernel(n, sym, prm).evaluate(f, g);
}

// ---------------------------------------------------------------------------

namespace {

double main_part(const Nonlinearity& n, const EnergyParams& prm,
                 const Field& f, const Field& g) {
  Field diff = f - g;
  double ds = hs_seminorm(diff, prm.s);
  double l2 = sobolev_norm(diff, 0.0);
  double h4 = sobolev_norm(f, 4.0);
  double amp = 0.0;
  for (const Monomial& m : n.monomials())
    amp += std::pow(h4, static_cast<double>(prm.s) * (m.degree() - 1));
  return 0.5 * ds * ds + 0.5 * l2 * l2 * (1.0 + prm.C_s * amp);
}

}  // namespace

EnergyReport energy_f(const Nonlinearity& n, const DispersionSymbol& sym,
                      const EnergyParams& prm, const Field& f, const Field& g) {
  if (prm.K_corr > f.k_grid())
    throw ConfigError("K_corr exceeds the field band");
  EnergyReport rep;
  rep.e_main = main_part(n, prm, f, g);
  rep.e_corr = correction_term(n, sym, prm, f, g);
  rep.e_total = rep.e_main + rep.e_corr;
  rep.p_value = p_functional(n, f);
  return rep;
}

EnergyReport energy_e(const Nonlinearity& n, const DispersionSymbol& sym,
                      const EnergyParams& prm, const Field& f) {
  return energy_f(n, sym, prm, f, Field(f.k_grid()));
}

double calibrate_cs(const Nonlinearity& n, const DispersionSymbol& sym, int s,
                    int samples, std::uint64_t seed, int K_corr, double C_mh) {
  if (samples < 1) throw ConfigError("calibrate_cs: need samples >= 1");
  EnergyParams prm;
  prm.s = s;
  prm.K_corr = K_corr;
  prm.C_mh = C_mh;
  CorrectionKernel kernel(n, sym, prm);

  std::mt19937_64 rng(seed);
  auto uni = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  const double smooth[3] = {4.0, 8.0, static_cast<double>(s)};

  double needed = 1.0;
  for (int i = 0; i < samples; ++i) {
    double amp_f = std::pow(10.0, -2.0 + 2.5 * uni());
    double amp_g = std::pow(10.0, -2.0 + 2.5 * uni());
    std::uint64_t sf = rng(), sg = rng();
    double off = amp_f * (uni() - 0.5);
    Field f = random_band_field(sf, smooth[i % 3], amp_f, K_corr);
    Field g = random_band_field(sg, smooth[(i + 1) % 3], amp_g, K_corr);
    std::vector<std::complex<double>> fc = f.halfspectrum();
    fc[0] += off;
    f = Field::from_halfspectrum(std::move(fc));

    double I = kernel.evaluate(f, g);
    Field diff = f - g;
    double A = hs_seminorm(diff, s);
    A *= A;
    double B0 = sobolev_norm(diff, 0.0);
    B0 *= B0;
    double h4 = sobolev_norm(f, 4.0);
    double amp = 0.0;
    for (const Monomial& m : n.monomials())
      amp += std::pow(h4, static_cast<double>(s) * (m.degree() - 1));
    double Bc = B0 * amp;

    // F <= X <= 4F with X = A + B0 + C Bc and F = X/2 + I reduces to
    // C Bc >= 2I - A - B0 and C Bc >= -4I - A - B0.
    double lo = std::max(2.0 * I - A - B0, -4.0 * I - A - B0);
    if (lo <= 0.0) continue;
    if (Bc <= 0.0)
      throw CalibrationFailed("degenerate sample with zero weight");
    needed = std::max(needed, lo / Bc);
  }
  double c = 1.0;
  while (c < needed) {
    c *= 2.0;
    if (c > 1.8446744073709552e19)  // 2^64
      throw CalibrationFailed("no admissible C_s up to 2^64");
  }
  return 4.0 * c;
}

ResidualReport energy_residual_report(const Trajectory& traj,
                                      const std::optional<Nonlinearity>& n,
                                      const DispersionSymbol& sym,
                                      const EnergyParams& prm_s,
                                      const EnergyParams& prm_8,
                                      double ceiling) {
  if (traj.frames.size() < 3)
    throw DegenerateTrajectory("residual report needs at least 3 frames");
  const size_t m = traj.frames.size();
  const double r_s =
      n ? static_cast<double>(prm_s.s) * (n->p_max() - 1) : 0.0;

  std::optional<CorrectionKernel> ker_s, ker_8;
  if (n) {
    ker_s.emplace(*n, sym, prm_s);
    ker_8.emplace(*n, sym, prm_8);
  }
  Field zero(traj.frames[0].k_grid());

  auto plain = [&](const EnergyParams& prm, const Field& u) {
    double ds = hs_seminorm(u, prm.s);
    double l2 = sobolev_norm(u, 0.0);
    return 0.5 * ds * ds + 0.5 * l2 * l2;
  };

  std::vector<double> es(m), e8(m), pterm(m);
  for (size_t i = 0; i < m; ++i) {
    const Field& u = traj.frames[i];
    if (n) {
      es[i] = main_part(*n, prm_s, u, zero) + ker_s->evaluate(u, zero);
      e8[i] = main_part(*n, prm_8, u, zero) + ker_8->evaluate(u, zero);
      double dsp1 = hs_seminorm(u, prm_s.s + 1);
      pterm[i] = p_functional(*n, u) * dsp1 * dsp1;
    } else {
      es[i] = plain(prm_s, u);
      e8[i] = plain(prm_8, u);
      pterm[i] = 0.0;
    }
  }

  ResidualReport rep;
  rep.ceiling = ceiling;
  auto deriv3 = [&](size_t i0, size_t i1, size_t i2, size_t at) {
    // Lagrange derivative on three nodes, exact for quadratics.
    double t0 = traj.times[i0], t1 = traj.times[i1], t2 = traj.times[i2];
    double f0 = es[i0], f1 = es[i1], f2 = es[i2];
    double ta = traj.times[at];
    double d0 = (2 * ta - t1 - t2) / ((t0 - t1) * (t0 - t2));
    double d1 = (2 * ta - t0 - t2) / ((t1 - t0) * (t1 - t2));
    double d2 = (2 * ta - t0 - t1) / ((t2 - t0) * (t2 - t1));
    return f0 * d0 + f1 * d1 + f2 * d2;
  };

  for (size_t i = 0; i < m; ++i) {
    double dedt;
    if (i == 0)
      dedt = deriv3(0, 1, 2, 0);
    else if (i == m - 1)
      dedt = deriv3(m - 3, m - 2, m - 1, m - 1);
    else
      dedt = deriv3(i - 1, i, i + 1, i);
    double denom = es[i] * std::pow(1.0 + e8[i], r_s);
    double q = (dedt + pterm[i]) / denom;
    rep.t.push_back(traj.times[i]);
    rep.quotient.push_back(q);
    rep.max_quotient = std::max(rep.max_quotient, q);
    rep.max_abs = std::max(rep.max_abs, std::abs(q));
  }
  rep.below_ceiling = rep.max_quotient <= ceiling;
  return rep;
}

std::string energy_csv(const Trajectory& traj, const Nonlinearity& n,
                       const DispersionSymbol& sym, const EnergyParams& prm) {
  CorrectionKernel kernel(n, sym, prm);
  if (traj.frames.empty()) return "t,e_main,e_corr,e_total,p_value,sob_s,sob_8\n";
  Field zero(traj.frames[0].k_grid());
  std::ostringstream os;
  os.precision(17);
  os << "t,e_main,e_corr,e_total,p_value,sob_s,sob_8\n";
  for (size_t i = 0; i < traj.frames.size(); ++i) {
    const Field& u = traj.frames[i];
    double em = main_part(n, prm, u, zero);
    double ec = kernel.evaluate(u, zero);
    os << traj.times[i] << "," << em << "," << ec << "," << (em + ec) << ","
       << p_functional(n, u) << "," << sobolev_norm(u, prm.s) << ","
       << sobolev_norm(u, 8.0) << "\n";
  }
  return os.str();
}

}  // namespace qlab
