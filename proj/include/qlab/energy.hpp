#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qlab/dispersion.hpp"
#include "qlab/field.hpp"
#include "qlab/nonlinearity.hpp"
#include "qlab/solver.hpp"

namespace qlab {

struct EnergyParams {
  int s = 8;
  double C_s = 64.0;
  int K_corr = 16;       // lattice truncation of the correction sums
  double C_mh = 4.0;     // constant in the M_H cutoff
  double mh_exponent = 0.8;
};

struct EnergyReport {
  double e_main = 0;
  double e_corr = 0;
  double e_total = 0;
  double p_value = 0;
};

/// Gamma^(p)(M; f_1..f_{p+1}): sum of M(k) prod f^_l(k_l) over zero-sum
/// tuples with every |k_l| <= K_corr. Deterministic pairwise reduction.
std::complex<double> gamma_form(const Multiplier& M,
                                std::span<const Field> fields, int p,
                                int K_corr);

/// Precomputed support and multiplier values of the normal-form correction
/// (ik_p)^{s+1} (ik_{p+1})^{s+1} M_{NR,j} / Phi^(p_j), one list per monomial.
/// The M_H * M_NZ support forces Phi != 0; a hit raises InternalResonanceHit.
class CorrectionKernel {
 public:
  CorrectionKernel(const Nonlinearity& n, const DispersionSymbol& sym,
                   const EnergyParams& prm);

  /// Correction part of F_s: slots (f, ..., f, f-g, f-g).
  double evaluate(const Field& f, const Field& g) const;

  struct Entry {
    std::vector<int> kt;
    std::complex<double> value;
  };
  const std::vector<std::vector<Entry>>& entries() const { return entries_; }
  const std::vector<int>& degrees() const { return degrees_; }

 private:
  std::vector<std::vector<Entry>> entries_;
  std::vector<int> degrees_;
};

/// Correction term of F_s(f, g); real up to roundoff (NotReal guard).
double correction_term(const Nonlinearity& n, const DispersionSymbol& sym,
                       const EnergyParams& prm, const Field& f, const Field& g);

/// F_s(f, g) = 1/2 ||d^s(f-g)||^2 + 1/2 ||f-g||^2 (1 + C_s sum_j
/// ||f||_{H^4}^{s(p_j-1)}) + correction. E_s(f) = F_s(f, 0).
EnergyReport energy_f(const Nonlinearity& n, const DispersionSymbol& sym,
                      const EnergyParams& prm, const Field& f, const Field& g);
EnergyReport energy_e(const Nonlinearity& n, const DispersionSymbol& sym,
                      const EnergyParams& prm, const Field& f);

/// Smallest power-of-two C_s for which the comparison sandwich
///   F_s <= ||d^s(f-g)||^2 + ||f-g||^2 (1 + C_s sum_j ||f||_{H^4}^{s(p_j-1)})
///       <= 4 F_s
/// holds on `samples` random pairs at varied amplitudes, times a safety
/// factor 4. Deterministic per seed.
double calibrate_cs(const Nonlinearity& n, const DispersionSymbol& sym, int s,
                    int samples, std::uint64_t seed, int K_corr = 16,
                    double C_mh = 4.0);

struct ResidualReport {
  std::vector<double> t;
  std::vector<double> quotient;  // (dE_s/dt + P_N ||d^{s+1}u||^2) / denom
  double max_quotient = 0;       // positive part of the largest quotient;
                                 // the inequality only bounds from above
  double max_abs = 0;
  bool below_ceiling = true;
  double ceiling = 0;
};

/// Empirical check of the energy inequality along a trajectory: the quotient
/// against E_s (1 + E_8)^{r(s)} with r(s) = s (p_max - 1), discrete d/dt by
/// centered differences (one-sided second order at the ends). An absent
/// nonlinearity means the linear flow: plain norms, no correction, P = 0.
ResidualReport energy_residual_report(const Trajectory& traj,
                                      const std::optional<Nonlinearity>& n,
                                      const DispersionSymbol& sym,
                                      const EnergyParams& prm_s,
                                      const EnergyParams& prm_8,
                                      double ceiling = 100.0);

/// CSV: t,e_main,e_corr,e_total,p_value,sob_s,sob_8 per frame.
std::string energy_csv(const Trajectory& traj, const Nonlinearity& n,
                       const DispersionSymbol& sym, const EnergyParams& prm);

}  // namespace qlab
