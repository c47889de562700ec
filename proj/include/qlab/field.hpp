#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qlab/errors.hpp"

namespace qlab {

inline constexpr int kDefaultKGrid = 128;

/// Real-valued 2pi-periodic function in spectral form.
///
/// Stores the coefficients u^(k) for k = 0..K_grid under the analysis
/// convention u^(k) = (1/2pi) int_T u e^{-ikx} dx; negative modes are implied
/// by conjugate symmetry, which therefore holds by construction. Coefficients
/// beyond the band are identically zero. Immutable after construction.
class Field {
 public:
  explicit Field(int k_grid = kDefaultKGrid);

  /// Build from (k, coefficient) entries, k of either sign. Missing conjugate
  /// partners are filled in; inconsistent pairs raise ConjugateConflict and
  /// |k| > k_grid raises OutOfBand.
  static Field from_modes(
      int k_grid,
      std::span<const std::pair<int, std::complex<double>>> entries);

  /// Adopt a half-spectrum directly (k_grid = coef.size()-1). The k=0 entry
  /// must be real up to roundoff.
  static Field from_halfspectrum(std::vector<std::complex<double>> coef);

  int k_grid() const { return static_cast<int>(coef_.size()) - 1; }

  /// u^(k) for any k; conjugate for k < 0, zero beyond the band.
  std::complex<double> mode(int k) const;

  const std::vector<std::complex<double>>& halfspectrum() const { return coef_; }

 private:
  std::vector<std::complex<double>> coef_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double c, const Field& f);

/// Spectral derivative: mode k picks up (ik)^n.
Field derivative(const Field& f, int n);

/// (sum_k <k>^{2s} |u^(k)|^2)^{1/2} with <k> = (1+k^2)^{1/2}.
double sobolev_norm(const Field& f, double s);

/// Homogeneous seminorm ||d^n f||_{L2} = (sum_k k^{2n} |u^(k)|^2)^{1/2}.
double hs_seminorm(const Field& f, int n);

/// Exact dealiased product of two band-limited fields, re-truncated to the
/// common K_grid. Retained modes are exact (factor-3 zero padding).
Field pointwise_product(const Field& f, const Field& g);

/// (1/2pi) int_T f dx = Re u^(0). NotReal if the stored zero mode has an
/// imaginary part above 1e-12.
double mean(const Field& f);

/// ((1/2pi) int |f|^p)^{1/p} on an oversampled grid; p = inf gives sup|f|.
double lp_norm(const Field& f, double p, int oversample = 8);

/// Deterministic band-limited sample: |u^(k)| = amplitude <k>^{-s-0.6} with
/// uniform random phases, zero mean, conjugate-symmetric.
Field random_band_field(std::uint64_t seed, double s, double amplitude,
                        int k_grid = kDefaultKGrid);

/// Values on the uniform n-point grid x_m = 2pi m / n.
std::vector<double> sample_values(const Field& f, int n);

/// Analyze samples and truncate to k_grid. Aliasing is the caller's concern.
Field field_from_samples(std::span<const double> values, int k_grid);

/// {"K_grid": int, "modes": [[k, re, im], ...]} with k >= 0 only.
std::string to_json(const Field& f);
Field field_from_json(const std::string& text);

namespace detail {
/// Evaluate a monomial product prod_i factor_i^{e_i} of band-limited fields
/// exactly: one shared physical grid of at least (total degree + 1) * K_grid
/// points, pointwise powers, one analysis, truncation to K_grid.
Field dealiased_monomial(std::span<const Field> factors, std::span<const int> powers);
}  // namespace detail

}  // namespace qlab
