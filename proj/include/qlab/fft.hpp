#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qlab::fft {

/// Real-to-half-complex DFT with the 1/n analysis normalization, so entry k
/// is the Fourier coefficient f^(k) = (1/2pi) int_T f e^{-ikx} dx of the
/// trigonometric interpolant. Output has n/2+1 entries.
std::vector<std::complex<double>> analyze(std::span<const double> samples);

/// Synthesis of n real samples from a half-spectrum (conjugate modes implied).
/// coef may be shorter or longer than n/2+1; out-of-range modes are dropped,
/// which is only valid when they are zero -- callers pad, they never truncate.
std::vector<double> synthesize(std::span<const std::complex<double>> coef, int n);

/// Smallest 2^a 3^b 5^c >= n (FFT-friendly size).
int good_size(int n);

}  // namespace qlab::fft
