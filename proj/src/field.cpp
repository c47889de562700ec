#include "qlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "qlab/fft.hpp"

namespace qlab {

namespace {
constexpr double kConjTol = 1e-12;

bool close(std::complex<double> a, std::complex<double> b) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= kConjTol * scale;
}
}  // namespace

Field::Field(int k_grid) {
  if (k_grid <= 0) throw std::invalid_argument("Field: k_grid must be positive");
  coef_.assign(k_grid + 1, {0.0, 0.0});
}

Field Field::from_modes(
    int k_grid, std::span<const std::pair<int, std::complex<double>>> entries) {
  Field f(k_grid);
  std::vector<char> seen(k_grid + 1, 0);
  for (const auto& [k, v] : entries) {
    int a = std::abs(k);
    if (a > k_grid)
      throw OutOfBand("mode k=" + std::to_string(k) + " beyond K_grid=" +
                      std::to_string(k_grid));
    std::complex<double> canonical = k >= 0 ? v : std::conj(v);
    if (a == 0 && std::abs(v.imag()) > kConjTol * std::max(1.0, std::abs(v)))
      throw ConjugateConflict("zero mode must be real");
    if (seen[a]) {
      if (!close(f.coef_[a], canonical))
        throw ConjugateConflict("modes k=" + std::to_string(a) + " and k=-" +
                                std::to_string(a) + " are not conjugate");
    } else {
      f.coef_[a] = canonical;
      seen[a] = 1;
    }
  }
  f.coef_[0] = {f.coef_[0].real(), 0.0};
  return f;
}

Field Field::from_halfspectrum(std::vector<std::complex<double>> coef) {
  if (coef.empty()) throw std::invalid_argument("empty half-spectrum");
  coef[0] = {coef[0].real(), 0.0};
  Field f(static_cast<int>(coef.size()) - 1);
  f.coef_ = std::move(coef);
  return f;
}

std::complex<double> Field::mode(int k) const {
  int a = std::abs(k);
  if (a >= static_cast<int>(coef_.size())) return {0.0, 0.0};
  return k >= 0 ? coef_[a] : std::conj(coef_[a]);
}

namespace {
Field combine(const Field& a, const Field& b, double sb) {
  if (a.k_grid() != b.k_grid())
    throw std::invalid_argument("field K_grid mismatch");
  std::vector<std::complex<double>> c = a.halfspectrum();
  for (size_t i = 0; i < c.size(); ++i) c[i] += sb * b.halfspectrum()[i];
  return Field::from_halfspectrum(std::move(c));
}
}  // namespace

Field operator+(const Field& a, const Field& b) { return combine(a, b, 1.0); }
Field operator-(const Field& a, const Field& b) { return combine(a, b, -1.0); }

Field operator*(double c, const Field& f) {
  std::vector<std::complex<double>> v = f.halfspectrum();
  for (auto& x : v) x *= c;
  return Field::from_halfspectrum(std::move(v));
}

Field derivative(const Field& f, int n) {
  if (n < 0) throw std::invalid_argument("derivative order must be >= 0");
  if (n == 0) return f;
  std::vector<std::complex<double>> v = f.halfspectrum();
  // n single-derivative passes, so that derivative(derivative(f,1),1) and
  // derivative(f,2) agree exactly on coefficients.
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < static_cast<int>(v.size()); ++k)
      v[k] = std::complex<double>(-v[k].imag() * k, v[k].real() * k);
  return Field::from_halfspectrum(std::move(v));
}

double sobolev_norm(const Field& f, double s) {
  const auto& c = f.halfspectrum();
  double sum = std::norm(c[0]);
  for (int k = 1; k < static_cast<int>(c.size()); ++k)
    sum += 2.0 * std::pow(1.0 + static_cast<double>(k) * k, s) * std::norm(c[k]);
  return std::sqrt(sum);
}

double hs_seminorm(const Field& f, int n) {
  const auto& c = f.halfspectrum();
  double sum = n == 0 ? std::norm(c[0]) : 0.0;
  for (int k = 1; k < static_cast<int>(c.size()); ++k) {
    double w = 1.0;
    for (int m = 0; m < n; ++m) w *= static_cast<double>(k) * k;
    sum += 2.0 * w * std::norm(c[k]);
  }
  return std::sqrt(sum);
}

Field pointwise_product(const Field& f, const Field& g) {
  if (f.k_grid() != g.k_grid())
    throw std::invalid_argument("field K_grid mismatch");
  const Field factors[2] = {f, g};
  const int powers[2] = {1, 1};
  return detail::dealiased_monomial(std::span<const Field>(factors, 2),
                                    std::span<const int>(powers, 2));
}

double mean(const Field& f) {
  std::complex<double> z = f.halfspectrum()[0];
  if (std::abs(z.imag()) > 1e-12)
    throw NotReal("zero mode has imaginary part " + std::to_string(z.imag()));
  return z.real();
}

double lp_norm(const Field& f, double p, int oversample) {
  int n = fft::good_size(std::max(16, oversample * (f.k_grid() + 1)));
  std::vector<double> v = sample_values(f, n);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  double sum = 0.0;
  for (double x : v) sum += std::pow(std::abs(x), p);
  return std::pow(sum / n, 1.0 / p);
}

Field random_band_field(std::uint64_t seed, double s, double amplitude,
                        int k_grid) {
  if (amplitude <= 0.0)
    throw std::invalid_argument("random_band_field: amplitude must be > 0");
  std::mt19937_64 rng(seed);
  std::vector<std::complex<double>> c(k_grid + 1, {0.0, 0.0});
  for (int k = 1; k <= k_grid; ++k) {
    // engine output mapped to [0,1) directly; distributions are not
    // reproducible across standard libraries
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double phase = 2.0 * M_PI * u;
    double mag = amplitude * std::pow(1.0 + static_cast<double>(k) * k,
                                      -(s + 0.6) / 2.0);
    c[k] = std::polar(mag, phase);
  }
  return Field::from_halfspectrum(std::move(c));
}

std::vector<double> sample_values(const Field& f, int n) {
  return fft::synthesize(f.halfspectrum(), n);
}

Field field_from_samples(std::span<const double> values, int k_grid) {
  auto coef = fft::analyze(values);
  coef.resize(std::min<size_t>(coef.size(), k_grid + 1));
  coef.resize(k_grid + 1, {0.0, 0.0});
  return Field::from_halfspectrum(std::move(coef));
}

std::string to_json(const Field& f) {
  nlohmann::json j;
  j["K_grid"] = f.k_grid();
  nlohmann::json modes = nlohmann::json::array();
  for (int k = 0; k <= f.k_grid(); ++k) {
    std::complex<double> c = f.mode(k);
    if (c != std::complex<double>(0.0, 0.0))
      modes.push_back({k, c.real(), c.imag()});
  }
  j["modes"] = std::move(modes);
  return j.dump();
}

Field field_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int k_grid = j.at("K_grid").get<int>();
  std::vector<std::pair<int, std::complex<double>>> entries;
  for (const auto& row : j.at("modes")) {
    if (!row.is_array() || row.size() != 3)
      throw ParseError("field JSON: each mode must be [k, re, im]");
    entries.emplace_back(row[0].get<int>(),
                         std::complex<double>(row[1].get<double>(),
                                              row[2].get<double>()));
  }
  return Field::from_modes(k_grid, entries);
}

namespace detail {

Field dealiased_monomial(std::span<const Field> factors,
                         std::span<const int> powers) {
  if (factors.empty() || factors.size() != powers.size())
    throw std::invalid_argument("dealiased_monomial: bad arguments");
  const int k_grid = factors[0].k_grid();
  int degree = 0;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].k_grid() != k_grid)
      throw std::invalid_argument("field K_grid mismatch");
    if (powers[i] < 0) throw std::invalid_argument("negative power");
    degree += powers[i];
  }
  if (degree == 0) {
    std::vector<std::complex<double>> one(k_grid + 1, {0.0, 0.0});
    one[0] = 1.0;
    return Field::from_halfspectrum(std::move(one));
  }
  // n > (degree+1)*K_grid keeps every retained mode free of aliasing.
  const int n = fft::good_size((degree + 1) * k_grid + 1);
  std::vector<double> acc(n, 1.0);
  for (size_t i = 0; i < factors.size(); ++i) {
    if (powers[i] == 0) continue;
    std::vector<double> v = sample_values(factors[i], n);
    for (int e = 0; e < powers[i]; ++e)
      for (int m = 0; m < n; ++m) acc[m] *= v[m];
  }
  return field_from_samples(acc, k_grid);
}

}  // namespace detail

}  // namespace qlab
