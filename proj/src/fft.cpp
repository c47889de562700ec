#include "qlab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace qlab::fft {
namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
// Each thread keeps its own plans and buffers, creation is serialized.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanSet {
  int n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit PlanSet(int n_) : n(n_) {
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    r2c = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  }
  ~PlanSet() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(cplx);
  }
  PlanSet(const PlanSet&) = delete;
  PlanSet& operator=(const PlanSet&) = delete;
};

PlanSet& plans_for(int n) {
  thread_local std::unordered_map<int, std::unique_ptr<PlanSet>> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<PlanSet>(n)).first;
  return *it->second;
}

}  // namespace

std::vector<std::complex<double>> analyze(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  if (n <= 0) throw std::invalid_argument("fft::analyze: empty input");
  PlanSet& p = plans_for(n);
  std::memcpy(p.real, samples.data(), sizeof(double) * n);
  fftw_execute(p.r2c);
  std::vector<std::complex<double>> out(n / 2 + 1);
  const double inv = 1.0 / n;
  for (int k = 0; k <= n / 2; ++k)
    out[k] = std::complex<double>(p.cplx[k][0] * inv, p.cplx[k][1] * inv);
  return out;
}

std::vector<double> synthesize(std::span<const std::complex<double>> coef, int n) {
  if (n <= 0) throw std::invalid_argument("fft::synthesize: n <= 0");
  PlanSet& p = plans_for(n);
  const int half = n / 2 + 1;
  for (int k = 0; k < half; ++k) {
    std::complex<double> c =
        k < static_cast<int>(coef.size()) ? coef[k] : std::complex<double>(0.0);
    p.cplx[k][0] = c.real();
    p.cplx[k][1] = c.imag();
  }
  fftw_execute(p.c2r);
  return std::vector<double>(p.real, p.real + n);
}

int good_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace qlab::fft
