#include "qlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <sstream>

namespace qlab {

namespace {

using cvec = std::vector<std::complex<double>>;

cvec symbol_sigma(const Equation& eq, int k_grid) {
  cvec s(k_grid + 1);
  for (int k = 0; k <= k_grid; ++k) {
    double k4 = static_cast<double>(k) * k * k * k;
    s[k] = std::complex<double>(-eq.eps * k4, 0.0) - phi_symbol(eq.sym, k);
  }
  return s;
}

bool finite(const cvec& v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

cvec nonlinear_rhs(const Equation& eq, const cvec& u) {
  if (!eq.n) return cvec(u.size(), {0.0, 0.0});
  Field f = Field::from_halfspectrum(u);
  return evaluate(*eq.n, f).halfspectrum();
}

double h4_norm(const cvec& u) {
  double sum = std::norm(u[0]);
  for (int k = 1; k < static_cast<int>(u.size()); ++k) {
    double w = std::pow(1.0 + static_cast<double>(k) * k, 4.0);
    sum += 2.0 * w * std::norm(u[k]);
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// ETDRK4 coefficient functions, evaluated by the standard contour trick near
// the removable singularity at z = 0 (mean over a unit circle keeps every
// evaluation point away from the origin).

std::complex<double> fn_q(std::complex<double> z) {
  return (std::exp(0.5 * z) - 1.0) / z;
}
std::complex<double> fn_f1(std::complex<double> z) {
  return (-4.0 - z + std::exp(z) * (4.0 - 3.0 * z + z * z)) / (z * z * z);
}
std::complex<double> fn_f2(std::complex<double> z) {
  return (2.0 + z + std::exp(z) * (-2.0 + z)) / (z * z * z);
}
std::complex<double> fn_f3(std::complex<double> z) {
  return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / (z * z * z);
}

template <typename F>
std::complex<double> contour_eval(F f, std::complex<double> z) {
  if (std::abs(z) > 0.5) return f(z);
  constexpr int M = 32;
  std::complex<double> acc = 0.0;
  for (int m = 0; m < M; ++m) {
    double th = 2.0 * M_PI * (m + 0.5) / M;
    acc += f(z + std::polar(1.0, th));
  }
  return acc / static_cast<double>(M);
}

struct Etdrk4 {
  cvec E, E2, Q, F1, F2, F3;

  Etdrk4(const cvec& sigma, double dt) {
    const size_t n = sigma.size();
    E.resize(n);
    E2.resize(n);
    Q.resize(n);
    F1.resize(n);
    F2.resize(n);
    F3.resize(n);
    for (size_t k = 0; k < n; ++k) {
      std::complex<double> z = dt * sigma[k];
      E[k] = std::exp(z);
      E2[k] = std::exp(0.5 * z);
      Q[k] = dt * contour_eval(fn_q, z);
      F1[k] = dt * contour_eval(fn_f1, z);
      F2[k] = dt * contour_eval(fn_f2, z);
      F3[k] = dt * contour_eval(fn_f3, z);
    }
  }

  void step(const Equation& eq, cvec& v) const {
    const size_t n = v.size();
    cvec nv = nonlinear_rhs(eq, v);
    cvec a(n), b(n), c(n);
    for (size_t k = 0; k < n; ++k) a[k] = E2[k] * v[k] + Q[k] * nv[k];
    cvec na = nonlinear_rhs(eq, a);
    for (size_t k = 0; k < n; ++k) b[k] = E2[k] * v[k] + Q[k] * na[k];
    cvec nb = nonlinear_rhs(eq, b);
    for (size_t k = 0; k < n; ++k)
      c[k] = E2[k] * a[k] + Q[k] * (2.0 * nb[k] - nv[k]);
    cvec nc = nonlinear_rhs(eq, c);
    for (size_t k = 0; k < n; ++k)
      v[k] = E[k] * v[k] + F1[k] * nv[k] + 2.0 * F2[k] * (na[k] + nb[k]) +
             F3[k] * nc[k];
  }
};

struct Ifrk4 {
  cvec E, E2;
  double dt;

  Ifrk4(const cvec& sigma, double dt_) : dt(dt_) {
    E.resize(sigma.size());
    E2.resize(sigma.size());
    for (size_t k = 0; k < sigma.size(); ++k) {
      E[k] = std::exp(dt * sigma[k]);
      E2[k] = std::exp(0.5 * dt * sigma[k]);
    }
  }

  void step(const Equation& eq, cvec& v) const {
    const size_t n = v.size();
    cvec k1 = nonlinear_rhs(eq, v);
    cvec u2(n);
    for (size_t k = 0; k < n; ++k)
      u2[k] = E2[k] * (v[k] + 0.5 * dt * k1[k]);
    cvec k2 = nonlinear_rhs(eq, u2);
    cvec u3(n);
    for (size_t k = 0; k < n; ++k) u3[k] = E2[k] * v[k] + 0.5 * dt * k2[k];
    cvec k3 = nonlinear_rhs(eq, u3);
    cvec u4(n);
    for (size_t k = 0; k < n; ++k)
      u4[k] = E[k] * v[k] + dt * E2[k] * k3[k];
    cvec k4 = nonlinear_rhs(eq, u4);
    for (size_t k = 0; k < n; ++k)
      v[k] = E[k] * v[k] +
             dt / 6.0 *
                 (E[k] * k1[k] + 2.0 * E2[k] * (k2[k] + k3[k]) + k4[k]);
  }
};

FrameDiag make_diag(const Equation& eq, const Field& u, double diag_s,
                    double tail_s, int k_split) {
  FrameDiag d;
  d.sob4 = sobolev_norm(u, 4.0);
  d.sob8 = sobolev_norm(u, 8.0);
  d.sob_s = sobolev_norm(u, diag_s);
  d.p_value = eq.n ? p_functional(*eq.n, u) : 0.0;
  d.mean_value = u.halfspectrum()[0].real();
  double tail = 0.0;
  const auto& c = u.halfspectrum();
  for (int k = k_split + 1; k < static_cast<int>(c.size()); ++k)
    tail += 2.0 * std::pow(1.0 + static_cast<double>(k) * k, tail_s) *
            std::norm(c[k]);
  d.tail_energy = tail;
  return d;
}

}  // namespace

Equation transformed(const Equation& eq) {
  Equation r{eq.sym.negated(),
             eq.n ? std::optional<Nonlinearity>(eq.n->negated()) : std::nullopt,
             eq.eps};
  return r;
}

Field linear_propagator(const Equation& eq, double t, const Field& f) {
  if (eq.eps > 0.0 && t < 0.0)
    throw BackwardHeat("backward evolution of the heat part is ill-posed");
  cvec v = f.halfspectrum();
  for (int k = 0; k < static_cast<int>(v.size()); ++k) {
    double k4 = static_cast<double>(k) * k * k * k;
    std::complex<double> z =
        std::complex<double>(-eq.eps * t * k4, 0.0) - t * phi_symbol(eq.sym, k);
    v[k] *= std::exp(z);
  }
  return Field::from_halfspectrum(std::move(v));
}

Trajectory evolve(const Equation& eq, const Field& phi0, double t_end,
                  double dt, const EvolveOptions& opt) {
  if (dt <= 0.0 || t_end <= 0.0)
    throw ConfigError("evolve: need dt > 0 and t_end > 0");
  if (eq.eps < 0.0) throw ConfigError("evolve: eps must be >= 0");
  const int k_grid = phi0.k_grid();
  const int k_split = opt.k_split >= 0 ? opt.k_split : k_grid / 2;

  for (int attempt = 0;; ++attempt) {
    const double h = dt / static_cast<double>(1 << attempt);
    const double ratio = t_end / h;
    long long n_steps = std::llround(ratio);
    if (n_steps < 1 || std::abs(n_steps * h - t_end) > 1e-9 * t_end)
      n_steps = static_cast<long long>(std::floor(ratio)) + 1;
    const double h_last = t_end - static_cast<double>(n_steps - 1) * h;
    const long long stride =
        std::max<long long>(1, static_cast<long long>(opt.stride) << attempt);

    cvec sigma = symbol_sigma(eq, k_grid);
    Etdrk4 et(sigma, h);
    Ifrk4 if4(sigma, h);

    Trajectory traj;
    traj.used_dt = h;
    traj.retries = attempt;
    traj.diag_s = opt.diag_s;
    traj.tail_s = opt.tail_s;
    traj.k_split = k_split;

    cvec u = phi0.halfspectrum();
    auto emit = [&](double t, const cvec& modes) {
      Field f = Field::from_halfspectrum(modes);
      traj.times.push_back(t);
      traj.diag.push_back(make_diag(eq, f, opt.diag_s, opt.tail_s, k_split));
      traj.frames.push_back(std::move(f));
    };
    emit(0.0, u);

    bool bad_step = false;
    for (long long step = 1; step <= n_steps; ++step) {
      const bool last = step == n_steps;
      if (last && std::abs(h_last - h) > 1e-12 * h) {
        // Short closing step with its own coefficients.
        if (h_last > 1e-14) {
          if (opt.scheme == Scheme::ETDRK4)
            Etdrk4(sigma, h_last).step(eq, u);
          else
            Ifrk4(sigma, h_last).step(eq, u);
        }
      } else {
        if (opt.scheme == Scheme::ETDRK4)
          et.step(eq, u);
        else
          if4.step(eq, u);
      }
      if (!finite(u)) {
        bad_step = true;
        break;
      }
      const double t = last ? t_end : static_cast<double>(step) * h;
      if (step % stride == 0 || last) emit(t, u);
      if (h4_norm(u) > opt.blowup_threshold) {
        if (step % stride != 0 && !last) emit(t, u);
        traj.status = RunStatus::BlowUpSuspected;
        return traj;
      }
    }
    if (!bad_step) return traj;
    if (attempt >= opt.max_retries) {
      traj.status = RunStatus::NonFiniteAbort;
      return traj;
    }
  }
}

PicardResult picard_solve(const Equation& eq, const Field& phi0, double T,
                          int n_quad, double tol, int max_iter) {
  if (eq.eps <= 0.0)
    throw ConfigError("picard_solve: the contraction needs eps > 0");
  if (T <= 0.0 || n_quad < 1 || tol <= 0.0 || max_iter < 1)
    throw ConfigError("picard_solve: bad arguments");
  const int k_grid = phi0.k_grid();
  const int n = n_quad;
  const double h = T / n;

  cvec sigma = symbol_sigma(eq, k_grid);
  // Exact semigroup at node distances.
  std::vector<cvec> U(n + 1, cvec(k_grid + 1));
  for (int d = 0; d <= n; ++d)
    for (int k = 0; k <= k_grid; ++k)
      U[d][k] = std::exp(static_cast<double>(d) * h * sigma[k]);

  const cvec& phi = phi0.halfspectrum();
  std::vector<cvec> cur(n + 1, cvec(k_grid + 1));
  for (int i = 0; i <= n; ++i)
    for (int k = 0; k <= k_grid; ++k) cur[i][k] = U[i][k] * phi[k];

  PicardResult res;
  int stall = 0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<cvec> rhs(n + 1);
    for (int i = 0; i <= n; ++i) rhs[i] = nonlinear_rhs(eq, cur[i]);

    std::vector<cvec> next(n + 1, cvec(k_grid + 1));
    next[0] = cur[0];
    for (int i = 1; i <= n; ++i) {
      cvec acc(k_grid + 1, {0.0, 0.0});
      for (int jn = 0; jn <= i; ++jn) {
        double w = (jn == 0 || jn == i) ? 0.5 : 1.0;
        const cvec& prop = U[i - jn];
        for (int k = 0; k <= k_grid; ++k) acc[k] += w * prop[k] * rhs[jn][k];
      }
      for (int k = 0; k <= k_grid; ++k)
        next[i][k] = U[i][k] * phi[k] + h * acc[k];
    }

    double dist = 0.0;
    for (int i = 0; i <= n; ++i) {
      cvec diff(k_grid + 1);
      for (int k = 0; k <= k_grid; ++k) diff[k] = next[i][k] - cur[i][k];
      dist = std::max(dist, h4_norm(diff));
    }
    cur = std::move(next);
    res.iterations = it;
    if (!res.distances.empty() && res.distances.back() > 0.0) {
      res.contraction_ratio = dist / res.distances.back();
      stall = res.contraction_ratio >= 1.0 ? stall + 1 : 0;
      if (stall >= 3)
        throw NoContraction("picard iteration is not contracting");
    }
    res.distances.push_back(dist);
    if (dist < tol) break;
    if (it == max_iter)
      throw MaxIterExceeded("picard iteration did not reach tolerance");
  }

  Trajectory traj;
  traj.used_dt = h;
  traj.diag_s = 8.0;
  traj.tail_s = 8.0;
  traj.k_split = k_grid / 2;
  for (int i = 0; i <= n; ++i) {
    Field f = Field::from_halfspectrum(cur[i]);
    traj.times.push_back(i * h);
    traj.diag.push_back(make_diag(eq, f, 8.0, 8.0, k_grid / 2));
    traj.frames.push_back(std::move(f));
  }
  res.traj = std::move(traj);
  return res;
}

Field bona_smith(const Field& f, double eta, double s) {
  if (eta <= 0.0 || eta > 1.0)
    throw ConfigError("bona_smith: eta must lie in (0, 1]");
  cvec v = f.halfspectrum();
  for (int k = 0; k < static_cast<int>(v.size()); ++k) {
    double bracket = std::pow(1.0 + static_cast<double>(k) * k, s / 2.0);
    v[k] *= std::exp(-eta * bracket);
  }
  return Field::from_halfspectrum(std::move(v));
}

FamilyReport convergence_family(const Equation& tmpl, const Field& phi0,
                                double s, std::span<const double> etas,
                                double t_end, double dt,
                                const FamilyOptions& opt) {
  if (etas.size() < 2)
    throw ConfigError("convergence_family: need at least two etas");
  for (size_t i = 0; i + 1 < etas.size(); ++i)
    if (!(etas[i] > etas[i + 1]))
      throw ConfigError("convergence_family: etas must be strictly decreasing");

  FamilyReport rep;
  rep.rho = opt.rho;
  rep.dist_s = opt.dist_s > 0 ? opt.dist_s : s;
  rep.members.resize(etas.size());

  auto run_member = [&](size_t i) {
    FamilyMember m;
    m.eta = etas[i];
    try {
      Equation eq = tmpl;
      eq.eps = etas[i];
      Field data = bona_smith(phi0, etas[i], s);
      m.traj = evolve(eq, data, t_end, dt, opt.evolve);
      m.status = m.traj.status;
    } catch (const std::exception& e) {
      m.status = RunStatus::NonFiniteAbort;
      m.error = e.what();
    }
    return m;
  };

  if (opt.parallel) {
    std::vector<std::future<FamilyMember>> futs;
    futs.reserve(etas.size());
    for (size_t i = 0; i < etas.size(); ++i)
      futs.push_back(std::async(std::launch::async, run_member, i));
    for (size_t i = 0; i < etas.size(); ++i) rep.members[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < etas.size(); ++i) rep.members[i] = run_member(i);
  }

  for (const FamilyMember& m : rep.members)
    rep.any_blowup |= m.status != RunStatus::Completed;

  // Consecutive sup-in-time distances over pairs of complete runs.
  for (size_t i = 0; i + 1 < rep.members.size(); ++i) {
    const FamilyMember& a = rep.members[i];
    const FamilyMember& b = rep.members[i + 1];
    if (a.status != RunStatus::Completed || b.status != RunStatus::Completed) {
      rep.distances.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    size_t nframes = std::min(a.traj.frames.size(), b.traj.frames.size());
    double d = 0.0;
    for (size_t f = 0; f < nframes; ++f)
      d = std::max(d, sobolev_norm(a.traj.frames[f] - b.traj.frames[f],
                                   rep.dist_s));
    rep.distances.push_back(d);
  }

  int valid = 0;
  bool conv = true, div = true;
  for (size_t i = 0; i + 1 < rep.distances.size(); ++i) {
    double d0 = rep.distances[i], d1 = rep.distances[i + 1];
    if (std::isnan(d0) || std::isnan(d1)) continue;
    ++valid;
    conv &= d1 * opt.rho <= d0;
    div &= d1 >= 2.0 * d0;
  }
  if (valid == 0)
    rep.verdict = FamilyVerdict::Inconclusive;
  else if (conv)
    rep.verdict = FamilyVerdict::Converging;
  else if (div)
    rep.verdict = FamilyVerdict::Diverging;
  else
    rep.verdict = FamilyVerdict::Inconclusive;
  return rep;
}

std::vector<SmoothingRow> smoothing_metrics(const Trajectory& traj, double s,
                                            int k_split) {
  std::vector<SmoothingRow> rows;
  if (traj.frames.empty()) return rows;
  const double p0 = traj.diag.front().p_value;
  for (size_t i = 0; i < traj.frames.size(); ++i) {
    SmoothingRow r;
    r.t = traj.times[i];
    const auto& c = traj.frames[i].halfspectrum();
    double tail = 0.0;
    for (int k = k_split + 1; k < static_cast<int>(c.size()); ++k)
      tail += 2.0 * std::pow(1.0 + static_cast<double>(k) * k, s) *
              std::norm(c[k]);
    r.tail_energy = tail;
    r.p_value = traj.diag[i].p_value;
    r.p_flag = r.p_value >= 0.5 * p0;
    rows.push_back(r);
  }
  return rows;
}

namespace {
void put(std::ostringstream& os, double v) {
  os.precision(17);
  os << v;
}
}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,sob_4,sob_8,sob_s,p_value,mean,tail_energy\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const FrameDiag& d = traj.diag[i];
    put(os, traj.times[i]);
    os << ",";
    put(os, d.sob4);
    os << ",";
    put(os, d.sob8);
    os << ",";
    put(os, d.sob_s);
    os << ",";
    put(os, d.p_value);
    os << ",";
    put(os, d.mean_value);
    os << ",";
    put(os, d.tail_energy);
    os << "\n";
  }
  return os.str();
}

std::string smoothing_csv(const std::vector<SmoothingRow>& rows) {
  std::ostringstream os;
  os << "t,tail_energy,p_value,p_flag\n";
  for (const SmoothingRow& r : rows) {
    put(os, r.t);
    os << ",";
    put(os, r.tail_energy);
    os << ",";
    put(os, r.p_value);
    os << "," << (r.p_flag ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace qlab
