#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlab/dispersion.hpp"
#include "qlab/field.hpp"
#include "qlab/nonlinearity.hpp"

namespace qlab {

/// The regularized evolution (d_t + eps d^4 + linear symbol) u = N(u).
/// An absent nonlinearity means the linear flow.
struct Equation {
  DispersionSymbol sym;
  std::optional<Nonlinearity> n;
  double eps = 0.0;
};

/// The t -> -t reduction: negate the odd symbol and the nonlinearity; a
/// backward run of the original equation is a forward run of this one.
Equation transformed(const Equation& eq);

enum class RunStatus { Completed, BlowUpSuspected, NonFiniteAbort };
enum class Scheme { ETDRK4, IFRK4 };

struct FrameDiag {
  double sob4 = 0, sob8 = 0, sob_s = 0;
  double p_value = 0;
  double mean_value = 0;
  double tail_energy = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> frames;
  std::vector<FrameDiag> diag;
  RunStatus status = RunStatus::Completed;
  double used_dt = 0;
  int retries = 0;
  double diag_s = 8.0;
  double tail_s = 8.0;
  int k_split = 0;
};

struct EvolveOptions {
  Scheme scheme = Scheme::ETDRK4;
  int stride = 1;                  // frame every `stride` steps
  double blowup_threshold = 1e6;   // on the H^4 norm
  double diag_s = 8.0;
  double tail_s = 8.0;
  int k_split = -1;                // default K_grid / 2
  int max_retries = 4;             // dt halvings after a non-finite step
};

/// Exact semigroup of the linear part: mode k is multiplied by
/// exp(-eps t k^4 - t phi(k)). BackwardHeat when eps > 0 and t < 0.
Field linear_propagator(const Equation& eq, double t, const Field& f);

Trajectory evolve(const Equation& eq, const Field& phi0, double t_end,
                  double dt, const EvolveOptions& opt = {});

struct PicardResult {
  Trajectory traj;
  int iterations = 0;
  std::vector<double> distances;   // sup-H^4 update sizes per sweep
  double contraction_ratio = 0;    // last observed ratio
};

/// Fixed-point iteration on the Duhamel form of the regularized equation,
/// composite trapezoid on n_quad+1 nodes, started from the linear flow.
PicardResult picard_solve(const Equation& eq, const Field& phi0, double T,
                          int n_quad, double tol, int max_iter);

/// Smoothing operator J_{eta,s}: mode k is damped by exp(-eta <k>^s).
Field bona_smith(const Field& f, double eta, double s);

enum class FamilyVerdict { Converging, Diverging, Inconclusive };

struct FamilyMember {
  double eta = 0;
  RunStatus status = RunStatus::Completed;
  std::string error;  // nonempty when the run threw
  Trajectory traj;
};

struct FamilyReport {
  std::vector<FamilyMember> members;
  std::vector<double> distances;  // consecutive sup-in-time H^{s_dist} gaps
  FamilyVerdict verdict = FamilyVerdict::Inconclusive;
  bool any_blowup = false;
  double rho = 1.3;
  double dist_s = 0;
};

struct FamilyOptions {
  double rho = 1.3;     // required decay factor per eta step for Converging
  double dist_s = -1;   // Sobolev index of the distances; default: family s
  bool parallel = true;
  EvolveOptions evolve;
};

/// Bona-Smith family: for each eta run the equation with eps = eta from
/// J_{eta,s} phi0 and compare consecutive members.
FamilyReport convergence_family(const Equation& tmpl, const Field& phi0,
                                double s, std::span<const double> etas,
                                double t_end, double dt,
                                const FamilyOptions& opt = {});

struct SmoothingRow {
  double t = 0;
  double tail_energy = 0;  // sum_{|k| > k_split} <k>^{2s} |u^(k)|^2
  double p_value = 0;
  bool p_flag = false;     // P_N(u(t)) >= P_N(u(0)) / 2
};

std::vector<SmoothingRow> smoothing_metrics(const Trajectory& traj, double s,
                                            int k_split);

/// CSV: t,sob_4,sob_8,sob_s,p_value,mean,tail_energy
std::string trajectory_csv(const Trajectory& traj);
std::string smoothing_csv(const std::vector<SmoothingRow>& rows);

}  // namespace qlab
