#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlab/energy.hpp"
#include "qlab/solver.hpp"

namespace qlab {

/// One experiment: equation (preset or inline), initial data, horizons,
/// truncations and output location. Loaded from JSON; every field has a
/// default, and the fully resolved config is echoed into the run metadata.
struct RunConfig {
  // equation
  std::optional<std::string> preset_name;
  std::optional<DispersionSymbol> sym;   // inline symbol
  std::optional<std::string> nonlin_expr;
  double eps = 0.0;
  bool backward = false;  // run the t -> -t transformed equation forward

  // initial data
  struct Initial {
    enum class Kind { Modes, RandomBand, File } kind = Kind::Modes;
    std::vector<std::pair<int, std::complex<double>>> modes;
    std::uint64_t seed = 1;
    double band_s = 8.0;
    double amplitude = 0.1;
    double offset = 0.0;
    std::string path;
  } initial;

  // run parameters
  double t_end = 0.05;
  double dt = 1e-4;
  int k_grid = kDefaultKGrid;
  Scheme scheme = Scheme::ETDRK4;
  int stride = 10;
  double blowup_threshold = 1e6;
  double diag_s = 8.0;
  double tail_s = 8.0;
  int k_split = -1;

  // energy knobs
  int energy_s = 8;
  double c_s = 64.0;
  bool calibrate = false;  // derive C_s by calibration instead
  int k_corr = 16;
  double c_mh = 4.0;

  // family runs
  std::vector<double> eta_list;
  double family_s = 8.0;
  double family_dist_s = -1.0;  // distance norm index; default family_s

  bool save_frames = false;  // per-frame Field JSON snapshots
  std::string output_dir = "out";
};

RunConfig load_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Canonical JSON echo of a fully resolved config (defaults filled in).
std::string config_json(const RunConfig& cfg);

/// SHA-1 hex digest, used as the run's config hash.
std::string sha1_hex(std::string_view data);

Equation equation_from_config(const RunConfig& cfg);
Field initial_from_config(const RunConfig& cfg);

struct SimulateOutcome {
  int exit_code = 0;  // 0 ok, 3 blow-up suspected, 4 non-finite
  RunStatus status = RunStatus::Completed;
  std::string output_dir;
};

/// Run the configured evolution and write trajectory.csv, smoothing.csv and
/// metadata.json (plus family.csv when eta_list is set) under output_dir.
SimulateOutcome run_simulate(const RunConfig& cfg);

/// Run the evolution and write energy.csv plus residual.json.
SimulateOutcome run_energy_check(const RunConfig& cfg);

}  // namespace qlab
