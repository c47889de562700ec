#include "qlab/runio.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qlab/presets.hpp"

namespace qlab {

namespace {

using nlohmann::json;

DispersionSymbol symbol_from_json(const json& j) {
  int order_j = j.at("j").get<int>();
  std::vector<Rational> gammas;
  for (const auto& g : j.at("gammas")) {
    if (g.is_array())
      gammas.emplace_back(g.at(0).get<long long>(), g.at(1).get<long long>());
    else if (g.is_number_integer())
      gammas.emplace_back(g.get<long long>());
    else
      throw ConfigError("symbol gammas must be integers or [num, den] pairs");
  }
  return DispersionSymbol(order_j, std::move(gammas));
}

json symbol_to_json(const DispersionSymbol& sym) {
  json g = json::array();
  for (const Rational& x : sym.gammas) g.push_back({x.num(), x.den()});
  return json{{"j", sym.j}, {"gammas", g}};
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "ETDRK4") return Scheme::ETDRK4;
  if (s == "IFRK4") return Scheme::IFRK4;
  throw ConfigError("unknown scheme '" + s + "'");
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << content;
}

}  // namespace

RunConfig load_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("preset")) cfg.preset_name = j["preset"].get<std::string>();
    if (j.contains("symbol")) cfg.sym = symbol_from_json(j["symbol"]);
    if (j.contains("nonlinearity"))
      cfg.nonlin_expr = j["nonlinearity"].get<std::string>();
    if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("backward")) cfg.backward = j["backward"].get<bool>();

    if (j.contains("initial")) {
      const json& in = j["initial"];
      std::string kind = in.value("type", "modes");
      if (kind == "modes") {
        cfg.initial.kind = RunConfig::Initial::Kind::Modes;
        for (const auto& row : in.at("modes"))
          cfg.initial.modes.emplace_back(
              row.at(0).get<int>(),
              std::complex<double>(row.at(1).get<double>(),
                                   row.size() > 2 ? row.at(2).get<double>()
                                                  : 0.0));
      } else if (kind == "random_band") {
        cfg.initial.kind = RunConfig::Initial::Kind::RandomBand;
        cfg.initial.seed = in.value("seed", 1ULL);
        cfg.initial.band_s = in.value("s", 8.0);
        cfg.initial.amplitude = in.value("amplitude", 0.1);
        cfg.initial.offset = in.value("offset", 0.0);
      } else if (kind == "file") {
        cfg.initial.kind = RunConfig::Initial::Kind::File;
        cfg.initial.path = in.at("path").get<std::string>();
      } else {
        throw ConfigError("unknown initial data type '" + kind + "'");
      }
    }

    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.dt = j.value("dt", cfg.dt);
    cfg.k_grid = j.value("K_grid", cfg.k_grid);
    if (j.contains("scheme"))
      cfg.scheme = scheme_from_string(j["scheme"].get<std::string>());
    cfg.stride = j.value("stride", cfg.stride);
    cfg.blowup_threshold = j.value("blowup_threshold", cfg.blowup_threshold);
    cfg.diag_s = j.value("diag_s", cfg.diag_s);
    cfg.tail_s = j.value("tail_s", cfg.tail_s);
    cfg.k_split = j.value("k_split", cfg.k_split);
    cfg.energy_s = j.value("energy_s", cfg.energy_s);
    cfg.c_s = j.value("C_s", cfg.c_s);
    cfg.calibrate = j.value("calibrate_cs", cfg.calibrate);
    cfg.k_corr = j.value("K_corr", cfg.k_corr);
    cfg.c_mh = j.value("C_mh", cfg.c_mh);
    if (j.contains("eta_list"))
      cfg.eta_list = j["eta_list"].get<std::vector<double>>();
    cfg.family_s = j.value("family_s", cfg.family_s);
    cfg.family_dist_s = j.value("family_dist_s", cfg.family_dist_s);
    cfg.save_frames = j.value("save_frames", cfg.save_frames);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }

  if (!cfg.preset_name && !cfg.sym)
    throw ConfigError("config needs either a preset or an inline symbol");
  if (cfg.eps < 0.0 || cfg.eps > 1.0)
    throw ConfigError("eps must lie in [0, 1]");
  if (cfg.t_end <= 0.0 || cfg.dt <= 0.0)
    throw ConfigError("t_end and dt must be positive");
  if (cfg.k_grid < 4) throw ConfigError("K_grid too small");
  if (cfg.k_corr > cfg.k_grid) throw ConfigError("K_corr must be <= K_grid");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string config_json(const RunConfig& cfg) {
  json j;
  if (cfg.preset_name) j["preset"] = *cfg.preset_name;
  if (cfg.sym) j["symbol"] = symbol_to_json(*cfg.sym);
  if (cfg.nonlin_expr) j["nonlinearity"] = *cfg.nonlin_expr;
  j["eps"] = cfg.eps;
  j["backward"] = cfg.backward;
  json in;
  switch (cfg.initial.kind) {
    case RunConfig::Initial::Kind::Modes: {
      in["type"] = "modes";
      json rows = json::array();
      for (const auto& [k, v] : cfg.initial.modes)
        rows.push_back({k, v.real(), v.imag()});
      in["modes"] = rows;
      break;
    }
    case RunConfig::Initial::Kind::RandomBand:
      in["type"] = "random_band";
      in["seed"] = cfg.initial.seed;
      in["s"] = cfg.initial.band_s;
      in["amplitude"] = cfg.initial.amplitude;
      in["offset"] = cfg.initial.offset;
      break;
    case RunConfig::Initial::Kind::File:
      in["type"] = "file";
      in["path"] = cfg.initial.path;
      break;
  }
  j["initial"] = in;
  j["t_end"] = cfg.t_end;
  j["dt"] = cfg.dt;
  j["K_grid"] = cfg.k_grid;
  j["scheme"] = cfg.scheme == Scheme::ETDRK4 ? "ETDRK4" : "IFRK4";
  j["stride"] = cfg.stride;
  j["blowup_threshold"] = cfg.blowup_threshold;
  j["diag_s"] = cfg.diag_s;
  j["tail_s"] = cfg.tail_s;
  j["k_split"] = cfg.k_split;
  j["energy_s"] = cfg.energy_s;
  j["C_s"] = cfg.c_s;
  j["calibrate_cs"] = cfg.calibrate;
  j["K_corr"] = cfg.k_corr;
  j["C_mh"] = cfg.c_mh;
  if (!cfg.eta_list.empty()) j["eta_list"] = cfg.eta_list;
  j["family_s"] = cfg.family_s;
  j["family_dist_s"] = cfg.family_dist_s;
  j["save_frames"] = cfg.save_frames;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Compact SHA-1 (FIPS 180-1), for the metadata config hash.

std::string sha1_hex(std::string_view data) {
  auto rol = [](uint32_t v, int n) { return (v << n) | (v >> (32 - n)); };
  uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                   0xC3D2E1F0u};
  std::vector<unsigned char> msg(data.begin(), data.end());
  uint64_t bitlen = static_cast<uint64_t>(msg.size()) * 8;
  msg.push_back(0x80);
  while (msg.size() % 64 != 56) msg.push_back(0);
  for (int i = 7; i >= 0; --i)
    msg.push_back(static_cast<unsigned char>(bitlen >> (8 * i)));

  for (size_t off = 0; off < msg.size(); off += 64) {
    uint32_t w[80];
    for (int t = 0; t < 16; ++t)
      w[t] = (msg[off + 4 * t] << 24) | (msg[off + 4 * t + 1] << 16) |
             (msg[off + 4 * t + 2] << 8) | msg[off + 4 * t + 3];
    for (int t = 16; t < 80; ++t)
      w[t] = rol(w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16], 1);
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int t = 0; t < 80; ++t) {
      uint32_t f, kc;
      if (t < 20) {
        f = (b & c) | ((~b) & d);
        kc = 0x5A827999u;
      } else if (t < 40) {
        f = b ^ c ^ d;
        kc = 0x6ED9EBA1u;
      } else if (t < 60) {
        f = (b & c) | (b & d) | (c & d);
        kc = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        kc = 0xCA62C1D6u;
      }
      uint32_t tmp = rol(a, 5) + f + e + kc + w[t];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }
  static const char* hexd = "0123456789abcdef";
  std::string out;
  for (uint32_t v : h)
    for (int i = 7; i >= 0; --i) out += hexd[(v >> (4 * i)) & 0xF];
  return out;
}

Equation equation_from_config(const RunConfig& cfg) {
  Equation eq{DispersionSymbol::pure_power(2), std::nullopt, cfg.eps};
  if (cfg.preset_name) {
    Preset p = preset(*cfg.preset_name);
    eq.sym = p.sym;
    eq.n = p.n;
  }
  if (cfg.sym) eq.sym = *cfg.sym;
  if (cfg.nonlin_expr) eq.n = parse_nonlinearity(*cfg.nonlin_expr);
  if (cfg.backward) eq = transformed(eq);
  return eq;
}

Field initial_from_config(const RunConfig& cfg) {
  switch (cfg.initial.kind) {
    case RunConfig::Initial::Kind::Modes:
      return Field::from_modes(cfg.k_grid, cfg.initial.modes);
    case RunConfig::Initial::Kind::RandomBand: {
      Field f = random_band_field(cfg.initial.seed, cfg.initial.band_s,
                                  cfg.initial.amplitude, cfg.k_grid);
      if (cfg.initial.offset != 0.0) {
        auto v = f.halfspectrum();
        v[0] += cfg.initial.offset;
        f = Field::from_halfspectrum(std::move(v));
      }
      return f;
    }
    case RunConfig::Initial::Kind::File: {
      std::ifstream in(cfg.initial.path, std::ios::binary);
      if (!in) throw ConfigError("cannot read field file " + cfg.initial.path);
      std::stringstream ss;
      ss << in.rdbuf();
      return field_from_json(ss.str());
    }
  }
  throw ConfigError("unreachable initial kind");
}

namespace {

EvolveOptions evolve_options(const RunConfig& cfg) {
  EvolveOptions opt;
  opt.scheme = cfg.scheme;
  opt.stride = cfg.stride;
  opt.blowup_threshold = cfg.blowup_threshold;
  opt.diag_s = cfg.diag_s;
  opt.tail_s = cfg.tail_s;
  opt.k_split = cfg.k_split;
  return opt;
}

json metadata_json(const RunConfig& cfg, const Equation& eq,
                   const Trajectory& traj) {
  std::string echo = config_json(cfg);
  json meta;
  meta["config"] = json::parse(echo);
  meta["config_hash"] = sha1_hex(echo);
  json equation;
  equation["symbol"] = symbol_to_json(eq.sym);
  equation["eps"] = eq.eps;
  if (eq.n) {
    equation["nonlinearity"] = json::parse(to_json(*eq.n));
    equation["classification"] =
        classify(*eq.n) == ResonanceType::NonParabolic ? "non-parabolic"
                                                       : "parabolic";
    equation["conserves_mean"] = conserves_mean(*eq.n);
  }
  meta["equation"] = equation;
  meta["status"] = traj.status == RunStatus::Completed        ? "completed"
                   : traj.status == RunStatus::BlowUpSuspected ? "blowup_suspected"
                                                               : "nonfinite";
  meta["used_dt"] = traj.used_dt;
  meta["retries"] = traj.retries;
  meta["frames"] = traj.frames.size();
  return meta;
}

void write_frame_snapshots(const std::filesystem::path& dir,
                           const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  for (size_t i = 0; i < traj.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.json", i);
    json j = json::parse(to_json(traj.frames[i]));
    j["t"] = traj.times[i];
    write_file(dir / name, j.dump() + "\n");
  }
}

int status_code(RunStatus st) {
  switch (st) {
    case RunStatus::Completed: return 0;
    case RunStatus::BlowUpSuspected: return 3;
    case RunStatus::NonFiniteAbort: return 4;
  }
  return 4;
}

}  // namespace

SimulateOutcome run_simulate(const RunConfig& cfg) {
  Equation eq = equation_from_config(cfg);
  Field phi0 = initial_from_config(cfg);
  std::filesystem::create_directories(cfg.output_dir);

  Trajectory traj = evolve(eq, phi0, cfg.t_end, cfg.dt, evolve_options(cfg));
  int k_split = cfg.k_split >= 0 ? cfg.k_split : cfg.k_grid / 2;

  write_file(std::filesystem::path(cfg.output_dir) / "trajectory.csv",
             trajectory_csv(traj));
  write_file(std::filesystem::path(cfg.output_dir) / "smoothing.csv",
             smoothing_csv(smoothing_metrics(traj, cfg.tail_s, k_split)));

  if (!cfg.eta_list.empty()) {
    FamilyOptions fopt;
    fopt.evolve = evolve_options(cfg);
    fopt.dist_s = cfg.family_dist_s;
    FamilyReport rep = convergence_family(eq, phi0, cfg.family_s, cfg.eta_list,
                                          cfg.t_end, cfg.dt, fopt);
    std::ostringstream os;
    os.precision(17);
    os << "eta,status,distance_to_next\n";
    for (size_t i = 0; i < rep.members.size(); ++i) {
      os << rep.members[i].eta << ","
         << (rep.members[i].status == RunStatus::Completed ? "completed"
                                                           : "failed")
         << ",";
      if (i < rep.distances.size()) os << rep.distances[i];
      os << "\n";
    }
    os << "# verdict,"
       << (rep.verdict == FamilyVerdict::Converging    ? "converging"
           : rep.verdict == FamilyVerdict::Diverging   ? "diverging"
                                                        : "inconclusive")
       << ",any_blowup," << (rep.any_blowup ? 1 : 0) << "\n";
    write_file(std::filesystem::path(cfg.output_dir) / "family.csv", os.str());
  }

  if (cfg.save_frames)
    write_frame_snapshots(std::filesystem::path(cfg.output_dir) / "frames",
                          traj);

  json meta = metadata_json(cfg, eq, traj);
  write_file(std::filesystem::path(cfg.output_dir) / "metadata.json",
             meta.dump(2) + "\n");

  SimulateOutcome out;
  out.status = traj.status;
  out.exit_code = status_code(traj.status);
  out.output_dir = cfg.output_dir;
  return out;
}

SimulateOutcome run_energy_check(const RunConfig& cfg) {
  Equation eq = equation_from_config(cfg);
  if (!eq.n)
    throw ConfigError("energy-check needs a nonlinearity");
  Field phi0 = initial_from_config(cfg);
  std::filesystem::create_directories(cfg.output_dir);

  Trajectory traj = evolve(eq, phi0, cfg.t_end, cfg.dt, evolve_options(cfg));

  EnergyParams prm_s, prm_8;
  prm_s.s = cfg.energy_s;
  prm_s.K_corr = cfg.k_corr;
  prm_s.C_mh = cfg.c_mh;
  prm_8 = prm_s;
  prm_8.s = 8;
  if (cfg.calibrate) {
    prm_s.C_s = calibrate_cs(*eq.n, eq.sym, prm_s.s, 200, 7, cfg.k_corr,
                             cfg.c_mh);
    prm_8.C_s = calibrate_cs(*eq.n, eq.sym, 8, 200, 7, cfg.k_corr, cfg.c_mh);
  } else {
    prm_s.C_s = cfg.c_s;
    prm_8.C_s = cfg.c_s;
  }

  write_file(std::filesystem::path(cfg.output_dir) / "energy.csv",
             energy_csv(traj, *eq.n, eq.sym, prm_s));

  ResidualReport rep =
      energy_residual_report(traj, *eq.n, eq.sym, prm_s, prm_8);
  json rj;
  rj["max_quotient"] = rep.max_quotient;
  rj["max_abs_quotient"] = rep.max_abs;
  rj["below_ceiling"] = rep.below_ceiling;
  rj["ceiling"] = rep.ceiling;
  rj["C_s"] = prm_s.C_s;
  write_file(std::filesystem::path(cfg.output_dir) / "residual.json",
             rj.dump(2) + "\n");

  json meta = metadata_json(cfg, eq, traj);
  write_file(std::filesystem::path(cfg.output_dir) / "metadata.json",
             meta.dump(2) + "\n");

  SimulateOutcome out;
  out.status = traj.status;
  out.exit_code = status_code(traj.status);
  out.output_dir = cfg.output_dir;
  return out;
}

}  // namespace qlab
