#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlab/qlab.hpp"

namespace {

using namespace qlab;

double env_budget(double fallback) {
  const char* v = std::getenv("QT_BUDGET");
  if (!v) return fallback;
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    return fallback;
  }
}

DispersionSymbol symbol_from_flags(int j, const std::string& gammas_csv) {
  if (gammas_csv.empty()) return DispersionSymbol::pure_power(j);
  std::vector<Rational> g;
  std::stringstream ss(gammas_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto slash = tok.find('/');
    if (slash == std::string::npos)
      g.emplace_back(std::stoll(tok));
    else
      g.emplace_back(std::stoll(tok.substr(0, slash)),
                     std::stoll(tok.substr(slash + 1)));
  }
  return DispersionSymbol(j, std::move(g));
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

int cmd_classify(const std::string& preset_name, const std::string& expr) {
  Nonlinearity n = !preset_name.empty() ? preset(preset_name).n
                                        : parse_nonlinearity(expr);
  nlohmann::json out;
  out["type"] = classify(n) == ResonanceType::NonParabolic ? "non-parabolic"
                                                           : "parabolic";
  out["conserves_mean"] = conserves_mean(n);
  out["p_density"] = p_density(n).str();
  out["euler_p_density"] = euler_operator(p_density(n)).str();
  out["p_max"] = n.p_max();
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quintlab: spectral laboratory for higher-order dispersive "
               "equations on the torus"};
  app.require_subcommand(1);

  // classify
  std::string cl_preset, cl_expr;
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "classify a nonlinearity");
  classify_cmd->add_option("--preset", cl_preset, "preset name");
  classify_cmd->add_option("--expr", cl_expr,
                           "nonlinearity expression, e.g. \"2*u2*u1^2\"");

  // simulate
  std::string sim_config, sim_output;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run one evolution");
  sim_cmd->add_option("--config", sim_config, "JSON run config")->required();
  sim_cmd->add_option("--output", sim_output, "override output directory");

  // energy-check
  std::string en_config, en_output;
  CLI::App* en_cmd = app.add_subcommand(
      "energy-check", "run an evolution and report corrected-energy data");
  en_cmd->add_option("--config", en_config, "JSON run config")->required();
  en_cmd->add_option("--output", en_output, "override output directory");

  // resonance
  int rs_p = 2, rs_K = 10, rs_j = 2;
  double rs_budget = env_budget(1e9), rs_C = 4.0;
  std::string rs_gammas, rs_out;
  CLI::App* rs_cmd =
      app.add_subcommand("resonance", "enumerate resonant tuples Phi = 0");
  rs_cmd->add_option("-p", rs_p, "interaction arity")->required();
  rs_cmd->add_option("-K", rs_K, "frequency box bound")->required();
  rs_cmd->add_option("--j", rs_j, "equation order parameter (order 2j+1)");
  rs_cmd->add_option("--gammas", rs_gammas, "symbol coefficients a,b,c or a/b");
  rs_cmd->add_option("--budget", rs_budget, "scan cost budget");
  rs_cmd->add_option("-o,--output", rs_out, "CSV path (default stdout)");

  // verify-oscillation
  int vo_p = 2, vo_K = 50, vo_j = 2;
  double vo_C = 4.0, vo_budget = env_budget(1e9);
  std::string vo_gammas, vo_out;
  CLI::App* vo_cmd = app.add_subcommand(
      "verify-oscillation", "certify the oscillation lower bound on a box");
  vo_cmd->add_option("-p", vo_p, "interaction arity")->required();
  vo_cmd->add_option("-K", vo_K, "frequency box bound")->required();
  vo_cmd->add_option("-C", vo_C, "M_H constant");
  vo_cmd->add_option("--j", vo_j, "equation order parameter");
  vo_cmd->add_option("--gammas", vo_gammas, "symbol coefficients");
  vo_cmd->add_option("--budget", vo_budget, "scan cost budget");
  vo_cmd->add_option("-o,--output", vo_out, "CSV path (default stdout)");

  // bona-smith
  double bs_s = 13.0;
  int bs_kgrid = 128;
  std::uint64_t bs_seed = 1;
  std::string bs_etas = "0.5,0.25,0.125,0.0625", bs_out, bs_field;
  CLI::App* bs_cmd = app.add_subcommand(
      "bona-smith", "attenuation table of the smoothing operator");
  bs_cmd->add_option("--s", bs_s, "smoothing index");
  bs_cmd->add_option("--etas", bs_etas, "comma list of eta values");
  bs_cmd->add_option("--seed", bs_seed, "seed for the sample field");
  bs_cmd->add_option("--k-grid", bs_kgrid, "band limit");
  bs_cmd->add_option("--field", bs_field, "JSON field file instead of random");
  bs_cmd->add_option("-o,--output", bs_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (classify_cmd->parsed()) {
      if (cl_preset.empty() == cl_expr.empty()) {
        std::cerr << "classify: give exactly one of --preset / --expr\n";
        return 1;
      }
      try {
        return cmd_classify(cl_preset, cl_expr);
      } catch (const DegreeTooLow& e) {
        std::cerr << "classify: " << e.what() << "\n";
        return 2;
      } catch (const ParseError& e) {
        std::cerr << "classify: " << e.what() << "\n";
        return 2;
      } catch (const EmptyNonlinearity& e) {
        std::cerr << "classify: " << e.what() << "\n";
        return 2;
      }
    }
    if (sim_cmd->parsed()) {
      RunConfig cfg = load_config_file(sim_config);
      if (!sim_output.empty()) cfg.output_dir = sim_output;
      SimulateOutcome out = run_simulate(cfg);
      std::cerr << "simulate: status "
                << (out.status == RunStatus::Completed ? "completed"
                    : out.status == RunStatus::BlowUpSuspected
                        ? "blow-up suspected"
                        : "non-finite abort")
                << ", artifacts in " << out.output_dir << "\n";
      return out.exit_code;
    }
    if (en_cmd->parsed()) {
      RunConfig cfg = load_config_file(en_config);
      if (!en_output.empty()) cfg.output_dir = en_output;
      SimulateOutcome out = run_energy_check(cfg);
      return out.exit_code;
    }
    if (rs_cmd->parsed()) {
      DispersionSymbol sym = symbol_from_flags(rs_j, rs_gammas);
      auto tuples = resonance_search(sym, rs_p, rs_K, rs_budget);
      emit(rs_out, resonance_csv(sym, rs_p, rs_K, rs_C, tuples));
      return 0;
    }
    if (vo_cmd->parsed()) {
      DispersionSymbol sym = symbol_from_flags(vo_j, vo_gammas);
      OscillationReport rep = verify_oscillation(sym, vo_p, vo_C, vo_K,
                                                 vo_budget);
      emit(vo_out, oscillation_csv(rep));
      std::cerr << "min_ratio " << rep.min_ratio << " over "
                << rep.support_count << " support tuples; sym-difference "
                << "ratio in [" << rep.min_ratio_sym << ", "
                << rep.max_ratio_sym << "]; off-support C' " << rep.max_cprime
                << "\n";
      return 0;
    }
    if (bs_cmd->parsed()) {
      Field f = bs_field.empty()
                    ? random_band_field(bs_seed, bs_s, 1.0, bs_kgrid)
                    : [&] {
                        std::ifstream in(bs_field, std::ios::binary);
                        if (!in) throw ConfigError("cannot read " + bs_field);
                        std::stringstream ss;
                        ss << in.rdbuf();
                        return field_from_json(ss.str());
                      }();
      std::ostringstream os;
      os.precision(17);
      os << "eta,s,dist_hs,dist_hs_minus_1,dist_hs_minus_4,gain_hs_plus_1,"
            "gain_hs_plus_4\n";
      std::stringstream ss(bs_etas);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        double eta = std::stod(tok);
        Field sm = bona_smith(f, eta, bs_s);
        Field diff = sm - f;
        os << eta << "," << bs_s << "," << sobolev_norm(diff, bs_s) << ","
           << sobolev_norm(diff, bs_s - 1) << ","
           << sobolev_norm(diff, bs_s - 4) << ","
           << sobolev_norm(sm, bs_s + 1) << "," << sobolev_norm(sm, bs_s + 4)
           << "\n";
      }
      emit(bs_out, os.str());
      return 0;
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 5;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const UnknownPreset& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
