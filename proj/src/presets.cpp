#include "qlab/presets.hpp"

#include <stdexcept>

namespace qlab {

namespace {

struct Row {
  const char* name;
  int j;
  std::vector<Rational> gammas;
  const char* expr;
  const char* provenance;
  ResonanceType type;
  bool mean_conserving;
};

const std::vector<Row>& rows() {
  using RT = ResonanceType;
  static const std::vector<Row> r = {
      {"kdv5", 2, {1, 0, 0}, "-20*u1*u2 - 10*u0*u3 - 3*u0^2*u1",
       "fifth-order KdV, second flow of the KdV hierarchy; divergence form "
       "-5 dx (du)^2 + 10 dx^2 (u du) + dx(u^3) moved to the right-hand side "
       "and expanded",
       RT::NonParabolic, true},
      {"mkdv5", 2, {1, 0, 0},
       "-10*u0^2*u3 - 40*u0*u1*u2 - 10*u1^3 - 30*u0^4*u1",
       "fifth-order modified KdV, second flow of the mKdV hierarchy "
       "(plus-sign variant of the quintic term), expanded from "
       "-5 dx (u dx^2(u^2)) - 6 dx(u^5)",
       RT::NonParabolic, true},
      {"benney", 2, {1, 0, 0}, "u0*u3 + 2*u1*u2",
       "Benney's model for short/long wave interaction", RT::NonParabolic,
       true},
      {"lisher", 2, {1, 1, 0},
       "-1/2*u0*u3 - u0^2*u3 - u1*u2 - 4*u0*u1*u2 - u1^3 - u0*u1 - u0^2*u1",
       "Lisher's anharmonic lattice equation (linear part d^5 + d^3)",
       RT::NonParabolic, true},
      {"n1", 2, {1, 0, 0}, "2*u2*u1^2",
       "model term 2 d^2u (du)^2; positive classifier functional",
       RT::Parabolic, true},
      {"n2", 2, {1, 0, 0}, "u2^2*u0",
       "model term (d^2u)^2 u; negative classifier functional", RT::Parabolic,
       false},
      {"n1n2", 2, {1, 0, 0}, "2*u2*u1^2 + u2^2*u0",
       "sum of n1 and n2; the classifier densities cancel", RT::NonParabolic,
       false},
      {"porous2", 2, {1, 0, 0}, "2*u0*u2 + 2*u1^2",
       "porous-medium nonlinearity dx^2(u^2) with quintic dispersion",
       RT::Parabolic, true},
      {"porous3", 2, {1, 0, 0}, "3*u0^2*u2 + 6*u0*u1^2",
       "porous-medium nonlinearity dx^2(u^3) with quintic dispersion",
       RT::Parabolic, true},
      {"plap5", 2, {1, 0, 0}, "4*u1^3*u2",
       "p-Laplacian-type nonlinearity dx((du)^4), polynomial reading of "
       "dx(|du|^{p-2} du) at p = 5",
       RT::Parabolic, true},
      {"quartic11", 5, {1, 0, 0, 0, 0, 0}, "4*u1^3*u2",
       "11th-order flow d_t u + d_x^11 u = dx((du)^4)", RT::Parabolic, true},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Row& r : rows()) v.push_back(r.name);
    return v;
  }();
  return names;
}

Preset preset(const std::string& name) {
  for (const Row& r : rows()) {
    if (name != r.name) continue;
    Preset p{r.name, DispersionSymbol(r.j, r.gammas),
             parse_nonlinearity(r.expr), r.provenance, r.type,
             r.mean_conserving};
    if (classify(p.n) != p.type)
      throw std::logic_error("preset " + name +
                             ": classification does not match the registry");
    if (conserves_mean(p.n) != p.mean_conserving)
      throw std::logic_error("preset " + name +
                             ": mean-conservation label does not match");
    return p;
  }
  throw UnknownPreset("no preset named '" + name + "'");
}

}  // namespace qlab
