#pragma once

#include <string>
#include <vector>

#include "qlab/dispersion.hpp"
#include "qlab/nonlinearity.hpp"

namespace qlab {

/// Registry entry for one of the example equations, stored pre-expanded to
/// monomial form. The recorded classification and mean-conservation labels
/// are re-verified against the exact classifier every time a preset loads.
struct Preset {
  std::string name;
  DispersionSymbol sym;
  Nonlinearity n;
  std::string provenance;
  ResonanceType type;
  bool mean_conserving;
};

const std::vector<std::string>& preset_names();
Preset preset(const std::string& name);

}  // namespace qlab
