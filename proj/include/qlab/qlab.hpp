#pragma once

#include "qlab/dispersion.hpp"
#include "qlab/energy.hpp"
#include "qlab/field.hpp"
#include "qlab/nonlinearity.hpp"
#include "qlab/presets.hpp"
#include "qlab/runio.hpp"
#include "qlab/solver.hpp"
