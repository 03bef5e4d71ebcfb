#pragma once

#include "analysis.hpp"
#include "config.hpp"
#include "constants.hpp"
#include "cooling.hpp"
#include "errors.hpp"
#include "golden_section.hpp"
#include "io.hpp"
#include "levenberg_marquardt.hpp"
#include "physics.hpp"
#include "reproduce.hpp"
#include "rng.hpp"
#include "scene.hpp"
#include "spectra.hpp"
#include "spectrum.hpp"
#include "svg.hpp"
