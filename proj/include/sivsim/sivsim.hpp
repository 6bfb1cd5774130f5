#pragma once

// Umbrella header.

#include "sivsim/config.hpp"
#include "sivsim/digest.hpp"
#include "sivsim/ensemble.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/fit.hpp"
#include "sivsim/io.hpp"
#include "sivsim/lines.hpp"
#include "sivsim/model.hpp"
#include "sivsim/overlap.hpp"
#include "sivsim/photons.hpp"
#include "sivsim/rates.hpp"
#include "sivsim/rng.hpp"
#include "sivsim/spectra.hpp"
#include "sivsim/units.hpp"
