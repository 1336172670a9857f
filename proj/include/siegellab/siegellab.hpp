#pragma once

/// @file siegellab.hpp
/// Umbrella header: the whole library.

#include "siegellab/base.hpp"
#include "siegellab/eisenstein.hpp"
#include "siegellab/identity.hpp"
#include "siegellab/measures.hpp"
#include "siegellab/orbits.hpp"
#include "siegellab/origami.hpp"
#include "siegellab/pointset_io.hpp"
#include "siegellab/quadrature.hpp"
#include "siegellab/random_lattices.hpp"
#include "siegellab/spherical.hpp"
