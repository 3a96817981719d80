#pragma once

// Three identical bosons in two dimensions: adiabatic hyperspherical
// expansion of the Faddeev equations, zero-range limit, bound states.

#include "halo2d/angular.hpp"
#include "halo2d/channels.hpp"
#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"
#include "halo2d/hyperspherical.hpp"
#include "halo2d/potential.hpp"
#include "halo2d/radial.hpp"
#include "halo2d/special.hpp"
#include "halo2d/survey.hpp"
#include "halo2d/twobody.hpp"
#include "halo2d/zero_range.hpp"
