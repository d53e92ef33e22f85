#pragma once

#include "placeopt/coefficients.hpp"
#include "placeopt/construction.hpp"
#include "placeopt/equivalence.hpp"
#include "placeopt/errors.hpp"
#include "placeopt/flow.hpp"
#include "placeopt/gallery.hpp"
#include "placeopt/linalg.hpp"
#include "placeopt/optimality.hpp"
#include "placeopt/placement.hpp"
#include "placeopt/scenario.hpp"
#include "placeopt/sensors.hpp"
