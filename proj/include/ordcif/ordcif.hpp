#pragma once

#include "ordcif/bands.hpp"
#include "ordcif/data.hpp"
#include "ordcif/errors.hpp"
#include "ordcif/estimators.hpp"
#include "ordcif/isotonic.hpp"
#include "ordcif/json_io.hpp"
#include "ordcif/ordered_test.hpp"
#include "ordcif/parallel.hpp"
#include "ordcif/resampling.hpp"
#include "ordcif/rng.hpp"
#include "ordcif/simulation.hpp"
#include "ordcif/step_function.hpp"
