#pragma once

#include "tailfx/bench.hpp"
#include "tailfx/bootstrap.hpp"
#include "tailfx/common.hpp"
#include "tailfx/csv.hpp"
#include "tailfx/estimator.hpp"
#include "tailfx/gpd.hpp"
#include "tailfx/ols.hpp"
#include "tailfx/quantile_regression.hpp"
#include "tailfx/rng.hpp"
#include "tailfx/simgen.hpp"
