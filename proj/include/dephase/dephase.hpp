#pragma once

// Umbrella header for the dephase library.

#include "dephase/analysis.hpp"
#include "dephase/analytic.hpp"
#include "dephase/csv.hpp"
#include "dephase/errors.hpp"
#include "dephase/fitting.hpp"
#include "dephase/oracle.hpp"
#include "dephase/rational.hpp"
#include "dephase/runner.hpp"
#include "dephase/scenario.hpp"
#include "dephase/states.hpp"
#include "dephase/time_series.hpp"
#include "dephase/types.hpp"
