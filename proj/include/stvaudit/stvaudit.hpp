#pragma once

// Umbrella header: tabulation, bounds, assertions, audit planning and
// ballot-comparison audit simulation for 2-seat STV elections.

#include "stvaudit/assertions.hpp"
#include "stvaudit/audit.hpp"
#include "stvaudit/ballot.hpp"
#include "stvaudit/bounds.hpp"
#include "stvaudit/parse.hpp"
#include "stvaudit/planner.hpp"
#include "stvaudit/rational.hpp"
#include "stvaudit/report_json.hpp"
#include "stvaudit/risk.hpp"
#include "stvaudit/table_render.hpp"
#include "stvaudit/tabulate.hpp"
#include "stvaudit/version.hpp"
