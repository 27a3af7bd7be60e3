// growthscreen/growthscreen.hpp - umbrella header.
#pragma once

#include "growthscreen/core.hpp"
#include "growthscreen/ingest.hpp"
#include "growthscreen/regress.hpp"
#include "growthscreen/metrics.hpp"
#include "growthscreen/backtest.hpp"
#include "growthscreen/screen.hpp"
#include "growthscreen/config.hpp"
#include "growthscreen/report.hpp"
