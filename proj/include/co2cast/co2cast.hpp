#pragma once

// Umbrella header for the co2cast library: hourly CO2-intensity forecasting
// with decomposition-based composite methods, baseline forecasters, a
// Monte-Carlo benchmark harness, and day-ahead consumption scheduling.

#include "co2cast/arima.hpp"
#include "co2cast/benchmark.hpp"
#include "co2cast/classical.hpp"
#include "co2cast/composite.hpp"
#include "co2cast/emd.hpp"
#include "co2cast/error.hpp"
#include "co2cast/ffnn.hpp"
#include "co2cast/models.hpp"
#include "co2cast/psf.hpp"
#include "co2cast/report.hpp"
#include "co2cast/rng.hpp"
#include "co2cast/scheduler.hpp"
#include "co2cast/series.hpp"
#include "co2cast/spline.hpp"
#include "co2cast/stats.hpp"

namespace co2cast {
inline constexpr const char* k_version = "0.1.0";
}
