#pragma once

#include "rsb/rng.hpp"

namespace rsb {

// Shapes above this use the moment-matched Gaussian path.
inline constexpr double kPgExactShapeLimit = 170.0;
inline constexpr int kPgSeriesTerms = 200;

double pg_mean(double shape, double tilt);
double pg_variance(double shape, double tilt);

double pg_sample(double shape, double tilt, RngStream& rng);
// Single PG(1, tilt) draw by the alternating-series method.
double pg_sample_unit(double tilt, RngStream& rng);

}  // namespace rsb
