#pragma once

#include <cstdint>
#include <span>

#include "latentcast/numeric/matrix.hpp"

namespace latentcast::baselines {

/// Persistence: every horizon row repeats the last observed value of each
/// channel. An empty mask means fully observed. Throws if a channel has no
/// observed entry.
Matrix forward_fill_forecast(const Matrix &x, std::span<const std::uint8_t> mask, std::size_t horizon);

/// Ordinary least-squares line per channel over the observed steps (time =
/// step index), extrapolated `horizon` steps past the window. Throws if a
/// channel has fewer than two observed steps.
Matrix linear_trend_forecast(const Matrix &x, std::span<const std::uint8_t> mask, std::size_t horizon);

struct LineFit {
	double intercept = 0.0;
	double slope = 0.0;
};

/// Closed-form simple regression of ys on ts.
LineFit fit_line(std::span<const double> ts, std::span<const double> ys);

} // namespace latentcast::baselines
