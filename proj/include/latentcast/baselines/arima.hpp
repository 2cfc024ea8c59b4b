#pragma once

#include <span>

#include "latentcast/numeric/matrix.hpp"

namespace latentcast::baselines {

/// ARIMA(p, d, 0): AR(p) without intercept on the d-times differenced series.
struct ArConfig {
	std::size_t p = 6;
	std::size_t d = 1;

	/// p >= 1, d <= 2, and the history must be longer than p + d + 1.
	void validate(std::size_t history_length) const;
};

struct ArFit {
	ArConfig config;
	Vector coefficients; // phi_1 .. phi_p (lag 1 first)
};

/// Least-squares fit on the lagged design matrix of the differenced series.
/// Throws std::runtime_error naming the rank when the design is singular.
ArFit ar_fit(std::span<const double> history, const ArConfig &config);

/// Recursive w-step forecast from a fit, undoing the differencing against
/// the end of `history`.
Vector ar_forecast(const ArFit &fit, std::span<const double> history, std::size_t horizon);

Vector ar_fit_forecast(std::span<const double> history, const ArConfig &config, std::size_t horizon);

/// k-th order differences (k = 0 returns the input).
Vector difference(std::span<const double> series, std::size_t order);

} // namespace latentcast::baselines
