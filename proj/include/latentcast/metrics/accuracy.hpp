#pragma once

#include <span>
#include <string>

#include "latentcast/numeric/matrix.hpp"

namespace latentcast::metrics {

/// Paired reference/predicted glucose values (mg/dL) for one series at one horizon.
struct ForecastResult {
	Vector reference;
	Vector predicted;
	std::size_t horizon_steps = 0;
	std::string model_id;
	std::string series_id;

	/// Nonempty, equal lengths, every reference > 0, every value finite.
	void validate() const;
};

/// sqrt(mean((ref - pred)^2))
double rmse(const ForecastResult &r);

/// 100 * mean(|ref - pred| / ref)
double mape(const ForecastResult &r);

/// Sum-normalized absolute error: 100 * sum|ref - pred| / sum(ref).
double nmape(const ForecastResult &r);

/// mean(|ref - pred|)
double mae(const ForecastResult &r);

struct MeanStd {
	double mean = 0.0;
	double std = 0.0;
};

/// Arithmetic mean and population (n-divisor) standard deviation.
MeanStd aggregate(std::span<const double> values);

} // namespace latentcast::metrics
