#include "latentcast/metrics/accuracy.hpp"

#include <cmath>
#include <stdexcept>

namespace latentcast::metrics {

void ForecastResult::validate() const {
	if (reference.empty()) {
		throw std::invalid_argument("ForecastResult: no values");
	}
	if (reference.size() != predicted.size()) {
		throw std::invalid_argument("ForecastResult: reference and predicted lengths differ");
	}
	for (std::size_t i = 0; i < reference.size(); ++i) {
		if (!std::isfinite(reference[i]) || !std::isfinite(predicted[i])) {
			throw std::invalid_argument("ForecastResult: non-finite value");
		}
		if (!(reference[i] > 0.0)) {
			throw std::invalid_argument("ForecastResult: reference values must be > 0");
		}
	}
}

double rmse(const ForecastResult &r) {
	r.validate();
	double sum = 0.0;
	for (std::size_t i = 0; i < r.reference.size(); ++i) {
		const double e = r.reference[i] - r.predicted[i];
		sum += e * e;
	}
	return std::sqrt(sum / static_cast<double>(r.reference.size()));
}

double mape(const ForecastResult &r) {
	r.validate();
	double sum = 0.0;
	for (std::size_t i = 0; i < r.reference.size(); ++i) {
		sum += std::abs(r.reference[i] - r.predicted[i]) / r.reference[i];
	}
	return 100.0 * sum / static_cast<double>(r.reference.size());
}

double nmape(const ForecastResult &r) {
	r.validate();
	double abs_err = 0.0;
	double total = 0.0;
	for (std::size_t i = 0; i < r.reference.size(); ++i) {
		abs_err += std::abs(r.reference[i] - r.predicted[i]);
		total += r.reference[i];
	}
	return 100.0 * abs_err / total;
}

double mae(const ForecastResult &r) {
	r.validate();
	double sum = 0.0;
	for (std::size_t i = 0; i < r.reference.size(); ++i) {
		sum += std::abs(r.reference[i] - r.predicted[i]);
	}
	return sum / static_cast<double>(r.reference.size());
}

MeanStd aggregate(std::span<const double> values) {
	if (values.empty()) {
		throw std::invalid_argument("aggregate: no values");
	}
	const double n = static_cast<double>(values.size());
	double sum = 0.0;
	for (double v : values) {
		sum += v;
	}
	MeanStd out;
	out.mean = sum / n;
	double sq = 0.0;
	for (double v : values) {
		sq += (v - out.mean) * (v - out.mean);
	}
	out.std = std::sqrt(sq / n);
	return out;
}

} // namespace latentcast::metrics
