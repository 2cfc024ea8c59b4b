#include "latentcast/baselines/naive.hpp"

#include <stdexcept>
#include <string>

namespace latentcast::baselines {

namespace {

void check_inputs(const Matrix &x, std::span<const std::uint8_t> mask, std::size_t horizon) {
	if (x.rows() == 0) {
		throw std::invalid_argument("baseline: empty window");
	}
	if (!mask.empty() && mask.size() != x.size()) {
		throw std::invalid_argument("baseline: mask size mismatch");
	}
	if (horizon < 1) {
		throw std::invalid_argument("baseline: horizon must be >= 1");
	}
}

bool is_observed(std::span<const std::uint8_t> mask, std::size_t index) {
	return mask.empty() || mask[index] != 0;
}

} // namespace

Matrix forward_fill_forecast(const Matrix &x, std::span<const std::uint8_t> mask, std::size_t horizon) {
	check_inputs(x, mask, horizon);
	Matrix out(horizon, x.cols());
	for (std::size_t c = 0; c < x.cols(); ++c) {
		std::size_t t = x.rows();
		while (t > 0 && !is_observed(mask, (t - 1) * x.cols() + c)) {
			--t;
		}
		if (t == 0) {
			throw std::invalid_argument("forward_fill_forecast: channel " + std::to_string(c) + " has no observed value");
		}
		for (std::size_t j = 0; j < horizon; ++j) {
			out(j, c) = x(t - 1, c);
		}
	}
	return out;
}

LineFit fit_line(std::span<const double> ts, std::span<const double> ys) {
	if (ts.size() != ys.size() || ts.size() < 2) {
		throw std::invalid_argument("fit_line: need at least two paired points");
	}
	const double n = static_cast<double>(ts.size());
	double t_mean = 0.0, y_mean = 0.0;
	for (std::size_t i = 0; i < ts.size(); ++i) {
		t_mean += ts[i];
		y_mean += ys[i];
	}
	t_mean /= n;
	y_mean /= n;
	double sxy = 0.0, sxx = 0.0;
	for (std::size_t i = 0; i < ts.size(); ++i) {
		sxy += (ts[i] - t_mean) * (ys[i] - y_mean);
		sxx += (ts[i] - t_mean) * (ts[i] - t_mean);
	}
	if (sxx == 0.0) {
		throw std::invalid_argument("fit_line: all time points coincide");
	}
	LineFit fit;
	fit.slope = sxy / sxx;
	fit.intercept = y_mean - fit.slope * t_mean;
	return fit;
}

Matrix linear_trend_forecast(const Matrix &x, std::span<const std::uint8_t> mask, std::size_t horizon) {
	check_inputs(x, mask, horizon);
	Matrix out(horizon, x.cols());
	for (std::size_t c = 0; c < x.cols(); ++c) {
		Vector ts, ys;
		for (std::size_t t = 0; t < x.rows(); ++t) {
			if (is_observed(mask, t * x.cols() + c)) {
				ts.push_back(static_cast<double>(t));
				ys.push_back(x(t, c));
			}
		}
		if (ts.size() < 2) {
			throw std::invalid_argument("linear_trend_forecast: channel " + std::to_string(c) +
			                            " has fewer than two observed values");
		}
		const LineFit fit = fit_line(ts, ys);
		for (std::size_t j = 0; j < horizon; ++j) {
			const double t = static_cast<double>(x.rows() - 1 + j + 1);
			out(j, c) = fit.intercept + fit.slope * t;
		}
	}
	return out;
}

} // namespace latentcast::baselines
