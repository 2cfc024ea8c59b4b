#include "latentcast/model/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace latentcast::model {

void LossWeights::validate() const {
	if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0)) {
		throw std::invalid_argument("loss weights must be non-negative");
	}
	if (alpha == 0.0 && beta == 0.0 && gamma == 0.0) {
		throw std::invalid_argument("loss weights must not all be zero");
	}
}

double loss_reconstruction(const Matrix &x, const Matrix &x_hat, std::span<const std::uint8_t> mask) {
	if (!x.same_shape(x_hat)) {
		throw std::invalid_argument("loss_reconstruction: shape mismatch");
	}
	if (!mask.empty() && mask.size() != x.size()) {
		throw std::invalid_argument("loss_reconstruction: mask size mismatch");
	}
	double sum = 0.0;
	std::size_t observed = 0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		if (!mask.empty() && mask[i] == 0) {
			continue;
		}
		const double e = x.data()[i] - x_hat.data()[i];
		sum += e * e;
		++observed;
	}
	if (observed == 0) {
		throw std::invalid_argument("loss_reconstruction: no observed entries");
	}
	return sum / static_cast<double>(observed);
}

double loss_prediction(const Matrix &y, const Matrix &y_hat) {
	if (!y.same_shape(y_hat)) {
		throw std::invalid_argument("loss_prediction: shape mismatch");
	}
	if (y.size() == 0) {
		return 0.0;
	}
	double sum = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double e = y.data()[i] - y_hat.data()[i];
		sum += e * e;
	}
	return sum / static_cast<double>(y.size());
}

double loss_kl(std::span<const double> mu, std::span<const double> logvar) {
	if (mu.size() != logvar.size()) {
		throw std::invalid_argument("loss_kl: mu and logvar lengths differ");
	}
	// -0.5 * (1 + lv - mu^2 - e^lv) rearranged; expm1(lv) - lv never rounds below zero.
	double sum = 0.0;
	for (std::size_t j = 0; j < mu.size(); ++j) {
		sum += mu[j] * mu[j] + (std::expm1(logvar[j]) - logvar[j]);
	}
	return 0.5 * sum;
}

double loss_total(const LossParts &parts, const LossWeights &weights) {
	return weights.alpha * parts.reconstruction + weights.beta * parts.prediction + weights.gamma * parts.kl;
}

} // namespace latentcast::model
