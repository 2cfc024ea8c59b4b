#pragma once

#include <cstdint>
#include <span>

#include "latentcast/numeric/matrix.hpp"

namespace latentcast::model {

/// Weights of the three-term objective alpha*reco + beta*pred + gamma*KL.
struct LossWeights {
	double alpha = 1.0;
	double beta = 1.0;
	double gamma = 1.0;

	/// Throws std::invalid_argument when a weight is negative or all are zero.
	void validate() const;
};

struct LossParts {
	double reconstruction = 0.0;
	double prediction = 0.0;
	double kl = 0.0;
};

/// Mean squared error over the entries where mask != 0. An empty mask means
/// every entry is observed. Throws when shapes differ or nothing is observed.
double loss_reconstruction(const Matrix &x, const Matrix &x_hat, std::span<const std::uint8_t> mask = {});

/// Mean squared error over every horizon entry.
double loss_prediction(const Matrix &y, const Matrix &y_hat);

/// KL(N(mu, exp(logvar)) || N(0, I)) summed over latent dimensions.
double loss_kl(std::span<const double> mu, std::span<const double> logvar);

double loss_total(const LossParts &parts, const LossWeights &weights);

} // namespace latentcast::model
