#pragma once

#include <cmath>
#include <span>

#include "latentcast/numeric/matrix.hpp"

namespace latentcast {

enum class Activation { sigmoid, tanh };

/// Logistic function evaluated on the branch that never exponentiates a
/// positive argument, so |x| in the thousands saturates without overflow.
inline double sigmoid(double x) {
	if (x >= 0.0) {
		return 1.0 / (1.0 + std::exp(-x));
	}
	const double e = std::exp(x);
	return e / (1.0 + e);
}

Vector activate(std::span<const double> x, Activation kind);

} // namespace latentcast
