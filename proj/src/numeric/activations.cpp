#include "latentcast/numeric/activations.hpp"

namespace latentcast {

Vector activate(std::span<const double> x, Activation kind) {
	Vector out(x.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		out[i] = kind == Activation::sigmoid ? sigmoid(x[i]) : std::tanh(x[i]);
	}
	return out;
}

} // namespace latentcast
