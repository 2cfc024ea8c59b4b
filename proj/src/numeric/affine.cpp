#include "latentcast/numeric/affine.hpp"

#include <stdexcept>

namespace latentcast {

Affine Affine::zeros(std::size_t in, std::size_t out) {
	return Affine{Matrix(out, in), Matrix(out, 1)};
}

Affine Affine::initialized(std::size_t in, std::size_t out, SeededRng &rng) {
	Affine a = zeros(in, out);
	init_uniform_scaled(a.weight, in, rng);
	init_uniform_scaled(a.bias, in, rng);
	return a;
}

Vector Affine::apply(std::span<const double> x) const {
	Vector y(bias.data().begin(), bias.data().end());
	matvec_accumulate(weight, x, y);
	return y;
}

void Affine::backward(std::span<const double> x, std::span<const double> dy, Affine &grad, std::span<double> dx) const {
	if (dy.size() != output_size()) {
		throw std::invalid_argument("Affine::backward: upstream gradient size mismatch");
	}
	outer_accumulate(grad.weight, dy, x);
	axpy(1.0, dy, grad.bias.data());
	if (!dx.empty()) {
		matvec_transposed_accumulate(weight, dy, dx);
	}
}

} // namespace latentcast
