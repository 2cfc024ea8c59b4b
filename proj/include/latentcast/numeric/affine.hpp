#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "latentcast/numeric/matrix.hpp"
#include "latentcast/numeric/rng.hpp"

namespace latentcast {

/// y = W x + b with W: out x in, b: out x 1.
struct Affine {
	Matrix weight;
	Matrix bias;

	static Affine zeros(std::size_t in, std::size_t out);
	static Affine initialized(std::size_t in, std::size_t out, SeededRng &rng);

	std::size_t input_size() const { return weight.cols(); }
	std::size_t output_size() const { return weight.rows(); }
	bool empty() const { return weight.empty() && bias.empty(); }

	Vector apply(std::span<const double> x) const;

	/// Accumulates dW, db into grad and dx (when non-empty) given upstream dy.
	void backward(std::span<const double> x, std::span<const double> dy, Affine &grad, std::span<double> dx) const;

	template <class Self, class F>
	static void visit(Self &self, std::string_view prefix, F &&f) {
		f(std::string(prefix) + ".weight", self.weight);
		f(std::string(prefix) + ".bias", self.bias);
	}
};

} // namespace latentcast
