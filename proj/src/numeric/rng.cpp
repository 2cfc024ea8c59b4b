#include "latentcast/numeric/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace latentcast {

SeededRng::SeededRng(std::uint64_t seed) : engine_(seed) {}

double SeededRng::uniform() {
	return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::standard_normal() {
	if (has_spare_) {
		has_spare_ = false;
		return spare_normal_;
	}
	double u1 = uniform();
	while (u1 <= 0.0) {
		u1 = uniform();
	}
	const double u2 = uniform();
	const double radius = std::sqrt(-2.0 * std::log(u1));
	const double angle = 2.0 * std::numbers::pi * u2;
	spare_normal_ = radius * std::sin(angle);
	has_spare_ = true;
	return radius * std::cos(angle);
}

std::size_t SeededRng::uniform_index(std::size_t n) {
	if (n == 0) {
		throw std::invalid_argument("uniform_index: empty range");
	}
	const std::uint64_t bound = static_cast<std::uint64_t>(n);
	const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
	std::uint64_t draw = engine_();
	while (draw >= limit) {
		draw = engine_();
	}
	return static_cast<std::size_t>(draw % bound);
}

Vector sample_standard_normal(SeededRng &rng, std::size_t n) {
	Vector out(n);
	for (double &x : out) {
		x = rng.standard_normal();
	}
	return out;
}

void init_uniform_scaled(Matrix &m, std::size_t fan_in, SeededRng &rng) {
	const double bound = fan_in == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(fan_in));
	for (double &x : m.data()) {
		x = rng.uniform(-bound, bound);
	}
}

} // namespace latentcast
