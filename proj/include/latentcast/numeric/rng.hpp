#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "latentcast/numeric/matrix.hpp"

namespace latentcast {

/// Seeded pseudo-random stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard, so a seed reproduces the same stream on every conforming
/// platform. Derived draws avoid the implementation-defined standard
/// distributions:
///   - uniform(): top 53 bits of one engine word, scaled by 2^-53, in [0, 1).
///   - standard_normal(): Box-Muller on two uniforms, both outputs used in
///     order (cos branch first).
///   - uniform_index(n): rejection sampling on one engine word.
///
/// The stream is single-owner: copying is disabled, moving hands it off.
class SeededRng {
public:
	explicit SeededRng(std::uint64_t seed);

	SeededRng(const SeededRng &) = delete;
	SeededRng &operator=(const SeededRng &) = delete;
	SeededRng(SeededRng &&) noexcept = default;
	SeededRng &operator=(SeededRng &&) noexcept = default;

	std::uint64_t next_u64() { return engine_(); }
	double uniform();
	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
	double standard_normal();
	std::size_t uniform_index(std::size_t n);
	bool bernoulli(double p) { return uniform() < p; }

private:
	std::mt19937_64 engine_;
	double spare_normal_ = 0.0;
	bool has_spare_ = false;
};

/// n independent N(0, 1) draws.
Vector sample_standard_normal(SeededRng &rng, std::size_t n);

/// Fisher-Yates shuffle driven by uniform_index, portable across standard libraries.
template <class T>
void shuffle_in_place(std::vector<T> &items, SeededRng &rng) {
	for (std::size_t i = items.size(); i > 1; --i) {
		const std::size_t j = rng.uniform_index(i);
		std::swap(items[i - 1], items[j]);
	}
}

/// Fill m with U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
void init_uniform_scaled(Matrix &m, std::size_t fan_in, SeededRng &rng);

} // namespace latentcast
