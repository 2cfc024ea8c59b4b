#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "latentcast/numeric/matrix.hpp"
#include "latentcast/numeric/parameters.hpp"
#include "latentcast/numeric/rng.hpp"

namespace latentcast::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, SeededRng &rng, double scale = 1.0) {
	Matrix m(rows, cols);
	for (double &v : m.data()) {
		v = rng.uniform(-scale, scale);
	}
	return m;
}

inline Vector random_vector(std::size_t n, SeededRng &rng, double scale = 1.0) {
	Vector v(n);
	for (double &x : v) {
		x = rng.uniform(-scale, scale);
	}
	return v;
}

/// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose gradient is
/// zero up to rounding from dominating the ratio.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
	return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradientCheck {
	double max_relative_error = 0.0;
	std::string worst_tensor;
	std::size_t checked = 0;
};

/// Central differences of `loss` against every entry of `analytic`.
template <class P>
GradientCheck check_gradients(P params, const P &analytic, const std::function<double(const P &)> &loss,
                              double step = 1e-5) {
	GradientCheck out;
	std::vector<std::pair<std::string, Matrix *>> entries;
	params.visit([&](const std::string &name, Matrix &m) { entries.emplace_back(name, &m); });
	const auto grads = named_tensors_of(analytic);
	for (std::size_t k = 0; k < entries.size(); ++k) {
		Matrix &m = *entries[k].second;
		for (std::size_t i = 0; i < m.size(); ++i) {
			const double saved = m.data()[i];
			m.data()[i] = saved + step;
			const double up = loss(params);
			m.data()[i] = saved - step;
			const double down = loss(params);
			m.data()[i] = saved;
			const double numeric = (up - down) / (2.0 * step);
			const double err = relative_error(grads[k].second->data()[i], numeric);
			++out.checked;
			if (err > out.max_relative_error) {
				out.max_relative_error = err;
				out.worst_tensor = entries[k].first + "[" + std::to_string(i) + "]";
			}
		}
	}
	return out;
}

} // namespace latentcast::testing
