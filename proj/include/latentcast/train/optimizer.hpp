#pragma once

#include <cmath>
#include <stdexcept>

#include "latentcast/numeric/parameters.hpp"

namespace latentcast::train {

struct AdamConfig {
	double learning_rate = 1e-3;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double epsilon = 1e-8;

	void validate() const {
		if (!(learning_rate > 0.0) || !(epsilon > 0.0)) {
			throw std::invalid_argument("AdamConfig: learning_rate and epsilon must be > 0");
		}
		if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
			throw std::invalid_argument("AdamConfig: moment decays must lie in [0, 1)");
		}
	}
};

/// Adam with bias-corrected first and second moments, one moment buffer
/// per parameter tensor.
template <class P>
class Adam {
public:
	Adam(const P &like, const AdamConfig &config) : config_(config), m_(zeros_like(like)), v_(zeros_like(like)) {
		config_.validate();
	}

	std::size_t steps() const { return t_; }

	void step(P &params, const P &grads) {
		++t_;
		const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
		const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
		auto ps = tensors_of(params);
		auto ms = tensors_of(m_);
		auto vs = tensors_of(v_);
		const auto gs = tensors_of(grads);
		if (ps.size() != gs.size() || ps.size() != ms.size()) {
			throw std::invalid_argument("Adam::step: gradient structure differs from parameters");
		}
		for (std::size_t k = 0; k < ps.size(); ++k) {
			auto p = ps[k]->data();
			auto m = ms[k]->data();
			auto v = vs[k]->data();
			const auto g = gs[k]->data();
			if (p.size() != g.size()) {
				throw std::invalid_argument("Adam::step: gradient tensor size differs from parameter");
			}
			for (std::size_t i = 0; i < p.size(); ++i) {
				m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
				v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
				const double m_hat = m[i] / c1;
				const double v_hat = v[i] / c2;
				p[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
			}
		}
	}

private:
	AdamConfig config_;
	P m_;
	P v_;
	std::size_t t_ = 0;
};

/// Rescales grads so their global L2 norm is at most max_norm. Returns the
/// norm before clipping.
template <class P>
double clip_global_norm(P &grads, double max_norm) {
	if (!(max_norm > 0.0)) {
		throw std::invalid_argument("clip_global_norm: threshold must be > 0");
	}
	const double norm = global_norm(grads);
	if (norm > max_norm) {
		scale_in_place(grads, max_norm / norm);
	}
	return norm;
}

} // namespace latentcast::train
