#include "latentcast/baselines/rnn_forecaster.hpp"

#include <stdexcept>

#include "latentcast/numeric/parameters.hpp"

namespace latentcast::baselines {

void RnnForecasterConfig::validate() const {
	if (input_dim < 1 || hidden_size < 1) {
		throw std::invalid_argument("RnnForecasterConfig: input_dim and hidden_size must be >= 1");
	}
}

RnnForecasterParams RnnForecasterParams::initialized(const RnnForecasterConfig &config, SeededRng &rng) {
	config.validate();
	RnnForecasterParams p;
	p.config = config;
	p.forward = rnn::CellParams::initialized(config.cell, config.input_dim, config.hidden_size, rng);
	if (config.bidirectional) {
		p.reverse = rnn::CellParams::initialized(config.cell, config.input_dim, config.hidden_size, rng);
	}
	p.head = Affine::initialized(config.context_width(), config.input_dim, rng);
	return p;
}

namespace {

Vector concat(std::span<const double> a, std::span<const double> b) {
	Vector out(a.begin(), a.end());
	out.insert(out.end(), b.begin(), b.end());
	return out;
}

} // namespace

Matrix rnn_forecast(const RnnForecasterParams &p, const Matrix &x, std::size_t horizon, RnnForecastCache *cache) {
	const RnnForecasterConfig &cfg = p.config;
	if (x.cols() != cfg.input_dim) {
		throw std::invalid_argument("rnn_forecast: window width does not match input_dim");
	}
	if (horizon < 1) {
		throw std::invalid_argument("rnn_forecast: horizon must be >= 1");
	}
	const rnn::HiddenState init = rnn::HiddenState::zeros(cfg.cell, cfg.hidden_size);
	const rnn::Direction dir = cfg.bidirectional ? rnn::Direction::bidirectional : rnn::Direction::forward;
	rnn::SequenceTrace trace;
	rnn::SequenceResult enc = rnn::sequence_forward(p.forward, x, init, dir, cache ? &trace : nullptr,
	                                                cfg.bidirectional ? &p.reverse : nullptr);
	const Vector reverse_summary = cfg.bidirectional ? enc.final_reverse.h : Vector{};

	Matrix y_hat(horizon, cfg.input_dim);
	std::vector<Vector> head_inputs;
	std::vector<rnn::StepCache> rollout;
	if (cache != nullptr) {
		rollout.resize(horizon - 1);
	}
	rnn::HiddenState state = std::move(enc.final);
	for (std::size_t j = 0; j < horizon; ++j) {
		if (j > 0) {
			state = rnn::cell_step(p.forward, y_hat.row(j - 1), state, cache ? &rollout[j - 1] : nullptr);
		}
		Vector in = concat(state.h, reverse_summary);
		const Vector out = p.head.apply(in);
		std::copy(out.begin(), out.end(), y_hat.row(j).begin());
		if (cache != nullptr) {
			head_inputs.push_back(std::move(in));
		}
	}
	if (cache != nullptr) {
		cache->params_fingerprint = fingerprint(p);
		cache->encoder = std::move(trace);
		cache->reverse_summary = reverse_summary;
		cache->head_inputs = std::move(head_inputs);
		cache->rollout = std::move(rollout);
		cache->y_hat = y_hat;
	}
	return y_hat;
}

double rnn_forecast_loss(const RnnForecastCache &cache, const Matrix &y) {
	if (!cache.y_hat.same_shape(y)) {
		throw std::invalid_argument("rnn_forecast_loss: target shape differs from forecast");
	}
	double s = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double e = cache.y_hat.data()[i] - y.data()[i];
		s += e * e;
	}
	return s / static_cast<double>(y.size());
}

RnnForecasterParams rnn_forecast_backward(const RnnForecasterParams &p, const RnnForecastCache &cache,
                                          const Matrix &y) {
	if (cache.params_fingerprint != fingerprint(p)) {
		throw std::logic_error("rnn_forecast_backward: parameters changed since the forward pass");
	}
	if (!cache.y_hat.same_shape(y)) {
		throw std::invalid_argument("rnn_forecast_backward: target shape differs from forecast");
	}
	const RnnForecasterConfig &cfg = p.config;
	const std::size_t h = cfg.hidden_size;
	const std::size_t d = cfg.input_dim;
	const std::size_t w = y.rows();
	const double scale = 2.0 / static_cast<double>(y.size());

	RnnForecasterParams g = zeros_like(p);
	Vector d_reverse(cfg.bidirectional ? h : 0, 0.0);
	Vector dh(h, 0.0);
	Vector dc(cfg.cell == rnn::CellKind::lstm ? h : 0, 0.0);
	Vector carry(d, 0.0); // gradient reaching y_hat[j] through the next step's input
	for (std::size_t j = w; j-- > 0;) {
		Vector dy(d);
		for (std::size_t c = 0; c < d; ++c) {
			dy[c] = scale * (cache.y_hat(j, c) - y(j, c)) + carry[c];
		}
		Vector d_in(cfg.context_width(), 0.0);
		p.head.backward(cache.head_inputs[j], dy, g.head, d_in);
		for (std::size_t i = 0; i < h; ++i) {
			dh[i] += d_in[i];
		}
		for (std::size_t i = 0; i < d_reverse.size(); ++i) {
			d_reverse[i] += d_in[h + i];
		}
		if (j > 0) {
			rnn::StepGradients sg = rnn::cell_step_backward(p.forward, cache.rollout[j - 1], dh, dc, g.forward);
			carry = std::move(sg.dx);
			dh = std::move(sg.dh_prev);
			dc = std::move(sg.dc_prev);
		}
	}
	rnn::HiddenState d_final{dh, dc};
	rnn::HiddenState d_final_reverse{d_reverse, {}};
	rnn::sequence_backward(p.forward, cache.encoder, Matrix{}, d_final, d_final_reverse, g.forward,
	                       cfg.bidirectional ? &p.reverse : nullptr, cfg.bidirectional ? &g.reverse : nullptr);
	return g;
}

} // namespace latentcast::baselines
