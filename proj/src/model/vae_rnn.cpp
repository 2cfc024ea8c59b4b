#include "latentcast/model/vae_rnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latentcast/numeric/parameters.hpp"

namespace latentcast::model {

using rnn::CellKind;
using rnn::CellParams;
using rnn::HiddenState;

void VaeRnnConfig::validate() const {
	if (input_dim == 0 || hidden_size == 0 || latent_dim == 0) {
		throw std::invalid_argument("VaeRnnConfig: d, h and k must be >= 1");
	}
	if (window == 0 || horizon == 0) {
		throw std::invalid_argument("VaeRnnConfig: window and horizon must be >= 1");
	}
}

VaeRnnParams VaeRnnParams::initialized(const VaeRnnConfig &config, SeededRng &rng) {
	config.validate();
	const std::size_t d = config.input_dim;
	const std::size_t h = config.hidden_size;
	const std::size_t k = config.latent_dim;
	VaeRnnParams p;
	p.config = config;
	p.encoder = CellParams::initialized(config.cell, d, h, rng);
	p.mu_head = Affine::initialized(h, k, rng);
	p.logvar_head = Affine::initialized(h, k, rng);
	p.latent_to_hidden = Affine::initialized(k, h, rng);
	if (config.cell == CellKind::lstm) {
		p.latent_to_cell = Affine::initialized(k, h, rng);
	}
	p.decoder = CellParams::initialized(config.cell, d, h, rng);
	p.recon_head = Affine::initialized(h, d, rng);
	p.pred_head = Affine::initialized(h, d, rng);
	return p;
}

namespace {

void check_window(const VaeRnnParams &p, const Matrix &x) {
	if (x.rows() == 0) {
		throw std::invalid_argument("VAE-RNN: empty input window");
	}
	if (x.cols() != p.config.input_dim) {
		throw std::invalid_argument("VAE-RNN: window has " + std::to_string(x.cols()) + " channels, model expects " +
		                            std::to_string(p.config.input_dim));
	}
}

struct EncoderPass {
	LatentState latent;
	Vector final_hidden;
	std::vector<std::uint8_t> clamped;
};

EncoderPass run_encoder(const VaeRnnParams &p, const Matrix &x, rnn::SequenceTrace *trace) {
	check_window(p, x);
	const auto init = HiddenState::zeros(p.config.cell, p.config.hidden_size);
	auto seq = rnn::sequence_forward(p.encoder, x, init, rnn::Direction::forward, trace);
	EncoderPass pass;
	pass.final_hidden = seq.final.h;
	pass.latent.mu = p.mu_head.apply(pass.final_hidden);
	Vector raw = p.logvar_head.apply(pass.final_hidden);
	pass.clamped.assign(raw.size(), 0);
	pass.latent.logvar.resize(raw.size());
	for (std::size_t j = 0; j < raw.size(); ++j) {
		pass.latent.logvar[j] = std::clamp(raw[j], kLogvarMin, kLogvarMax);
		pass.clamped[j] = (raw[j] < kLogvarMin || raw[j] > kLogvarMax) ? 1 : 0;
	}
	return pass;
}

HiddenState initial_decoder_state(const VaeRnnParams &p, std::span<const double> z) {
	if (z.size() != p.config.latent_dim) {
		throw std::invalid_argument("decode: latent length " + std::to_string(z.size()) + " != k " +
		                            std::to_string(p.config.latent_dim));
	}
	HiddenState s;
	s.h = p.latent_to_hidden.apply(z);
	for (double &v : s.h) {
		v = std::tanh(v);
	}
	if (p.config.cell == CellKind::lstm) {
		s.c = p.latent_to_cell.apply(z);
	}
	return s;
}

struct DecoderPass {
	Matrix x_hat;
	Matrix y_hat;
	Vector h0;
	std::vector<rnn::StepCache> steps;
	std::vector<std::uint8_t> fed_own_output;
};

DecoderPass run_decoder(const VaeRnnParams &p, std::span<const double> z, const Matrix &x, std::size_t horizon,
                        const DecodeOptions &options, bool keep_cache) {
	check_window(p, x);
	if (horizon < 1) {
		throw std::invalid_argument("decode: horizon must be >= 1");
	}
	if (options.teacher != nullptr) {
		if (options.teacher->cols() != x.cols() || options.teacher->rows() + 1 < horizon) {
			throw std::invalid_argument("decode: teacher matrix does not cover the horizon");
		}
		if (!options.teacher_forced.empty() && options.teacher_forced.size() != horizon) {
			throw std::invalid_argument("decode: teacher_forced must have one flag per prediction step");
		}
	}
	const std::size_t T = x.rows();
	const std::size_t d = x.cols();
	DecoderPass pass;
	HiddenState state = initial_decoder_state(p, z);
	pass.h0 = state.h;
	pass.x_hat = Matrix(T, d);
	pass.y_hat = Matrix(horizon, d);
	pass.fed_own_output.assign(horizon, 0);
	if (keep_cache) {
		pass.steps.resize(T + horizon);
	}
	const Vector start(d, 0.0);
	for (std::size_t t = 0; t < T; ++t) {
		std::span<const double> input = t == 0 ? std::span<const double>(start) : x.row(t - 1);
		state = rnn::cell_step(p.decoder, input, state, keep_cache ? &pass.steps[t] : nullptr);
		const Vector out = p.recon_head.apply(state.h);
		std::copy(out.begin(), out.end(), pass.x_hat.row(t).begin());
	}
	for (std::size_t j = 0; j < horizon; ++j) {
		Vector input;
		if (j == 0) {
			input.assign(x.row(T - 1).begin(), x.row(T - 1).end());
		} else if (options.teacher != nullptr && !options.teacher_forced.empty() && options.teacher_forced[j] != 0) {
			input.assign(options.teacher->row(j - 1).begin(), options.teacher->row(j - 1).end());
		} else {
			input.assign(pass.y_hat.row(j - 1).begin(), pass.y_hat.row(j - 1).end());
			pass.fed_own_output[j] = 1;
		}
		state = rnn::cell_step(p.decoder, input, state, keep_cache ? &pass.steps[T + j] : nullptr);
		const Vector out = p.pred_head.apply(state.h);
		std::copy(out.begin(), out.end(), pass.y_hat.row(j).begin());
	}
	return pass;
}

} // namespace

LatentState encode(const VaeRnnParams &p, const Matrix &x) {
	return run_encoder(p, x, nullptr).latent;
}

LatentState reparameterize(const LatentState &latent, std::span<const double> epsilon) {
	if (latent.mu.size() != latent.logvar.size() || epsilon.size() != latent.mu.size()) {
		throw std::invalid_argument("reparameterize: mu, logvar and epsilon lengths differ");
	}
	LatentState out = latent;
	out.epsilon.assign(epsilon.begin(), epsilon.end());
	out.z.resize(latent.mu.size());
	for (std::size_t j = 0; j < latent.mu.size(); ++j) {
		out.z[j] = latent.mu[j] + std::exp(0.5 * latent.logvar[j]) * epsilon[j];
	}
	return out;
}

LatentState reparameterize(const LatentState &latent, SeededRng &rng) {
	const Vector eps = sample_standard_normal(rng, latent.mu.size());
	return reparameterize(latent, eps);
}

ModelOutput decode(const VaeRnnParams &p, std::span<const double> z, const Matrix &x, std::size_t horizon,
                   const DecodeOptions &options) {
	DecoderPass pass = run_decoder(p, z, x, horizon, options, false);
	ModelOutput out;
	out.x_hat = std::move(pass.x_hat);
	out.y_hat = std::move(pass.y_hat);
	out.latent.z.assign(z.begin(), z.end());
	return out;
}

Matrix impute(const VaeRnnParams &p, const Matrix &x, std::span<const std::uint8_t> mask) {
	if (mask.size() != x.size()) {
		throw std::invalid_argument("impute: mask size mismatch");
	}
	const auto observed = std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; });
	if (observed == 0) {
		throw std::invalid_argument("impute: window has no observed entries");
	}
	if (static_cast<std::size_t>(observed) == mask.size()) {
		return x;
	}
	const LatentState latent = encode(p, x);
	const ModelOutput out = decode(p, latent.mu, x, 1);
	Matrix filled = x;
	for (std::size_t i = 0; i < x.size(); ++i) {
		if (mask[i] == 0) {
			filled.data()[i] = out.x_hat.data()[i];
		}
	}
	return filled;
}

TrainingPlan draw_training_plan(const VaeRnnConfig &config, std::size_t horizon, double teacher_forcing_prob,
                                bool sample_latent, SeededRng &rng) {
	TrainingPlan plan;
	if (sample_latent) {
		plan.epsilon = sample_standard_normal(rng, config.latent_dim);
	}
	if (teacher_forcing_prob > 0.0) {
		plan.teacher_forced.assign(horizon, 0);
		for (std::size_t j = 1; j < horizon; ++j) {
			plan.teacher_forced[j] = rng.bernoulli(teacher_forcing_prob) ? 1 : 0;
		}
	}
	return plan;
}

ModelOutput forward(const VaeRnnParams &p, const Matrix &x, const Matrix *y, std::size_t horizon,
                    const TrainingPlan &plan, ForwardCache *cache) {
	rnn::SequenceTrace trace;
	EncoderPass enc = run_encoder(p, x, cache != nullptr ? &trace : nullptr);
	LatentState latent = plan.epsilon.empty() ? enc.latent : reparameterize(enc.latent, plan.epsilon);
	if (plan.epsilon.empty()) {
		latent.z = latent.mu;
	}
	DecodeOptions options;
	if (y != nullptr && !plan.teacher_forced.empty()) {
		options.teacher = y;
		options.teacher_forced = plan.teacher_forced;
	}
	DecoderPass dec = run_decoder(p, latent.z, x, horizon, options, cache != nullptr);

	ModelOutput out;
	out.x_hat = std::move(dec.x_hat);
	out.y_hat = std::move(dec.y_hat);
	out.latent = latent;
	if (cache != nullptr) {
		cache->params_fingerprint = fingerprint(p);
		cache->x = x;
		cache->encoder = std::move(trace);
		cache->encoder_final = std::move(enc.final_hidden);
		cache->logvar_clamped = std::move(enc.clamped);
		cache->latent = latent;
		cache->h0 = std::move(dec.h0);
		cache->decoder_steps = std::move(dec.steps);
		cache->fed_own_output = std::move(dec.fed_own_output);
		cache->output = out;
	}
	return out;
}

LossParts evaluate_losses(const ModelOutput &out, const Matrix &x, std::span<const std::uint8_t> mask,
                          const Matrix &y) {
	LossParts parts;
	parts.reconstruction = loss_reconstruction(x, out.x_hat, mask);
	parts.prediction = loss_prediction(y, out.y_hat);
	parts.kl = loss_kl(out.latent.mu, out.latent.logvar);
	return parts;
}

VaeRnnParams model_backward(const VaeRnnParams &p, const ForwardCache &cache, std::span<const std::uint8_t> mask,
                            const Matrix &y, const LossWeights &weights) {
	if (cache.params_fingerprint != fingerprint(p)) {
		throw std::logic_error("model_backward: forward cache is stale (parameters changed since forward pass)");
	}
	const Matrix &x = cache.x;
	const Matrix &x_hat = cache.output.x_hat;
	const Matrix &y_hat = cache.output.y_hat;
	const std::size_t T = x.rows();
	const std::size_t d = x.cols();
	const std::size_t w = y_hat.rows();
	const std::size_t h = p.config.hidden_size;
	const std::size_t k = p.config.latent_dim;
	if (!y.same_shape(y_hat) || cache.decoder_steps.size() != T + w) {
		throw std::invalid_argument("model_backward: targets do not match the cached forward pass");
	}
	if (!mask.empty() && mask.size() != x.size()) {
		throw std::invalid_argument("model_backward: mask size mismatch");
	}

	VaeRnnParams g = zeros_like(p);

	// output-layer gradients of the weighted objective
	std::size_t observed = 0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		observed += (mask.empty() || mask[i] != 0) ? 1 : 0;
	}
	if (observed == 0) {
		throw std::invalid_argument("model_backward: no observed entries");
	}
	Matrix d_xhat(T, d);
	for (std::size_t i = 0; i < x.size(); ++i) {
		if (mask.empty() || mask[i] != 0) {
			d_xhat.data()[i] = weights.alpha * 2.0 * (x_hat.data()[i] - x.data()[i]) / static_cast<double>(observed);
		}
	}
	Matrix d_yhat(w, d);
	for (std::size_t i = 0; i < y.size(); ++i) {
		d_yhat.data()[i] = weights.beta * 2.0 * (y_hat.data()[i] - y.data()[i]) / static_cast<double>(y.size());
	}

	// decoder BPTT, including the autoregressive feedback of predictions
	Vector dh(h, 0.0);
	Vector dc;
	if (p.config.cell == CellKind::lstm) {
		dc.assign(h, 0.0);
	}
	Vector carry(d, 0.0);
	for (std::size_t s = T + w; s-- > 0;) {
		const rnn::StepCache &step = cache.decoder_steps[s];
		Vector d_out(d);
		const bool predicting = s >= T;
		const auto direct = predicting ? d_yhat.row(s - T) : d_xhat.row(s);
		for (std::size_t i = 0; i < d; ++i) {
			d_out[i] = direct[i] + (predicting ? carry[i] : 0.0);
		}
		const Affine &head = predicting ? p.pred_head : p.recon_head;
		Affine &head_grad = predicting ? g.pred_head : g.recon_head;
		head.backward(step.h, d_out, head_grad, dh);
		rnn::StepGradients sg = rnn::cell_step_backward(p.decoder, step, dh, dc, g.decoder);
		if (predicting && cache.fed_own_output[s - T] != 0) {
			carry = std::move(sg.dx);
		} else {
			std::fill(carry.begin(), carry.end(), 0.0);
		}
		dh = std::move(sg.dh_prev);
		dc = std::move(sg.dc_prev);
	}

	// initial state -> latent
	const Vector &z = cache.latent.z;
	Vector dz(k, 0.0);
	Vector d_pre_h(h);
	for (std::size_t i = 0; i < h; ++i) {
		d_pre_h[i] = dh[i] * (1.0 - cache.h0[i] * cache.h0[i]);
	}
	p.latent_to_hidden.backward(z, d_pre_h, g.latent_to_hidden, dz);
	if (p.config.cell == CellKind::lstm) {
		p.latent_to_cell.backward(z, dc, g.latent_to_cell, dz);
	}

	// latent -> (mu, logvar), plus the KL term
	const LatentState &lat = cache.latent;
	Vector d_mu(k), d_logvar(k);
	for (std::size_t j = 0; j < k; ++j) {
		d_mu[j] = dz[j] + weights.gamma * lat.mu[j];
		d_logvar[j] = weights.gamma * 0.5 * std::expm1(lat.logvar[j]);
		if (!lat.epsilon.empty()) {
			d_logvar[j] += dz[j] * 0.5 * std::exp(0.5 * lat.logvar[j]) * lat.epsilon[j];
		}
		if (cache.logvar_clamped[j] != 0) {
			d_logvar[j] = 0.0;
		}
	}
	Vector d_enc(h, 0.0);
	p.mu_head.backward(cache.encoder_final, d_mu, g.mu_head, d_enc);
	p.logvar_head.backward(cache.encoder_final, d_logvar, g.logvar_head, d_enc);

	HiddenState d_final;
	d_final.h = std::move(d_enc);
	rnn::sequence_backward(p.encoder, cache.encoder, Matrix(), d_final, HiddenState{}, g.encoder);
	return g;
}

} // namespace latentcast::model
