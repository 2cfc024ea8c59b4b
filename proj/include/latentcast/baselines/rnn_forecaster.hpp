#pragma once

#include <cstdint>
#include <vector>

#include "latentcast/numeric/affine.hpp"
#include "latentcast/rnn/sequence.hpp"

namespace latentcast::baselines {

struct RnnForecasterConfig {
	rnn::CellKind cell = rnn::CellKind::gru;
	bool bidirectional = false;
	std::size_t input_dim = 1;
	std::size_t hidden_size = 64;

	std::size_t context_width() const { return bidirectional ? 2 * hidden_size : hidden_size; }
	void validate() const;
	friend bool operator==(const RnnForecasterConfig &, const RnnForecasterConfig &) = default;
};

/// Plain recurrent forecaster. The window is read by `forward` (and, when
/// bidirectional, by `reverse` in the opposite direction); the head maps
/// [h_forward; h_reverse] to the next value. The horizon is rolled out by
/// the forward cell alone, feeding back its own predictions, with the
/// reverse summary held fixed.
struct RnnForecasterParams {
	RnnForecasterConfig config;
	rnn::CellParams forward;
	rnn::CellParams reverse; // empty unless bidirectional
	Affine head;             // context_width -> d

	static RnnForecasterParams initialized(const RnnForecasterConfig &config, SeededRng &rng);

	template <class F>
	void visit(F &&f) {
		visit_impl(*this, f);
	}
	template <class F>
	void visit(F &&f) const {
		visit_impl(*this, f);
	}

private:
	template <class Self, class F>
	static void visit_impl(Self &self, F &f) {
		self.forward.visit("forward", f);
		if (self.config.bidirectional) {
			self.reverse.visit("reverse", f);
		}
		Affine::visit(self.head, "head", f);
	}
};

struct RnnForecastCache {
	std::uint64_t params_fingerprint = 0;
	rnn::SequenceTrace encoder;
	Vector reverse_summary;                 // empty unless bidirectional
	std::vector<Vector> head_inputs;        // per horizon step
	std::vector<rnn::StepCache> rollout;    // steps 1 .. w-1
	Matrix y_hat;
};

/// w x d forecast for one T x d window.
Matrix rnn_forecast(const RnnForecasterParams &p, const Matrix &x, std::size_t horizon,
                    RnnForecastCache *cache = nullptr);

/// Mean squared error of the cached forecast against y.
double rnn_forecast_loss(const RnnForecastCache &cache, const Matrix &y);

/// Exact gradient of rnn_forecast_loss for the cached pass. Throws
/// std::logic_error if `p` changed since the forward pass.
RnnForecasterParams rnn_forecast_backward(const RnnForecasterParams &p, const RnnForecastCache &cache,
                                          const Matrix &y);

} // namespace latentcast::baselines
