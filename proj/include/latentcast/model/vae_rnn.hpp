#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "latentcast/model/losses.hpp"
#include "latentcast/numeric/affine.hpp"
#include "latentcast/numeric/rng.hpp"
#include "latentcast/rnn/sequence.hpp"

namespace latentcast::model {

inline constexpr double kLogvarMin = -20.0;
inline constexpr double kLogvarMax = 20.0;

struct VaeRnnConfig {
	rnn::CellKind cell = rnn::CellKind::gru;
	std::size_t input_dim = 1;    // d
	std::size_t hidden_size = 64; // h
	std::size_t latent_dim = 8;   // k
	std::size_t window = 24;      // T
	std::size_t horizon = 12;     // w

	void validate() const;
	friend bool operator==(const VaeRnnConfig &, const VaeRnnConfig &) = default;
};

/// Learnable tensors of the recurrent VAE: encoder cell, Gaussian heads,
/// latent-to-initial-state maps, decoder cell and the two output heads.
struct VaeRnnParams {
	VaeRnnConfig config;
	rnn::CellParams encoder;
	Affine mu_head;           // h -> k
	Affine logvar_head;       // h -> k
	Affine latent_to_hidden;  // k -> h, followed by tanh
	Affine latent_to_cell;    // k -> h, LSTM only (empty for GRU)
	rnn::CellParams decoder;
	Affine recon_head;        // h -> d
	Affine pred_head;         // h -> d

	static VaeRnnParams initialized(const VaeRnnConfig &config, SeededRng &rng);

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
		self.encoder.visit("encoder", f);
		Affine::visit(self.mu_head, "mu_head", f);
		Affine::visit(self.logvar_head, "logvar_head", f);
		Affine::visit(self.latent_to_hidden, "latent_to_hidden", f);
		if (self.config.cell == rnn::CellKind::lstm) {
			Affine::visit(self.latent_to_cell, "latent_to_cell", f);
		}
		self.decoder.visit("decoder", f);
		Affine::visit(self.recon_head, "recon_head", f);
		Affine::visit(self.pred_head, "pred_head", f);
	}
};

struct LatentState {
	Vector mu;
	Vector logvar;  // clamped to [kLogvarMin, kLogvarMax]
	Vector z;
	Vector epsilon; // empty when z = mu
};

struct ModelOutput {
	Matrix x_hat; // T x d
	Matrix y_hat; // w x d
	LatentState latent;
};

/// Gaussian posterior parameters from the encoder's final hidden state. `z`
/// and `epsilon` are left empty.
LatentState encode(const VaeRnnParams &p, const Matrix &x);

/// z = mu + exp(logvar / 2) * epsilon with epsilon ~ N(0, I) drawn from rng.
LatentState reparameterize(const LatentState &latent, SeededRng &rng);
LatentState reparameterize(const LatentState &latent, std::span<const double> epsilon);

/// Decoder feeding policy for the prediction phase. When `teacher` is set,
/// prediction step j >= 1 reads teacher row j-1 wherever teacher_forced[j]
/// is non-zero, and its own previous output otherwise.
struct DecodeOptions {
	const Matrix *teacher = nullptr;
	std::vector<std::uint8_t> teacher_forced;
};

/// Runs the decoder from h0 = tanh(latent_to_hidden(z)). The reconstruction
/// phase consumes the window shifted by one step (a zero vector first) and
/// emits x_hat row by row; the prediction phase starts from the last window
/// row and then feeds back its own outputs for `horizon` steps.
/// `latent` of the result holds only z.
ModelOutput decode(const VaeRnnParams &p, std::span<const double> z, const Matrix &x, std::size_t horizon,
                   const DecodeOptions &options = {});

/// Replaces masked entries (mask == 0) with the reconstruction decoded from
/// z = mu. Observed entries are returned unchanged. Throws when nothing is
/// observed.
Matrix impute(const VaeRnnParams &p, const Matrix &x, std::span<const std::uint8_t> mask);

/// Noise and feeding decisions for one training forward pass; drawing them
/// up front keeps forward/backward reproducible.
struct TrainingPlan {
	Vector epsilon;                          // empty: z = mu
	std::vector<std::uint8_t> teacher_forced; // size horizon or empty
};

TrainingPlan draw_training_plan(const VaeRnnConfig &config, std::size_t horizon, double teacher_forcing_prob,
                                bool sample_latent, SeededRng &rng);

struct ForwardCache {
	std::uint64_t params_fingerprint = 0;
	Matrix x;
	rnn::SequenceTrace encoder;
	Vector encoder_final;
	std::vector<std::uint8_t> logvar_clamped;
	LatentState latent;
	Vector h0;
	std::vector<rnn::StepCache> decoder_steps;
	std::vector<std::uint8_t> fed_own_output; // per prediction step
	ModelOutput output;
};

ModelOutput forward(const VaeRnnParams &p, const Matrix &x, const Matrix *y, std::size_t horizon,
                    const TrainingPlan &plan, ForwardCache *cache = nullptr);

LossParts evaluate_losses(const ModelOutput &out, const Matrix &x, std::span<const std::uint8_t> mask,
                          const Matrix &y);

/// Exact gradient of loss_total for the pass recorded in `cache`. Throws
/// std::logic_error if `p` changed since that forward pass.
VaeRnnParams model_backward(const VaeRnnParams &p, const ForwardCache &cache, std::span<const std::uint8_t> mask,
                            const Matrix &y, const LossWeights &weights);

} // namespace latentcast::model
