#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentcast/data/windows.hpp"
#include "latentcast/model/losses.hpp"
#include "latentcast/numeric/rng.hpp"
#include "latentcast/train/optimizer.hpp"

namespace latentcast::train {

struct TrainConfig {
	std::size_t epochs = 20;
	std::size_t batch_size = 32;
	AdamConfig adam;
	double clip_norm = 5.0;
	std::uint64_t seed = 0;
	model::LossWeights weights;
	/// Probability that a prediction step reads the true previous value
	/// during VAE training.
	double teacher_forcing = 0.5;
	/// Sample z = mu + sigma * eps during training (z = mu otherwise).
	bool sample_latent = true;
	/// Trailing share of each series' training windows held out for the
	/// per-epoch validation loss.
	double validation_fraction = 0.1;

	void validate() const;
};

/// Loss components of one sample or an average over samples. Learners
/// without a term leave it at zero.
struct LossRecord {
	double reconstruction = 0.0;
	double prediction = 0.0;
	double kl = 0.0;
	double total = 0.0;

	bool finite() const {
		return std::isfinite(reconstruction) && std::isfinite(prediction) && std::isfinite(kl) && std::isfinite(total);
	}
	void add(const LossRecord &o, double scale = 1.0) {
		reconstruction += scale * o.reconstruction;
		prediction += scale * o.prediction;
		kl += scale * o.kl;
		total += scale * o.total;
	}
};

struct EpochRecord {
	std::size_t epoch = 0; // 1-based
	LossRecord train;      // mean over the epoch's training samples
	double validation_total = 0.0;
};

struct TrainTrace {
	std::vector<EpochRecord> epochs;
	/// Global gradient norm after clipping, one entry per optimizer step.
	std::vector<double> clipped_grad_norms;
	std::size_t train_samples = 0;
	std::size_t validation_samples = 0;
};

/// First epoch (1-based) whose validation loss is within 1% (relative) of
/// the trace minimum. Throws on an empty trace.
std::size_t epochs_to_converge(const TrainTrace &trace);
std::size_t epochs_to_converge(std::span<const double> validation_losses);

/// Chronological hold-out: the last ceil(fraction * n) training windows of
/// every series (keeping at least one for training) go to validation.
struct SampleSplit {
	std::vector<std::size_t> train;
	std::vector<std::size_t> validation;
};
SampleSplit split_validation(const std::vector<data::WindowSample> &samples, double fraction);

template <class P>
struct TrainResult {
	P params;
	TrainTrace trace;
};

using EpochCallback = std::function<void(const EpochRecord &)>;

/// Mini-batch training loop shared by every learnable model.
///
/// A Learner provides
///   using Params = ...;
///   LossRecord accumulate(const Params&, const WindowSample&, SeededRng&, Params& grads) const;
///   LossRecord evaluate(const Params&, const WindowSample&) const;
/// where accumulate adds the sample's gradient into grads. Batch gradients
/// are sample means, clipped by global norm, then applied with Adam. All
/// randomness (shuffle order, then per-sample draws in visiting order)
/// comes from one stream seeded with cfg.seed.
template <class Learner>
TrainResult<typename Learner::Params> fit(const Learner &learner, typename Learner::Params params,
                                          const std::vector<data::WindowSample> &samples, const TrainConfig &cfg,
                                          const EpochCallback &on_epoch = {}) {
	using Params = typename Learner::Params;
	cfg.validate();
	TrainResult<Params> result{std::move(params), {}};
	if (cfg.epochs == 0) {
		return result;
	}
	if (samples.empty()) {
		throw std::invalid_argument("train: empty training set");
	}
	const SampleSplit split = split_validation(samples, cfg.validation_fraction);
	result.trace.train_samples = split.train.size();
	result.trace.validation_samples = split.validation.size();

	SeededRng rng(cfg.seed);
	Adam<Params> adam(result.params, cfg.adam);
	std::vector<std::size_t> order = split.train;
	std::size_t batch_counter = 0;
	for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
		shuffle_in_place(order, rng);
		LossRecord epoch_sum;
		for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
			const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
			Params grads = zeros_like(result.params);
			for (std::size_t i = begin; i < end; ++i) {
				const LossRecord loss = learner.accumulate(result.params, samples[order[i]], rng, grads);
				if (!loss.finite()) {
					throw std::runtime_error("train: non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
					                         std::to_string(begin / cfg.batch_size) + " (global batch " +
					                         std::to_string(batch_counter) + ")");
				}
				epoch_sum.add(loss);
			}
			scale_in_place(grads, 1.0 / static_cast<double>(end - begin));
			clip_global_norm(grads, cfg.clip_norm);
			result.trace.clipped_grad_norms.push_back(global_norm(grads));
			adam.step(result.params, grads);
			++batch_counter;
		}
		EpochRecord record;
		record.epoch = epoch;
		record.train.add(epoch_sum, 1.0 / static_cast<double>(order.size()));
		if (split.validation.empty()) {
			record.validation_total = record.train.total;
		} else {
			double v = 0.0;
			for (std::size_t idx : split.validation) {
				v += learner.evaluate(result.params, samples[idx]).total;
			}
			record.validation_total = v / static_cast<double>(split.validation.size());
		}
		if (!std::isfinite(record.validation_total)) {
			throw std::runtime_error("train: non-finite validation loss in epoch " + std::to_string(epoch));
		}
		result.trace.epochs.push_back(record);
		if (on_epoch) {
			on_epoch(record);
		}
	}
	return result;
}

} // namespace latentcast::train
