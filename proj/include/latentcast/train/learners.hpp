#pragma once

#include "latentcast/baselines/rnn_forecaster.hpp"
#include "latentcast/model/vae_rnn.hpp"
#include "latentcast/train/trainer.hpp"

namespace latentcast::train {

/// Recurrent VAE objective alpha*reco + beta*pred + gamma*KL. Training
/// passes sample z and teacher forcing per TrainConfig; evaluation uses
/// z = mu and a free-running rollout.
struct VaeLearner {
	using Params = model::VaeRnnParams;

	model::LossWeights weights;
	double teacher_forcing = 0.5;
	bool sample_latent = true;

	static VaeLearner from_config(const TrainConfig &cfg);

	LossRecord accumulate(const Params &p, const data::WindowSample &s, SeededRng &rng, Params &grads) const;
	LossRecord evaluate(const Params &p, const data::WindowSample &s) const;
};

/// Pure prediction MSE of a plain recurrent forecaster.
struct RnnLearner {
	using Params = baselines::RnnForecasterParams;

	LossRecord accumulate(const Params &p, const data::WindowSample &s, SeededRng &rng, Params &grads) const;
	LossRecord evaluate(const Params &p, const data::WindowSample &s) const;
};

TrainResult<model::VaeRnnParams> train_vae(model::VaeRnnParams params, const data::WindowedDataset &dataset,
                                           const TrainConfig &cfg, const EpochCallback &on_epoch = {});

TrainResult<baselines::RnnForecasterParams> rnn_forecast_train(baselines::RnnForecasterParams params,
                                                               const data::WindowedDataset &dataset,
                                                               const TrainConfig &cfg,
                                                               const EpochCallback &on_epoch = {});

} // namespace latentcast::train
