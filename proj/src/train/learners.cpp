#include "latentcast/train/learners.hpp"

namespace latentcast::train {

namespace {

LossRecord record_of(const model::LossParts &parts, const model::LossWeights &weights) {
	LossRecord r;
	r.reconstruction = parts.reconstruction;
	r.prediction = parts.prediction;
	r.kl = parts.kl;
	r.total = model::loss_total(parts, weights);
	return r;
}

void require_normalized(const data::WindowedDataset &dataset) {
	if (!dataset.normalized) {
		throw std::invalid_argument("train: dataset must be normalized first");
	}
}

} // namespace

VaeLearner VaeLearner::from_config(const TrainConfig &cfg) {
	VaeLearner l;
	l.weights = cfg.weights;
	l.teacher_forcing = cfg.teacher_forcing;
	l.sample_latent = cfg.sample_latent;
	return l;
}

LossRecord VaeLearner::accumulate(const Params &p, const data::WindowSample &s, SeededRng &rng, Params &grads) const {
	const std::size_t horizon = s.y.rows();
	const model::TrainingPlan plan = model::draw_training_plan(p.config, horizon, teacher_forcing, sample_latent, rng);
	model::ForwardCache cache;
	const model::ModelOutput out = model::forward(p, s.x, &s.y, horizon, plan, &cache);
	const LossRecord loss = record_of(model::evaluate_losses(out, s.x, s.mask, s.y), weights);
	if (loss.finite()) {
		add_scaled(grads, model::model_backward(p, cache, s.mask, s.y, weights), 1.0);
	}
	return loss;
}

LossRecord VaeLearner::evaluate(const Params &p, const data::WindowSample &s) const {
	const model::ModelOutput out = model::forward(p, s.x, nullptr, s.y.rows(), model::TrainingPlan{});
	return record_of(model::evaluate_losses(out, s.x, s.mask, s.y), weights);
}

LossRecord RnnLearner::accumulate(const Params &p, const data::WindowSample &s, SeededRng &, Params &grads) const {
	baselines::RnnForecastCache cache;
	baselines::rnn_forecast(p, s.x, s.y.rows(), &cache);
	LossRecord loss;
	loss.prediction = baselines::rnn_forecast_loss(cache, s.y);
	loss.total = loss.prediction;
	if (loss.finite()) {
		add_scaled(grads, baselines::rnn_forecast_backward(p, cache, s.y), 1.0);
	}
	return loss;
}

LossRecord RnnLearner::evaluate(const Params &p, const data::WindowSample &s) const {
	const Matrix y_hat = baselines::rnn_forecast(p, s.x, s.y.rows());
	LossRecord loss;
	loss.prediction = model::loss_prediction(s.y, y_hat);
	loss.total = loss.prediction;
	return loss;
}

TrainResult<model::VaeRnnParams> train_vae(model::VaeRnnParams params, const data::WindowedDataset &dataset,
                                           const TrainConfig &cfg, const EpochCallback &on_epoch) {
	require_normalized(dataset);
	return fit(VaeLearner::from_config(cfg), std::move(params), dataset.train, cfg, on_epoch);
}

TrainResult<baselines::RnnForecasterParams> rnn_forecast_train(baselines::RnnForecasterParams params,
                                                               const data::WindowedDataset &dataset,
                                                               const TrainConfig &cfg, const EpochCallback &on_epoch) {
	require_normalized(dataset);
	return fit(RnnLearner{}, std::move(params), dataset.train, cfg, on_epoch);
}

} // namespace latentcast::train
