#pragma once

#include "latentcast/data/synth.hpp"
#include "latentcast/data/windows.hpp"
#include "latentcast/model/vae_rnn.hpp"
#include "latentcast/train/trainer.hpp"

namespace latentcast::train {

/// Fills every masked entry of `series` (original units) with the model's
/// reconstruction. The series is normalized with `stats`, cut into windows
/// of the model's length at stride T (the last one aligned to the end), and
/// each window is imputed from z = mu. A window with no observed entry is
/// decoded from the prior mean z = 0. Returns a fully observed copy.
data::TimeSeries impute_series(const model::VaeRnnParams &p, const data::TimeSeries &series,
                               const data::NormalizationStats &stats);

struct ImputationConfig {
	model::VaeRnnConfig model;           // input_dim is set to 3
	data::WindowingOptions windowing;    // train_fraction 1: the gap truth is never seen anyway
	TrainConfig train;

	ImputationConfig();
};

struct ImputationReport {
	data::TimeSeries stacked;   // three channels, ts3 gap masked
	data::TimeSeries filled;    // model output, no gaps
	std::size_t gap_start = 0;
	Vector truth;               // hidden ts3 values
	Vector imputed;             // model values over the gap
	double mean_fill_value = 0.0;
	double model_mse = 0.0;
	double mean_fill_mse = 0.0;
	TrainTrace trace;
	model::VaeRnnParams params;
	data::NormalizationStats stats;
};

/// Trains a VAE on the stacked synthetic triple (the gap stays masked) and
/// scores its reconstruction of the hidden ts3 segment against filling the
/// gap with the observed ts3 mean.
ImputationReport run_imputation_experiment(const data::SynthTriple &triple, const ImputationConfig &config,
                                           const EpochCallback &on_epoch = {});

} // namespace latentcast::train
