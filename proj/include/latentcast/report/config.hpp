#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentcast/data/synth.hpp"
#include "latentcast/model/vae_rnn.hpp"
#include "latentcast/train/benchmark.hpp"

namespace latentcast::report {

struct SyntheticSource {
	data::SynthOptions options;
	/// Benchmark series are offset + scale * value so they read as mg/dL.
	double offset = 150.0;
	double scale = 40.0;
};

struct DataConfig {
	std::string source = "synthetic"; // "synthetic" or "csv"
	std::filesystem::path path;       // csv only
	data::CsvSchema csv;
	SyntheticSource synthetic;
	data::WindowingOptions windowing;
};

struct ModelConfig {
	rnn::CellKind cell = rnn::CellKind::gru;
	std::size_t hidden_size = 64;
	std::size_t latent_dim = 8;
	std::size_t rnn_hidden = 64;
	baselines::ArConfig arima;
};

struct ExperimentConfig {
	DataConfig data;
	ModelConfig model;
	train::TrainConfig train;
	std::vector<train::ModelKind> models{train::kAllModels.begin(), train::kAllModels.end()};
	std::vector<std::size_t> horizons{6, 12, 24, 36, 48};
	double clarke_floor = 1.0;

	void validate() const;
	/// Master seed for training and for the synthetic generator.
	void set_seed(std::uint64_t seed) {
		train.seed = seed;
		data.synthetic.options.seed = seed;
	}
	train::BenchmarkConfig benchmark() const;
	/// VAE shape for single-model commands; input_dim comes from the data.
	model::VaeRnnConfig vae(std::size_t input_dim) const;
};

/// Parses the four-section JSON document; any key not listed in the
/// configuration reference is an error. Missing keys keep their defaults.
ExperimentConfig parse_config(const nlohmann::json &doc);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Every setting, defaults included, in the same schema.
nlohmann::json config_to_json(const ExperimentConfig &config);

/// The three synthetic series rescaled to mg/dL, or the CSV file's series.
std::vector<data::TimeSeries> load_series(const DataConfig &config);

} // namespace latentcast::report
