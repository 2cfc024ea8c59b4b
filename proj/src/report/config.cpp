#include "latentcast/report/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace latentcast::report {

using nlohmann::json;

namespace {

void check_keys(const json &section, std::string_view name, const std::set<std::string> &allowed) {
	if (!section.is_object()) {
		throw std::invalid_argument("config: section '" + std::string(name) + "' must be an object");
	}
	for (const auto &[key, value] : section.items()) {
		if (allowed.count(key) == 0) {
			throw std::invalid_argument("config: unknown key '" + std::string(name) + "." + key + "'");
		}
	}
}

template <class T>
void read(const json &section, const char *key, T &target) {
	if (section.contains(key)) {
		try {
			target = section.at(key).get<T>();
		} catch (const json::exception &e) {
			throw std::invalid_argument(std::string("config: bad value for '") + key + "': " + e.what());
		}
	}
}

template <class T>
void read_count(const json &section, const char *key, T &target) {
	if (section.contains(key)) {
		const json &v = section.at(key);
		if (!v.is_number_integer() || v.get<long long>() < 0) {
			throw std::invalid_argument(std::string("config: '") + key + "' must be a non-negative integer");
		}
		target = v.get<T>();
	}
}

} // namespace

void ExperimentConfig::validate() const {
	if (data.source != "synthetic" && data.source != "csv") {
		throw std::invalid_argument("config: data.source must be 'synthetic' or 'csv'");
	}
	if (data.source == "csv" && data.path.empty()) {
		throw std::invalid_argument("config: data.path is required for csv data");
	}
	data.windowing.validate();
	train.validate();
	benchmark().validate();
	vae(1).validate();
}

train::BenchmarkConfig ExperimentConfig::benchmark() const {
	train::BenchmarkConfig b;
	b.models = models;
	b.horizons = horizons;
	b.windowing = data.windowing;
	b.vae_hidden = model.hidden_size;
	b.vae_latent = model.latent_dim;
	b.rnn_hidden = model.rnn_hidden;
	b.arima = model.arima;
	b.train = train;
	b.clarke_floor = clarke_floor;
	return b;
}

model::VaeRnnConfig ExperimentConfig::vae(std::size_t input_dim) const {
	model::VaeRnnConfig c;
	c.cell = model.cell;
	c.input_dim = input_dim;
	c.hidden_size = model.hidden_size;
	c.latent_dim = model.latent_dim;
	c.window = data.windowing.window;
	c.horizon = data.windowing.horizon;
	return c;
}

ExperimentConfig parse_config(const json &doc) {
	check_keys(doc, "<root>", {"data", "model", "train", "benchmark"});
	ExperimentConfig cfg;
	if (doc.contains("data")) {
		const json &d = doc.at("data");
		check_keys(d, "data", {"source", "path", "step_seconds", "window", "horizon", "stride", "train_fraction",
		                       "min_observed_fraction", "id_column", "synthetic"});
		read(d, "source", cfg.data.source);
		std::string path;
		read(d, "path", path);
		cfg.data.path = path;
		read(d, "step_seconds", cfg.data.csv.step_seconds);
		read(d, "id_column", cfg.data.csv.id_column);
		read_count(d, "window", cfg.data.windowing.window);
		read_count(d, "horizon", cfg.data.windowing.horizon);
		read_count(d, "stride", cfg.data.windowing.stride);
		read(d, "train_fraction", cfg.data.windowing.train_fraction);
		read(d, "min_observed_fraction", cfg.data.windowing.min_observed_fraction);
		if (d.contains("synthetic")) {
			const json &s = d.at("synthetic");
			check_keys(s, "data.synthetic", {"n_samples", "noise_scale", "gap_length", "offset", "scale"});
			read_count(s, "n_samples", cfg.data.synthetic.options.n_samples);
			read(s, "noise_scale", cfg.data.synthetic.options.noise_scale);
			read_count(s, "gap_length", cfg.data.synthetic.options.gap_length);
			read(s, "offset", cfg.data.synthetic.offset);
			read(s, "scale", cfg.data.synthetic.scale);
		}
	}
	if (doc.contains("model")) {
		const json &m = doc.at("model");
		check_keys(m, "model", {"cell", "hidden_size", "latent_dim", "rnn_hidden", "arima_p", "arima_d"});
		if (m.contains("cell")) {
			cfg.model.cell = rnn::parse_cell_kind(m.at("cell").get<std::string>());
		}
		read_count(m, "hidden_size", cfg.model.hidden_size);
		read_count(m, "latent_dim", cfg.model.latent_dim);
		read_count(m, "rnn_hidden", cfg.model.rnn_hidden);
		read_count(m, "arima_p", cfg.model.arima.p);
		read_count(m, "arima_d", cfg.model.arima.d);
	}
	if (doc.contains("train")) {
		const json &t = doc.at("train");
		check_keys(t, "train", {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon", "clip_norm",
		                        "seed", "alpha", "beta", "gamma", "teacher_forcing", "sample_latent",
		                        "validation_fraction"});
		read_count(t, "epochs", cfg.train.epochs);
		read_count(t, "batch_size", cfg.train.batch_size);
		read(t, "learning_rate", cfg.train.adam.learning_rate);
		read(t, "beta1", cfg.train.adam.beta1);
		read(t, "beta2", cfg.train.adam.beta2);
		read(t, "epsilon", cfg.train.adam.epsilon);
		read(t, "clip_norm", cfg.train.clip_norm);
		read_count(t, "seed", cfg.train.seed);
		read(t, "alpha", cfg.train.weights.alpha);
		read(t, "beta", cfg.train.weights.beta);
		read(t, "gamma", cfg.train.weights.gamma);
		read(t, "teacher_forcing", cfg.train.teacher_forcing);
		read(t, "sample_latent", cfg.train.sample_latent);
		read(t, "validation_fraction", cfg.train.validation_fraction);
	}
	if (doc.contains("benchmark")) {
		const json &b = doc.at("benchmark");
		check_keys(b, "benchmark", {"models", "horizons", "clarke_floor"});
		if (b.contains("models")) {
			cfg.models.clear();
			for (const json &name : b.at("models")) {
				cfg.models.push_back(train::parse_model_kind(name.get<std::string>()));
			}
		}
		if (b.contains("horizons")) {
			cfg.horizons.clear();
			for (const json &h : b.at("horizons")) {
				if (!h.is_number_integer() || h.get<long long>() < 1) {
					throw std::invalid_argument("config: benchmark.horizons must hold positive integers");
				}
				cfg.horizons.push_back(h.get<std::size_t>());
			}
		}
		read(b, "clarke_floor", cfg.clarke_floor);
	}
	cfg.set_seed(cfg.train.seed);
	cfg.data.synthetic.options.step_seconds = cfg.data.csv.step_seconds;
	cfg.validate();
	return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw std::runtime_error("cannot open config file " + path.string());
	}
	json doc;
	try {
		doc = json::parse(in);
	} catch (const json::parse_error &e) {
		throw std::invalid_argument("config " + path.string() + ": " + e.what());
	}
	return parse_config(doc);
}

json config_to_json(const ExperimentConfig &c) {
	json models = json::array();
	for (train::ModelKind k : c.models) {
		models.push_back(std::string(train::model_name(k)));
	}
	return json{
	    {"data",
	     {{"source", c.data.source},
	      {"path", c.data.path.string()},
	      {"step_seconds", c.data.csv.step_seconds},
	      {"id_column", c.data.csv.id_column},
	      {"window", c.data.windowing.window},
	      {"horizon", c.data.windowing.horizon},
	      {"stride", c.data.windowing.stride},
	      {"train_fraction", c.data.windowing.train_fraction},
	      {"min_observed_fraction", c.data.windowing.min_observed_fraction},
	      {"synthetic",
	       {{"n_samples", c.data.synthetic.options.n_samples},
	        {"noise_scale", c.data.synthetic.options.noise_scale},
	        {"gap_length", c.data.synthetic.options.gap_length},
	        {"offset", c.data.synthetic.offset},
	        {"scale", c.data.synthetic.scale}}}}},
	    {"model",
	     {{"cell", std::string(rnn::to_string(c.model.cell))},
	      {"hidden_size", c.model.hidden_size},
	      {"latent_dim", c.model.latent_dim},
	      {"rnn_hidden", c.model.rnn_hidden},
	      {"arima_p", c.model.arima.p},
	      {"arima_d", c.model.arima.d}}},
	    {"train",
	     {{"epochs", c.train.epochs},
	      {"batch_size", c.train.batch_size},
	      {"learning_rate", c.train.adam.learning_rate},
	      {"beta1", c.train.adam.beta1},
	      {"beta2", c.train.adam.beta2},
	      {"epsilon", c.train.adam.epsilon},
	      {"clip_norm", c.train.clip_norm},
	      {"seed", c.train.seed},
	      {"alpha", c.train.weights.alpha},
	      {"beta", c.train.weights.beta},
	      {"gamma", c.train.weights.gamma},
	      {"teacher_forcing", c.train.teacher_forcing},
	      {"sample_latent", c.train.sample_latent},
	      {"validation_fraction", c.train.validation_fraction}}},
	    {"benchmark", {{"models", models}, {"horizons", c.horizons}, {"clarke_floor", c.clarke_floor}}},
	};
}

std::vector<data::TimeSeries> load_series(const DataConfig &config) {
	if (config.source == "csv") {
		return data::load_csv(config.path, config.csv);
	}
	const data::SynthTriple triple = data::synth_generate(config.synthetic.options);
	std::vector<data::TimeSeries> out;
	for (const data::TimeSeries &s : triple.series) {
		data::TimeSeries r = data::affine_rescale(s, config.synthetic.offset, config.synthetic.scale);
		r.channels = {"glucose"};
		out.push_back(std::move(r));
	}
	return out;
}

} // namespace latentcast::report
