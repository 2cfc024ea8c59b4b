#include "latentcast/train/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <stdexcept>

#include "latentcast/baselines/naive.hpp"
#include "latentcast/baselines/rnn_forecaster.hpp"
#include "latentcast/model/vae_rnn.hpp"
#include "latentcast/train/learners.hpp"

namespace latentcast::train {

std::string_view model_name(ModelKind kind) {
	switch (kind) {
	case ModelKind::forward_fill: return "ForwardFill";
	case ModelKind::linear_trend: return "LinearTrend";
	case ModelKind::arima: return "ARIMA";
	case ModelKind::lstm: return "LSTM";
	case ModelKind::gru: return "GRU";
	case ModelKind::bilstm: return "BiLSTM";
	case ModelKind::bigru: return "BiGRU";
	case ModelKind::vae_lstm: return "VAE-LSTM";
	case ModelKind::vae_gru: return "VAE-GRU";
	}
	throw std::invalid_argument("model_name: unknown model kind");
}

ModelKind parse_model_kind(std::string_view name) {
	auto same = [](std::string_view a, std::string_view b) {
		return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
			       return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
		       });
	};
	for (ModelKind k : kAllModels) {
		if (same(model_name(k), name)) {
			return k;
		}
	}
	throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

bool is_learned(ModelKind kind) {
	return kind != ModelKind::forward_fill && kind != ModelKind::linear_trend && kind != ModelKind::arima;
}

void BenchmarkConfig::validate() const {
	if (models.empty()) {
		throw std::invalid_argument("benchmark: no models configured");
	}
	if (horizons.empty()) {
		throw std::invalid_argument("benchmark: no horizons configured");
	}
	for (std::size_t h : horizons) {
		if (h < 1) {
			throw std::invalid_argument("benchmark: horizons must be >= 1");
		}
	}
	for (std::size_t i = 0; i < models.size(); ++i) {
		for (std::size_t j = i + 1; j < models.size(); ++j) {
			if (models[i] == models[j]) {
				throw std::invalid_argument("benchmark: model '" + std::string(model_name(models[i])) + "' listed twice");
			}
		}
	}
	if (vae_hidden < 1 || vae_latent < 1 || rnn_hidden < 1) {
		throw std::invalid_argument("benchmark: hidden and latent sizes must be >= 1");
	}
	if (!(clarke_floor > 0.0)) {
		throw std::invalid_argument("benchmark: clarke_floor must be > 0");
	}
	train.validate();
}

std::size_t BenchmarkResult::succeeded() const {
	return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const ModelRun &r) { return r.ok; }));
}

HorizonMetrics evaluate_horizon(const std::vector<Vector> &references, const std::vector<Vector> &predictions,
                                const std::vector<std::size_t> &series_of_window,
                                const std::vector<std::string> &series_ids, std::size_t horizon, double clarke_floor) {
	if (references.size() != predictions.size() || references.size() != series_of_window.size()) {
		throw std::invalid_argument("evaluate_horizon: window counts differ");
	}
	std::map<std::size_t, metrics::ForecastResult> grouped;
	for (std::size_t i = 0; i < references.size(); ++i) {
		if (references[i].size() < horizon || predictions[i].size() < horizon) {
			throw std::invalid_argument("evaluate_horizon: window shorter than the horizon");
		}
		metrics::ForecastResult &r = grouped[series_of_window[i]];
		r.reference.insert(r.reference.end(), references[i].begin(), references[i].begin() + horizon);
		r.predicted.insert(r.predicted.end(), predictions[i].begin(), predictions[i].begin() + horizon);
	}
	HorizonMetrics out;
	out.horizon = horizon;
	for (auto &[series, r] : grouped) {
		r.horizon_steps = horizon;
		r.series_id = series < series_ids.size() ? series_ids[series] : std::to_string(series);
		r.validate();
		Vector floored = r.predicted;
		for (double &v : floored) {
			v = std::max(v, clarke_floor);
		}
		const metrics::ClarkeSummary zones = metrics::clarke_summary(r.reference, floored);
		SeriesMetrics m;
		m.series_id = r.series_id;
		m.points = r.reference.size();
		m.values = {metrics::rmse(r), metrics::mape(r), metrics::nmape(r), zones.percent[0], zones.percent[1],
		            zones.percent[2], zones.percent[3], zones.percent[4]};
		out.per_series.push_back(std::move(m));
	}
	for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
		Vector column;
		for (const SeriesMetrics &m : out.per_series) {
			column.push_back(m.values[k]);
		}
		if (!column.empty()) {
			out.summary[k] = metrics::aggregate(column);
		}
	}
	return out;
}

namespace {

Vector glucose_column(const Matrix &m, const data::NormalizationStats &stats) {
	Vector out(m.rows());
	for (std::size_t t = 0; t < m.rows(); ++t) {
		out[t] = stats.denormalize(m(t, 0), 0);
	}
	return out;
}

std::vector<Vector> forecast_naive(ModelKind kind, const data::WindowedDataset &ds, std::size_t horizon,
                                   const baselines::ArConfig &ar, std::size_t &fallbacks) {
	std::vector<Vector> out;
	out.reserve(ds.test.size());
	for (const data::WindowSample &s : ds.test) {
		const Matrix x = data::denormalize(s.x, ds.stats);
		if (kind == ModelKind::arima) {
			Vector history(x.rows());
			for (std::size_t t = 0; t < x.rows(); ++t) {
				history[t] = x(t, 0);
			}
			try {
				out.push_back(baselines::ar_fit_forecast(history, ar, horizon));
				continue;
			} catch (const std::runtime_error &) {
				++fallbacks;
			}
		}
		const Matrix f = kind == ModelKind::linear_trend ? baselines::linear_trend_forecast(x, s.mask, horizon)
		                                                 : baselines::forward_fill_forecast(x, s.mask, horizon);
		Vector g(horizon);
		for (std::size_t j = 0; j < horizon; ++j) {
			g[j] = f(j, 0);
		}
		out.push_back(std::move(g));
	}
	return out;
}

std::vector<Vector> forecast_rnn(ModelKind kind, const data::WindowedDataset &ds, const BenchmarkConfig &cfg,
                                 std::uint64_t seed, std::size_t horizon, TrainTrace &trace) {
	baselines::RnnForecasterConfig rc;
	rc.cell = (kind == ModelKind::lstm || kind == ModelKind::bilstm) ? rnn::CellKind::lstm : rnn::CellKind::gru;
	rc.bidirectional = kind == ModelKind::bilstm || kind == ModelKind::bigru;
	rc.input_dim = ds.dims();
	rc.hidden_size = cfg.rnn_hidden;
	SeededRng init(seed);
	TrainConfig tc = cfg.train;
	tc.seed = seed;
	auto trained = rnn_forecast_train(baselines::RnnForecasterParams::initialized(rc, init), ds, tc);
	trace = std::move(trained.trace);
	std::vector<Vector> out;
	out.reserve(ds.test.size());
	for (const data::WindowSample &s : ds.test) {
		out.push_back(glucose_column(baselines::rnn_forecast(trained.params, s.x, horizon), ds.stats));
	}
	return out;
}

std::vector<Vector> forecast_vae(ModelKind kind, const data::WindowedDataset &ds, const BenchmarkConfig &cfg,
                                 std::uint64_t seed, std::size_t horizon, TrainTrace &trace) {
	model::VaeRnnConfig mc;
	mc.cell = kind == ModelKind::vae_lstm ? rnn::CellKind::lstm : rnn::CellKind::gru;
	mc.input_dim = ds.dims();
	mc.hidden_size = cfg.vae_hidden;
	mc.latent_dim = cfg.vae_latent;
	mc.window = ds.options.window;
	mc.horizon = horizon;
	SeededRng init(seed);
	TrainConfig tc = cfg.train;
	tc.seed = seed;
	auto trained = train_vae(model::VaeRnnParams::initialized(mc, init), ds, tc);
	trace = std::move(trained.trace);
	std::vector<Vector> out;
	out.reserve(ds.test.size());
	for (const data::WindowSample &s : ds.test) {
		const model::ModelOutput o = model::forward(trained.params, s.x, nullptr, horizon, model::TrainingPlan{});
		out.push_back(glucose_column(o.y_hat, ds.stats));
	}
	return out;
}

} // namespace

BenchmarkResult run_benchmark(const std::vector<data::TimeSeries> &series, const BenchmarkConfig &config,
                              const ProgressCallback &progress) {
	config.validate();
	BenchmarkResult result;
	result.config = config;
	const std::size_t max_h = *std::max_element(config.horizons.begin(), config.horizons.end());
	data::WindowingOptions wopt = config.windowing;
	wopt.horizon = max_h;
	const data::WindowedDataset ds = data::normalize(data::make_windows(series, wopt));
	result.config.windowing = wopt;
	result.drops = ds.drops;
	result.train_windows = ds.train.size();
	result.test_windows = ds.test.size();
	result.series_ids = ds.series_ids;
	if (ds.test.empty()) {
		throw std::invalid_argument("benchmark: no test windows survive windowing");
	}
	for (const data::WindowSample &s : ds.test) {
		result.test_series.push_back(s.series_index);
		result.references.push_back(glucose_column(s.y, ds.stats));
	}

	for (ModelKind kind : config.models) {
		ModelRun run;
		run.kind = kind;
		const auto index = static_cast<std::uint64_t>(
		    std::find(kAllModels.begin(), kAllModels.end(), kind) - kAllModels.begin());
		run.seed = config.train.seed + index;
		if (progress) {
			progress(std::string(model_name(kind)) + ": start");
		}
		const auto t0 = std::chrono::steady_clock::now();
		try {
			TrainTrace trace;
			if (!is_learned(kind)) {
				run.predictions = forecast_naive(kind, ds, max_h, config.arima, run.fallbacks);
			} else if (kind == ModelKind::vae_gru || kind == ModelKind::vae_lstm) {
				run.predictions = forecast_vae(kind, ds, config, run.seed, max_h, trace);
			} else {
				run.predictions = forecast_rnn(kind, ds, config, run.seed, max_h, trace);
			}
			if (is_learned(kind)) {
				if (!trace.epochs.empty()) {
					run.epochs_to_converge = epochs_to_converge(trace);
				}
				run.trace = std::move(trace);
			}
			for (std::size_t h : config.horizons) {
				run.horizons.push_back(evaluate_horizon(result.references, run.predictions, result.test_series,
				                                        result.series_ids, h, config.clarke_floor));
			}
			run.ok = true;
		} catch (const std::exception &e) {
			run.ok = false;
			run.error = e.what();
			run.horizons.clear();
			run.predictions.clear();
		}
		run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		if (progress) {
			progress(std::string(model_name(kind)) + (run.ok ? ": done" : ": failed: " + run.error));
		}
		result.runs.push_back(std::move(run));
	}
	return result;
}

} // namespace latentcast::train
