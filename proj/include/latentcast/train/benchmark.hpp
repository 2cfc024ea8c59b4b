#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latentcast/baselines/arima.hpp"
#include "latentcast/data/windows.hpp"
#include "latentcast/metrics/accuracy.hpp"
#include "latentcast/metrics/clarke.hpp"
#include "latentcast/train/trainer.hpp"

namespace latentcast::train {

/// Models in their canonical order; a model's RNG seed is
/// master_seed + its index here, independent of which models are selected.
enum class ModelKind { forward_fill, linear_trend, arima, lstm, gru, bilstm, bigru, vae_lstm, vae_gru };

inline constexpr std::array<ModelKind, 9> kAllModels{
    ModelKind::forward_fill, ModelKind::linear_trend, ModelKind::arima,    ModelKind::lstm,   ModelKind::gru,
    ModelKind::bilstm,       ModelKind::bigru,        ModelKind::vae_lstm, ModelKind::vae_gru};

std::string_view model_name(ModelKind kind);
/// Accepts the display name in any letter case ("VAE-GRU", "vae-gru").
ModelKind parse_model_kind(std::string_view name);
bool is_learned(ModelKind kind);

struct BenchmarkConfig {
	std::vector<ModelKind> models{kAllModels.begin(), kAllModels.end()};
	std::vector<std::size_t> horizons{6, 12, 24, 36, 48};
	data::WindowingOptions windowing; // horizon is replaced by the largest evaluated horizon
	std::size_t vae_hidden = 64;
	std::size_t vae_latent = 8;
	std::size_t rnn_hidden = 64;
	baselines::ArConfig arima;
	TrainConfig train; // train.seed is the master seed
	/// Clarke grid inputs are floored here (mg/dL); the grid is undefined at <= 0.
	double clarke_floor = 1.0;

	void validate() const;
};

inline constexpr std::array<std::string_view, 8> kMetricNames{"rmse",   "mape",   "nmape",  "zone_a",
                                                              "zone_b", "zone_c", "zone_d", "zone_e"};

struct SeriesMetrics {
	std::string series_id;
	std::size_t points = 0;
	std::array<double, kMetricNames.size()> values{}; // ordered as kMetricNames
};

struct HorizonMetrics {
	std::size_t horizon = 0;
	std::vector<SeriesMetrics> per_series;
	std::array<metrics::MeanStd, kMetricNames.size()> summary{}; // across series
};

struct ModelRun {
	ModelKind kind = ModelKind::forward_fill;
	std::uint64_t seed = 0;
	bool ok = false;
	std::string error;
	std::vector<HorizonMetrics> horizons;
	/// Glucose forecasts (mg/dL) per test window, max horizon steps each.
	std::vector<Vector> predictions;
	std::optional<TrainTrace> trace;
	std::size_t epochs_to_converge = 0;
	std::size_t fallbacks = 0; // ARIMA windows answered by forward fill
	double seconds = 0.0;
};

struct BenchmarkResult {
	BenchmarkConfig config;
	data::DropCounts drops;
	std::size_t train_windows = 0;
	std::size_t test_windows = 0;
	std::vector<std::string> series_ids;
	std::vector<std::size_t> test_series; // series index per test window
	std::vector<Vector> references;       // glucose truth (mg/dL) per test window
	std::vector<ModelRun> runs;           // in configured order

	std::size_t succeeded() const;
};

/// Glucose-channel metrics of forecasts against truths over the first
/// `horizon` steps of every window, grouped by series.
HorizonMetrics evaluate_horizon(const std::vector<Vector> &references, const std::vector<Vector> &predictions,
                                const std::vector<std::size_t> &series_of_window,
                                const std::vector<std::string> &series_ids, std::size_t horizon,
                                double clarke_floor = 1.0);

using ProgressCallback = std::function<void(std::string_view message)>;

/// Windows the raw series at the largest horizon, trains each learnable
/// model once, forecasts every test window and scores each horizon prefix.
/// A failing model is recorded and the others still run.
BenchmarkResult run_benchmark(const std::vector<data::TimeSeries> &series, const BenchmarkConfig &config,
                              const ProgressCallback &progress = {});

} // namespace latentcast::train
