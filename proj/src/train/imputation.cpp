#include "latentcast/train/imputation.hpp"

#include <algorithm>
#include <stdexcept>

#include "latentcast/train/learners.hpp"

namespace latentcast::train {

data::TimeSeries impute_series(const model::VaeRnnParams &p, const data::TimeSeries &series,
                               const data::NormalizationStats &stats) {
	series.validate();
	const std::size_t T = p.config.window;
	const std::size_t n = series.length();
	const std::size_t d = series.dims();
	if (d != p.config.input_dim || stats.mean.size() != d) {
		throw std::invalid_argument("impute_series: channel count does not match the model");
	}
	if (n < T) {
		throw std::invalid_argument("impute_series: series shorter than the model window");
	}
	Matrix normalized(n, d);
	for (std::size_t t = 0; t < n; ++t) {
		for (std::size_t c = 0; c < d; ++c) {
			normalized(t, c) = series.observed(t, c) ? stats.normalize(series.values(t, c), c) : 0.0;
		}
	}
	data::TimeSeries out = series;
	std::vector<std::size_t> starts;
	for (std::size_t s = 0; s + T <= n; s += T) {
		starts.push_back(s);
	}
	if (starts.back() + T < n) {
		starts.push_back(n - T);
	}
	const Vector prior_mean(p.config.latent_dim, 0.0);
	for (std::size_t s : starts) {
		Matrix x(T, d);
		std::vector<std::uint8_t> mask(T * d);
		for (std::size_t t = 0; t < T; ++t) {
			for (std::size_t c = 0; c < d; ++c) {
				x(t, c) = normalized(s + t, c);
				mask[t * d + c] = series.mask[(s + t) * d + c];
			}
		}
		if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
			continue;
		}
		Matrix filled;
		if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
			filled = model::decode(p, prior_mean, x, 1).x_hat;
		} else {
			filled = model::impute(p, x, mask);
		}
		for (std::size_t t = 0; t < T; ++t) {
			for (std::size_t c = 0; c < d; ++c) {
				const std::size_t i = (s + t) * d + c;
				if (series.mask[i] == 0 && out.mask[i] == 0) {
					out.values(s + t, c) = stats.denormalize(filled(t, c), c);
				}
			}
		}
		// the tail window may overlap: keep the first fill
		for (std::size_t t = 0; t < T; ++t) {
			for (std::size_t c = 0; c < d; ++c) {
				out.mask[(s + t) * d + c] = 1;
			}
		}
	}
	std::fill(out.mask.begin(), out.mask.end(), 1);
	return out;
}

ImputationConfig::ImputationConfig() {
	model.input_dim = 3;
	windowing.train_fraction = 1.0;
}

ImputationReport run_imputation_experiment(const data::SynthTriple &triple, const ImputationConfig &config,
                                           const EpochCallback &on_epoch) {
	ImputationReport report;
	report.stacked = data::stack_channels(triple.series, "synth");
	report.gap_start = triple.gap_start;
	report.truth = triple.gap_truth;

	data::WindowingOptions wopt = config.windowing;
	model::VaeRnnConfig mcfg = config.model;
	mcfg.input_dim = report.stacked.dims();
	mcfg.window = wopt.window;
	mcfg.horizon = wopt.horizon;

	const data::WindowedDataset dataset = data::normalize(data::make_windows({report.stacked}, wopt));
	report.stats = dataset.stats;
	SeededRng init_rng(config.train.seed);
	TrainResult<model::VaeRnnParams> trained =
	    train_vae(model::VaeRnnParams::initialized(mcfg, init_rng), dataset, config.train, on_epoch);
	report.params = std::move(trained.params);
	report.trace = std::move(trained.trace);

	report.filled = impute_series(report.params, report.stacked, report.stats);
	constexpr std::size_t kGapChannel = 2;
	report.mean_fill_value = report.stats.mean[kGapChannel];
	double se_model = 0.0;
	double se_mean = 0.0;
	for (std::size_t i = 0; i < report.truth.size(); ++i) {
		const double v = report.filled.values(report.gap_start + i, kGapChannel);
		report.imputed.push_back(v);
		se_model += (v - report.truth[i]) * (v - report.truth[i]);
		se_mean += (report.mean_fill_value - report.truth[i]) * (report.mean_fill_value - report.truth[i]);
	}
	const double n = static_cast<double>(report.truth.size());
	report.model_mse = se_model / n;
	report.mean_fill_mse = se_mean / n;
	return report;
}

} // namespace latentcast::train
