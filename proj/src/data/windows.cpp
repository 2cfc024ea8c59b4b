#include "latentcast/data/windows.hpp"

#include <cmath>
#include <stdexcept>

namespace latentcast::data {

void WindowingOptions::validate() const {
	if (window < 1 || horizon < 1 || stride < 1) {
		throw std::invalid_argument("windowing: T, w and stride must be >= 1");
	}
	if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
		throw std::invalid_argument("windowing: train_fraction must be in (0, 1]");
	}
	if (!(min_observed_fraction >= 0.0 && min_observed_fraction <= 1.0)) {
		throw std::invalid_argument("windowing: min_observed_fraction must be in [0, 1]");
	}
}

NormalizationStats training_statistics(const std::vector<TimeSeries> &series, const std::vector<std::size_t> &end) {
	const std::size_t d = series.empty() ? 0 : series.front().dims();
	NormalizationStats stats;
	stats.mean.assign(d, 0.0);
	stats.stddev.assign(d, 0.0);
	std::vector<std::size_t> count(d, 0);
	for (std::size_t s = 0; s < series.size(); ++s) {
		for (std::size_t t = 0; t < end[s]; ++t) {
			for (std::size_t c = 0; c < d; ++c) {
				if (series[s].observed(t, c)) {
					stats.mean[c] += series[s].values(t, c);
					++count[c];
				}
			}
		}
	}
	for (std::size_t c = 0; c < d; ++c) {
		stats.mean[c] = count[c] > 0 ? stats.mean[c] / static_cast<double>(count[c]) : 0.0;
	}
	for (std::size_t s = 0; s < series.size(); ++s) {
		for (std::size_t t = 0; t < end[s]; ++t) {
			for (std::size_t c = 0; c < d; ++c) {
				if (series[s].observed(t, c)) {
					const double e = series[s].values(t, c) - stats.mean[c];
					stats.stddev[c] += e * e;
				}
			}
		}
	}
	for (std::size_t c = 0; c < d; ++c) {
		stats.stddev[c] = count[c] > 0 ? std::sqrt(stats.stddev[c] / static_cast<double>(count[c])) : 0.0;
	}
	return stats;
}

namespace {

bool window_is_valid(const TimeSeries &ts, std::size_t start, const WindowingOptions &opt, DropCounts &drops) {
	const std::size_t d = ts.dims();
	std::size_t observed_glucose = 0;
	for (std::size_t t = start; t < start + opt.window; ++t) {
		observed_glucose += ts.observed(t, 0) ? 1 : 0;
	}
	if (static_cast<double>(observed_glucose) < opt.min_observed_fraction * static_cast<double>(opt.window) ||
	    observed_glucose == 0) {
		++drops.sparse_input;
		return false;
	}
	for (std::size_t t = start + opt.window; t < start + opt.window + opt.horizon; ++t) {
		for (std::size_t c = 0; c < d; ++c) {
			if (!ts.observed(t, c)) {
				++drops.missing_target;
				return false;
			}
		}
	}
	return true;
}

WindowSample extract(const TimeSeries &ts, std::size_t series_index, std::size_t start, const WindowingOptions &opt,
                     const NormalizationStats &stats) {
	const std::size_t d = ts.dims();
	WindowSample w;
	w.series_id = ts.series_id;
	w.series_index = series_index;
	w.start = start;
	w.x = Matrix(opt.window, d);
	w.mask.assign(opt.window * d, 0);
	for (std::size_t t = 0; t < opt.window; ++t) {
		for (std::size_t c = 0; c < d; ++c) {
			if (ts.observed(start + t, c)) {
				w.x(t, c) = ts.values(start + t, c);
				w.mask[t * d + c] = 1;
			} else {
				w.x(t, c) = stats.mean[c];
			}
		}
	}
	w.y = Matrix(opt.horizon, d);
	for (std::size_t t = 0; t < opt.horizon; ++t) {
		for (std::size_t c = 0; c < d; ++c) {
			w.y(t, c) = ts.values(start + opt.window + t, c);
		}
	}
	return w;
}

} // namespace

WindowedDataset make_windows(const std::vector<TimeSeries> &series, const WindowingOptions &options) {
	options.validate();
	WindowedDataset ds;
	ds.options = options;
	const std::size_t span = options.window + options.horizon;
	if (!series.empty()) {
		const std::size_t d = series.front().dims();
		for (const auto &ts : series) {
			ts.validate();
			if (ts.dims() != d) {
				throw std::invalid_argument("make_windows: series '" + ts.series_id + "' has a different channel count");
			}
		}
	}

	// pass 1: valid window starts and the chronological split per series
	std::vector<std::vector<std::size_t>> train_starts(series.size()), test_starts(series.size());
	ds.train_end.assign(series.size(), 0);
	for (std::size_t s = 0; s < series.size(); ++s) {
		const TimeSeries &ts = series[s];
		ds.series_ids.push_back(ts.series_id);
		std::vector<std::size_t> valid;
		for (std::size_t start = 0; start + span <= ts.length(); start += options.stride) {
			++ds.drops.candidates;
			if (window_is_valid(ts, start, options, ds.drops)) {
				valid.push_back(start);
			}
		}
		const auto n_train = std::min(
		    valid.size(), static_cast<std::size_t>(std::ceil(options.train_fraction * static_cast<double>(valid.size()) - 1e-9)));
		test_starts[s].assign(valid.begin() + static_cast<std::ptrdiff_t>(n_train), valid.end());
		for (std::size_t i = 0; i < n_train; ++i) {
			if (!test_starts[s].empty() && valid[i] + span > test_starts[s].front()) {
				++ds.drops.purged_overlap;
				continue;
			}
			train_starts[s].push_back(valid[i]);
		}
		if (!train_starts[s].empty()) {
			ds.train_end[s] = train_starts[s].back() + span;
		}
	}

	ds.stats = training_statistics(series, ds.train_end);

	// pass 2: materialize, pre-filling masked inputs with the training mean
	for (std::size_t s = 0; s < series.size(); ++s) {
		for (std::size_t start : train_starts[s]) {
			ds.train.push_back(extract(series[s], s, start, options, ds.stats));
		}
		for (std::size_t start : test_starts[s]) {
			ds.test.push_back(extract(series[s], s, start, options, ds.stats));
		}
	}
	return ds;
}

Matrix normalize_matrix(const Matrix &m, const NormalizationStats &stats) {
	Matrix out = m;
	for (std::size_t r = 0; r < m.rows(); ++r) {
		for (std::size_t c = 0; c < m.cols(); ++c) {
			out(r, c) = stats.normalize(m(r, c), c);
		}
	}
	return out;
}

Matrix denormalize(const Matrix &m, const NormalizationStats &stats) {
	Matrix out = m;
	for (std::size_t r = 0; r < m.rows(); ++r) {
		for (std::size_t c = 0; c < m.cols(); ++c) {
			out(r, c) = stats.denormalize(m(r, c), c);
		}
	}
	return out;
}

WindowedDataset normalize(WindowedDataset dataset) {
	if (dataset.normalized) {
		return dataset;
	}
	if (dataset.train.empty()) {
		throw std::invalid_argument("normalize: training split is empty");
	}
	for (std::size_t c = 0; c < dataset.stats.stddev.size(); ++c) {
		if (!(dataset.stats.stddev[c] > 0.0)) {
			throw std::invalid_argument("normalize: channel " + std::to_string(c) + " has zero training variance");
		}
	}
	for (auto *split : {&dataset.train, &dataset.test}) {
		for (WindowSample &w : *split) {
			w.x = normalize_matrix(w.x, dataset.stats);
			w.y = normalize_matrix(w.y, dataset.stats);
		}
	}
	dataset.normalized = true;
	return dataset;
}

} // namespace latentcast::data
