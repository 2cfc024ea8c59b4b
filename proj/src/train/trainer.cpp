#include "latentcast/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace latentcast::train {

void TrainConfig::validate() const {
	if (batch_size < 1) {
		throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
	}
	adam.validate();
	if (!(clip_norm > 0.0)) {
		throw std::invalid_argument("TrainConfig: clip threshold must be > 0");
	}
	weights.validate();
	if (!(teacher_forcing >= 0.0 && teacher_forcing <= 1.0)) {
		throw std::invalid_argument("TrainConfig: teacher_forcing must lie in [0, 1]");
	}
	if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
		throw std::invalid_argument("TrainConfig: validation_fraction must lie in [0, 1)");
	}
}

std::size_t epochs_to_converge(std::span<const double> losses) {
	if (losses.empty()) {
		throw std::invalid_argument("epochs_to_converge: empty trace");
	}
	const double best = *std::min_element(losses.begin(), losses.end());
	// slack of a few ulps so that e.g. 4.04 counts as within 1% of 4.0
	const double tolerance = 0.01 * std::abs(best) * (1.0 + 1e-12);
	for (std::size_t i = 0; i < losses.size(); ++i) {
		if (losses[i] - best <= tolerance) {
			return i + 1;
		}
	}
	return losses.size();
}

std::size_t epochs_to_converge(const TrainTrace &trace) {
	std::vector<double> v;
	v.reserve(trace.epochs.size());
	for (const EpochRecord &r : trace.epochs) {
		v.push_back(r.validation_total);
	}
	return epochs_to_converge(v);
}

SampleSplit split_validation(const std::vector<data::WindowSample> &samples, double fraction) {
	std::map<std::size_t, std::vector<std::size_t>> by_series;
	for (std::size_t i = 0; i < samples.size(); ++i) {
		by_series[samples[i].series_index].push_back(i);
	}
	SampleSplit split;
	for (auto &[series, idx] : by_series) {
		std::stable_sort(idx.begin(), idx.end(),
		                 [&](std::size_t a, std::size_t b) { return samples[a].start < samples[b].start; });
		std::size_t n_val = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(idx.size())));
		n_val = std::min(n_val, idx.size() - 1);
		const std::size_t n_train = idx.size() - n_val;
		split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
		split.validation.insert(split.validation.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
	}
	return split;
}

} // namespace latentcast::train
