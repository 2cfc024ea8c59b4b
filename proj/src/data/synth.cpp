#include "latentcast/data/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "latentcast/numeric/rng.hpp"

namespace latentcast::data {

SynthTriple synth_generate(const SynthOptions &options) {
	if (options.n_samples < 120) {
		throw std::invalid_argument("synth_generate: n_samples must be >= 120");
	}
	if (options.gap_length > options.n_samples) {
		throw std::invalid_argument("synth_generate: gap longer than the series");
	}
	SeededRng rng(options.seed);
	SynthTriple triple;
	const std::size_t n = options.n_samples;
	for (std::size_t k = 0; k < 3; ++k) {
		TimeSeries &ts = triple.series[k];
		ts.series_id = "ts" + std::to_string(k + 1);
		ts.start_time = options.start_time;
		ts.step_seconds = options.step_seconds;
		ts.channels = {ts.series_id};
		ts.values = Matrix(n, 1);
		ts.mask.assign(n, 1);
		for (std::size_t t = 0; t < n; ++t) {
			const double noise = rng.standard_normal();
			ts.values(t, 0) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / kSynthPeriods[k]) +
			                  options.noise_scale * noise;
		}
	}
	triple.gap_start = rng.uniform_index(n - options.gap_length + 1);
	TimeSeries &masked = triple.series[2];
	for (std::size_t t = triple.gap_start; t < triple.gap_start + options.gap_length; ++t) {
		triple.gap_truth.push_back(masked.values(t, 0));
		masked.values(t, 0) = 0.0;
		masked.mask[t] = 0;
	}
	return triple;
}

TimeSeries stack_channels(std::span<const TimeSeries> parts, std::string series_id) {
	if (parts.empty()) {
		throw std::invalid_argument("stack_channels: no series");
	}
	const std::size_t n = parts.front().length();
	std::size_t d = 0;
	for (const auto &p : parts) {
		if (p.length() != n || p.step_seconds != parts.front().step_seconds || p.start_time != parts.front().start_time) {
			throw std::invalid_argument("stack_channels: series are not on the same grid");
		}
		d += p.dims();
	}
	TimeSeries out;
	out.series_id = std::move(series_id);
	out.start_time = parts.front().start_time;
	out.step_seconds = parts.front().step_seconds;
	out.values = Matrix(n, d);
	out.mask.assign(n * d, 0);
	std::size_t offset = 0;
	for (const auto &p : parts) {
		for (std::size_t c = 0; c < p.dims(); ++c) {
			out.channels.push_back(c < p.channels.size() ? p.channels[c] : p.series_id);
			for (std::size_t t = 0; t < n; ++t) {
				out.values(t, offset + c) = p.values(t, c);
				out.mask[t * d + offset + c] = p.mask[t * p.dims() + c];
			}
		}
		offset += p.dims();
	}
	return out;
}

TimeSeries affine_rescale(TimeSeries series, double offset, double scale) {
	for (double &v : series.values.data()) {
		v = offset + scale * v;
	}
	return series;
}

} // namespace latentcast::data
