#pragma once

#include <array>
#include <cstdint>

#include "latentcast/data/time_series.hpp"

namespace latentcast::data {

struct SynthOptions {
	std::size_t n_samples = 1440;
	double noise_scale = 0.5;
	std::size_t gap_length = 60;
	std::uint64_t seed = 0;
	std::int64_t step_seconds = kDefaultStepSeconds;
	Timestamp start_time = 1577836800; // 2020-01-01T00:00:00Z
};

/// Three noisy sines with periods 12, 6 and 4 steps (time = integer step
/// index). The third series carries a contiguous masked gap; the values
/// hidden by the gap are kept in `gap_truth`.
struct SynthTriple {
	std::array<TimeSeries, 3> series;
	std::size_t gap_start = 0;
	Vector gap_truth;
};

inline constexpr std::array<double, 3> kSynthPeriods{12.0, 6.0, 4.0};

/// Draw order: n noise values for each series in turn, then the gap start.
SynthTriple synth_generate(const SynthOptions &options);

/// Stacks single-channel series of equal length and grid into one
/// multichannel series (masks carried per channel).
TimeSeries stack_channels(std::span<const TimeSeries> parts, std::string series_id);

/// value -> offset + scale * value for every channel; used to place the
/// unit-scale synthetic series in a positive, glucose-like mg/dL range.
TimeSeries affine_rescale(TimeSeries series, double offset, double scale);

} // namespace latentcast::data
