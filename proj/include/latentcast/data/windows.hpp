#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latentcast/data/time_series.hpp"

namespace latentcast::data {

/// One training/evaluation unit: T input steps followed by w target steps.
/// Masked input entries hold the channel's training mean.
struct WindowSample {
	Matrix x;                       // T x d
	std::vector<std::uint8_t> mask; // T x d, 1 = observed
	Matrix y;                       // w x d, fully observed
	std::string series_id;
	std::size_t series_index = 0;
	std::size_t start = 0;          // first input step in the source series
};

struct WindowingOptions {
	std::size_t window = 24;  // T
	std::size_t horizon = 12; // w
	std::size_t stride = 1;
	double train_fraction = 0.8;
	/// Minimum fraction of observed glucose (channel 0) entries in the input.
	double min_observed_fraction = 0.5;

	void validate() const;
};

struct NormalizationStats {
	Vector mean;
	Vector stddev;

	double normalize(double value, std::size_t channel) const { return (value - mean[channel]) / stddev[channel]; }
	double denormalize(double value, std::size_t channel) const { return value * stddev[channel] + mean[channel]; }
};

struct DropCounts {
	std::size_t candidates = 0;
	std::size_t sparse_input = 0;    // below min_observed_fraction
	std::size_t missing_target = 0;  // any target entry unobserved
	std::size_t purged_overlap = 0;  // training windows overlapping the test range

	std::size_t dropped() const { return sparse_input + missing_target; }
};

struct WindowedDataset {
	WindowingOptions options;
	std::vector<std::string> series_ids;
	std::vector<std::size_t> train_end; // per series: steps [0, train_end) form the training portion
	std::vector<WindowSample> train;
	std::vector<WindowSample> test;
	NormalizationStats stats; // computed from training portions only
	bool normalized = false;
	DropCounts drops;

	std::size_t dims() const { return stats.mean.size(); }
};

/// Sliding windows per series at the given stride. Windows with too few
/// observed glucose inputs or any missing target are dropped and counted.
/// The surviving windows of each series are split chronologically: the
/// first ceil(train_fraction * n) go to training, the rest to test, and
/// training windows overlapping the first test window are purged so the two
/// splits never share a time step. Per-channel statistics come from the
/// observed values in [0, train_end) of each series.
WindowedDataset make_windows(const std::vector<TimeSeries> &series, const WindowingOptions &options);

/// Z-scores every window with the stored training statistics. Throws if a
/// channel has zero training variance or no training data. Idempotent.
WindowedDataset normalize(WindowedDataset dataset);

/// Maps a normalized T x d (or w x d) matrix back to original units.
Matrix denormalize(const Matrix &m, const NormalizationStats &stats);
Matrix normalize_matrix(const Matrix &m, const NormalizationStats &stats);

/// Per-channel mean and population standard deviation over observed
/// entries of steps [0, end) of each series.
NormalizationStats training_statistics(const std::vector<TimeSeries> &series, const std::vector<std::size_t> &end);

} // namespace latentcast::data
