#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentcast/metrics/clarke.hpp"
#include "latentcast/numeric/matrix.hpp"

namespace latentcast::report {

/// One polyline; NaN y values break the line into segments.
struct PlotSeries {
	std::string label;
	Vector x;
	Vector y;
	bool dashed = false;
	bool markers = false;
};

struct PlotOptions {
	std::string title;
	std::string x_label;
	std::string y_label;
	double width = 800.0;
	double height = 400.0;
	/// Shaded x interval drawn behind the data (ignored when lo >= hi).
	double highlight_lo = 0.0;
	double highlight_hi = 0.0;
	std::string note; // small text under the title
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string line_plot_svg(const std::vector<PlotSeries> &series, const PlotOptions &options);

/// Clarke error grid scatter (reference on x, prediction on y) with the
/// zone boundary lines, zone letters and the percentage per zone.
std::string clarke_grid_svg(std::span<const double> reference, std::span<const double> predicted,
                            std::string_view title);

/// "&<>\"'" escaped for XML text and attributes.
std::string xml_escape(std::string_view text);

/// Locale-independent fixed-point formatting.
std::string format_fixed(double value, int decimals);

/// Shortest decimal text that parses back to the same double.
std::string format_roundtrip(double value);

/// Evenly spaced "nice" tick values (steps of 1, 2 or 5 times a power of
/// ten) lying inside [lo, hi].
Vector nice_ticks(double lo, double hi, std::size_t target_count = 6);

} // namespace latentcast::report
