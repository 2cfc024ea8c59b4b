#include "latentcast/report/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace latentcast::report {

namespace {

constexpr std::array<const char *, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 50.0;
constexpr double kMarginBottom = 55.0;

struct Frame {
	double x0, x1, y0, y1; // data range
	double left, top, width, height;

	double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
	double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

std::string f2(double v) {
	return format_fixed(v, 2);
}

void open_svg(std::ostringstream &out, double width, double height) {
	out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width) << "\" height=\"" << f2(height)
	    << "\" viewBox=\"0 0 " << f2(width) << ' ' << f2(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
	out << "<rect x=\"0\" y=\"0\" width=\"" << f2(width) << "\" height=\"" << f2(height) << "\" fill=\"#ffffff\"/>\n";
}

void text(std::ostringstream &out, double x, double y, std::string_view s, std::string_view anchor = "middle",
          std::string_view extra = "") {
	out << "<text x=\"" << f2(x) << "\" y=\"" << f2(y) << "\" text-anchor=\"" << anchor << '"';
	if (!extra.empty()) {
		out << ' ' << extra;
	}
	out << '>' << xml_escape(s) << "</text>\n";
}

void line(std::ostringstream &out, double x1, double y1, double x2, double y2, std::string_view stroke,
          double width = 1.0, std::string_view extra = "") {
	out << "<line x1=\"" << f2(x1) << "\" y1=\"" << f2(y1) << "\" x2=\"" << f2(x2) << "\" y2=\"" << f2(y2)
	    << "\" stroke=\"" << stroke << "\" stroke-width=\"" << f2(width) << '"';
	if (!extra.empty()) {
		out << ' ' << extra;
	}
	out << "/>\n";
}

std::string tick_label(double v, double step) {
	int decimals = 0;
	while (decimals < 6 && std::abs(step * std::pow(10.0, decimals) - std::round(step * std::pow(10.0, decimals))) > 1e-9) {
		++decimals;
	}
	return format_fixed(v, decimals);
}

void axes(std::ostringstream &out, const Frame &f, const std::string &x_label, const std::string &y_label) {
	const Vector xt = nice_ticks(f.x0, f.x1);
	const Vector yt = nice_ticks(f.y0, f.y1);
	const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
	const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
	for (double v : xt) {
		const double x = f.px(v);
		line(out, x, f.top, x, f.top + f.height, "#e5e5e5");
		text(out, x, f.top + f.height + 16.0, tick_label(v, xstep));
	}
	for (double v : yt) {
		const double y = f.py(v);
		line(out, f.left, y, f.left + f.width, y, "#e5e5e5");
		text(out, f.left - 6.0, y + 4.0, tick_label(v, ystep), "end");
	}
	out << "<rect x=\"" << f2(f.left) << "\" y=\"" << f2(f.top) << "\" width=\"" << f2(f.width) << "\" height=\""
	    << f2(f.height) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
	text(out, f.left + f.width / 2.0, f.top + f.height + 38.0, x_label);
	const double yc = f.top + f.height / 2.0;
	text(out, f.left - 50.0, yc, y_label, "middle",
	     "transform=\"rotate(-90 " + f2(f.left - 50.0) + ' ' + f2(yc) + ")\"");
}

} // namespace

std::string xml_escape(std::string_view s) {
	std::string out;
	out.reserve(s.size());
	for (char c : s) {
		switch (c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		case '\'': out += "&apos;"; break;
		default: out += c;
		}
	}
	return out;
}

std::string format_fixed(double value, int decimals) {
	if (!std::isfinite(value)) {
		return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
	}
	if (value == 0.0) {
		value = 0.0; // drop the sign of -0
	}
	std::array<char, 64> buf{};
	auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
	if (ec != std::errc{}) {
		throw std::runtime_error("format_fixed: value out of range");
	}
	std::string s(buf.data(), end);
	if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
		s.erase(0, 1);
	}
	return s;
}

std::string format_roundtrip(double value) {
	std::array<char, 64> buf{};
	auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
	if (ec != std::errc{}) {
		throw std::runtime_error("format_roundtrip: conversion failed");
	}
	return std::string(buf.data(), end);
}

Vector nice_ticks(double lo, double hi, std::size_t target_count) {
	if (!std::isfinite(lo) || !std::isfinite(hi)) {
		throw std::invalid_argument("nice_ticks: non-finite range");
	}
	if (hi < lo) {
		std::swap(lo, hi);
	}
	if (hi == lo) {
		hi = lo + 1.0;
	}
	const double raw = (hi - lo) / static_cast<double>(std::max<std::size_t>(target_count, 1));
	const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
	double step = magnitude;
	for (double m : {1.0, 2.0, 5.0, 10.0}) {
		if (m * magnitude >= raw) {
			step = m * magnitude;
			break;
		}
	}
	Vector ticks;
	const double first = std::ceil(lo / step - 1e-9) * step;
	for (double v = first; v <= hi + 1e-9 * step; v += step) {
		ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
		if (ticks.size() > 100) {
			break;
		}
	}
	return ticks;
}

std::string line_plot_svg(const std::vector<PlotSeries> &series, const PlotOptions &opt) {
	double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
	for (const PlotSeries &s : series) {
		if (s.x.size() != s.y.size()) {
			throw std::invalid_argument("line_plot_svg: series '" + s.label + "' has mismatched x/y lengths");
		}
		for (std::size_t i = 0; i < s.x.size(); ++i) {
			if (std::isfinite(s.y[i]) && std::isfinite(s.x[i])) {
				x0 = std::min(x0, s.x[i]);
				x1 = std::max(x1, s.x[i]);
				y0 = std::min(y0, s.y[i]);
				y1 = std::max(y1, s.y[i]);
			}
		}
	}
	if (!std::isfinite(x0)) {
		x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
	}
	if (x1 == x0) {
		x1 = x0 + 1.0;
	}
	if (y1 == y0) {
		y0 -= 0.5, y1 += 0.5;
	}
	const double pad = 0.05 * (y1 - y0);
	y0 -= pad;
	y1 += pad;

	Frame f{x0, x1, y0, y1, kMarginLeft, kMarginTop, opt.width - kMarginLeft - kMarginRight,
	        opt.height - kMarginTop - kMarginBottom};
	std::ostringstream out;
	open_svg(out, opt.width, opt.height);
	text(out, opt.width / 2.0, 22.0, opt.title, "middle", "font-size=\"15\" font-weight=\"bold\"");
	if (!opt.note.empty()) {
		text(out, opt.width / 2.0, 38.0, opt.note, "middle", "font-size=\"10\" fill=\"#555555\"");
	}
	if (opt.highlight_lo < opt.highlight_hi) {
		const double a = f.px(std::clamp(opt.highlight_lo, x0, x1));
		const double b = f.px(std::clamp(opt.highlight_hi, x0, x1));
		out << "<rect x=\"" << f2(a) << "\" y=\"" << f2(f.top) << "\" width=\"" << f2(b - a) << "\" height=\""
		    << f2(f.height) << "\" fill=\"#fff2cc\"/>\n";
	}
	axes(out, f, opt.x_label, opt.y_label);
	for (std::size_t k = 0; k < series.size(); ++k) {
		const PlotSeries &s = series[k];
		const char *color = kPalette[k % kPalette.size()];
		std::string points;
		auto flush = [&] {
			if (!points.empty()) {
				out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
				    << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << points << "\"/>\n";
				points.clear();
			}
		};
		for (std::size_t i = 0; i < s.x.size(); ++i) {
			if (!std::isfinite(s.y[i])) {
				flush();
				continue;
			}
			if (!points.empty()) {
				points += ' ';
			}
			points += f2(f.px(s.x[i])) + ',' + f2(f.py(s.y[i]));
		}
		flush();
		if (s.markers) {
			for (std::size_t i = 0; i < s.x.size(); ++i) {
				if (std::isfinite(s.y[i])) {
					out << "<circle cx=\"" << f2(f.px(s.x[i])) << "\" cy=\"" << f2(f.py(s.y[i]))
					    << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
				}
			}
		}
		const double ly = f.top + 10.0 + 18.0 * static_cast<double>(k);
		const double lx = f.left + f.width + 12.0;
		line(out, lx, ly, lx + 22.0, ly, color, 2.0, s.dashed ? "stroke-dasharray=\"5,3\"" : "");
		text(out, lx + 28.0, ly + 4.0, s.label, "start");
	}
	out << "</svg>\n";
	return out.str();
}

std::string clarke_grid_svg(std::span<const double> reference, std::span<const double> predicted,
                            std::string_view title) {
	if (reference.size() != predicted.size()) {
		throw std::invalid_argument("clarke_grid_svg: reference and predicted lengths differ");
	}
	double top = 400.0;
	for (std::size_t i = 0; i < reference.size(); ++i) {
		top = std::max({top, reference[i], predicted[i]});
	}
	top = std::ceil(top / 50.0) * 50.0;
	const double size = 520.0;
	Frame f{0.0, top, 0.0, top, kMarginLeft, kMarginTop, size - kMarginLeft - 30.0, size - kMarginTop - kMarginBottom};
	const double width = size + 120.0;
	std::ostringstream out;
	open_svg(out, width, size);
	text(out, width / 2.0, 22.0, title, "middle", "font-size=\"15\" font-weight=\"bold\"");
	axes(out, f, "Reference glucose (mg/dL)", "Predicted glucose (mg/dL)");

	constexpr double third = 175.0 / 3.0;
	const std::array<std::array<double, 4>, 13> boundaries{{
	    {0, 0, 400, 400},
	    {0, 70, third, 70},
	    {third, 70, 400 / 1.2, 400},
	    {70, 84, 70, 400},
	    {0, 180, 70, 180},
	    {70, 180, 290, 400},
	    {70, 0, 70, 56},
	    {70, 56, 400, 320},
	    {180, 0, 180, 70},
	    {180, 70, 400, 70},
	    {240, 70, 240, 180},
	    {240, 180, 400, 180},
	    {130, 0, 180, 70},
	}};
	for (const auto &b : boundaries) {
		line(out, f.px(b[0]), f.py(b[1]), f.px(b[2]), f.py(b[3]), "#000000", 1.0,
		     &b == &boundaries.front() ? "stroke-dasharray=\"4,3\"" : "");
	}
	const std::array<std::pair<const char *, std::array<double, 2>>, 9> labels{{
	    {"A", {30, 15}},
	    {"A", {350, 310}},
	    {"B", {280, 370}},
	    {"B", {370, 200}},
	    {"C", {160, 370}},
	    {"C", {160, 15}},
	    {"D", {30, 140}},
	    {"D", {370, 120}},
	    {"E", {30, 370}},
	}};
	for (const auto &[letter, pos] : labels) {
		text(out, f.px(pos[0]), f.py(pos[1]), letter, "middle", "font-size=\"16\" font-weight=\"bold\"");
	}
	text(out, f.px(370), f.py(15), "E", "middle", "font-size=\"16\" font-weight=\"bold\"");

	out << "<g fill=\"#1f77b4\" fill-opacity=\"0.5\">\n";
	for (std::size_t i = 0; i < reference.size(); ++i) {
		out << "<circle cx=\"" << f2(f.px(reference[i])) << "\" cy=\"" << f2(f.py(predicted[i])) << "\" r=\"1.8\"/>\n";
	}
	out << "</g>\n";

	if (!reference.empty()) {
		const metrics::ClarkeSummary s = metrics::clarke_summary(reference, predicted);
		const double lx = f.left + f.width + 20.0;
		text(out, lx, f.top + 10.0, "Zone  %", "start", "font-weight=\"bold\"");
		for (std::size_t z = 0; z < 5; ++z) {
			const char letter = metrics::zone_letter(static_cast<metrics::ClarkeZone>(z));
			text(out, lx, f.top + 30.0 + 18.0 * static_cast<double>(z),
			     std::string(1, letter) + "  " + format_fixed(s.percent[z], 2), "start");
		}
		text(out, lx, f.top + 130.0, "n = " + std::to_string(s.count), "start");
	}
	out << "</svg>\n";
	return out.str();
}

} // namespace latentcast::report
