#include "latentcast/data/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace latentcast::data {

std::size_t TimeSeries::observed_count(std::size_t channel) const {
	std::size_t n = 0;
	for (std::size_t t = 0; t < length(); ++t) {
		n += observed(t, channel) ? 1 : 0;
	}
	return n;
}

void TimeSeries::validate() const {
	if (step_seconds <= 0) {
		throw std::invalid_argument("TimeSeries '" + series_id + "': step must be positive");
	}
	if (mask.size() != values.size()) {
		throw std::invalid_argument("TimeSeries '" + series_id + "': mask and values differ in length");
	}
	if (!channels.empty() && channels.size() != values.cols()) {
		throw std::invalid_argument("TimeSeries '" + series_id + "': channel names do not match dimension");
	}
}

TimeSeries resample_uniform(std::string series_id, std::vector<std::string> channels,
                            std::span<const Reading> readings, std::int64_t step_seconds) {
	if (step_seconds <= 0) {
		throw std::invalid_argument("resample_uniform: step must be positive");
	}
	TimeSeries ts;
	ts.series_id = std::move(series_id);
	ts.step_seconds = step_seconds;
	const std::size_t d = !channels.empty() ? channels.size() : (readings.empty() ? 1 : readings.front().values.size());
	ts.channels = std::move(channels);
	if (readings.empty()) {
		ts.values = Matrix(0, d);
		return ts;
	}
	const Timestamp first = readings.front().time;
	const Timestamp last = readings.back().time;
	const std::int64_t span_seconds = last - first;
	const std::size_t slots = static_cast<std::size_t>((span_seconds + step_seconds - 1) / step_seconds) + 1;
	ts.start_time = first;
	ts.values = Matrix(slots, d);
	ts.mask.assign(slots * d, 0);

	std::size_t cursor = 0;
	for (std::size_t s = 0; s < slots; ++s) {
		const Timestamp slot_time = first + static_cast<std::int64_t>(s) * step_seconds;
		while (cursor + 1 < readings.size() && readings[cursor + 1].time <= slot_time) {
			++cursor;
		}
		// candidates: readings[cursor] (<= slot) and readings[cursor + 1] (> slot)
		std::size_t best = cursor;
		std::int64_t best_dist = std::llabs(readings[cursor].time - slot_time);
		if (cursor + 1 < readings.size()) {
			const std::int64_t next_dist = std::llabs(readings[cursor + 1].time - slot_time);
			if (next_dist < best_dist) {
				best = cursor + 1;
				best_dist = next_dist;
			}
		}
		if (2 * best_dist > step_seconds) {
			continue;
		}
		const Reading &r = readings[best];
		if (r.values.size() != d) {
			throw std::invalid_argument("resample_uniform: reading width does not match channel count");
		}
		for (std::size_t c = 0; c < d; ++c) {
			if (!std::isnan(r.values[c])) {
				ts.values(s, c) = r.values[c];
				ts.mask[s * d + c] = 1;
			}
		}
	}
	return ts;
}

CsvError::CsvError(std::size_t line, const std::string &message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
		s.remove_prefix(1);
	}
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
		s.remove_suffix(1);
	}
	return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
	std::vector<std::string_view> fields;
	std::size_t pos = 0;
	while (true) {
		const std::size_t comma = line.find(',', pos);
		fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
		if (comma == std::string_view::npos) {
			break;
		}
		pos = comma + 1;
	}
	return fields;
}

bool parse_double(std::string_view text, double &out) {
	if (!text.empty() && text.front() == '+') {
		text.remove_prefix(1);
	}
	const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
	return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

int parse_int(std::string_view text, std::size_t pos, std::size_t len) {
	int value = 0;
	if (pos + len > text.size()) {
		throw std::invalid_argument("truncated timestamp");
	}
	const auto res = std::from_chars(text.data() + pos, text.data() + pos + len, value);
	if (res.ec != std::errc() || res.ptr != text.data() + pos + len) {
		throw std::invalid_argument("malformed timestamp field");
	}
	return value;
}

struct SeriesRows {
	std::vector<Reading> readings;
	std::vector<std::size_t> lines;
};

} // namespace

Timestamp parse_iso8601(std::string_view text) {
	text = trim(text);
	if (!text.empty() && text.back() == 'Z') {
		text.remove_suffix(1);
	}
	if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
		throw std::invalid_argument("timestamp '" + std::string(text) + "' is not YYYY-MM-DDTHH:MM[:SS]");
	}
	const int year = parse_int(text, 0, 4);
	const int month = parse_int(text, 5, 2);
	const int day = parse_int(text, 8, 2);
	const int hour = parse_int(text, 11, 2);
	const int minute = parse_int(text, 14, 2);
	int second = 0;
	if (text.size() > 16) {
		if (text[16] != ':' || text.size() != 19) {
			throw std::invalid_argument("timestamp '" + std::string(text) + "' has malformed seconds");
		}
		second = parse_int(text, 17, 2);
	}
	const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
	                                      std::chrono::day{static_cast<unsigned>(day)}};
	if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
		throw std::invalid_argument("timestamp '" + std::string(text) + "' is out of range");
	}
	const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
	return static_cast<Timestamp>(days) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_iso8601(Timestamp t) {
	std::int64_t days = t / 86400;
	std::int64_t rem = t % 86400;
	if (rem < 0) {
		rem += 86400;
		--days;
	}
	const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
	char buf[32];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
	              static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
	return buf;
}

std::vector<TimeSeries> parse_csv(std::istream &in, const CsvSchema &schema) {
	std::string line;
	std::size_t line_no = 0;
	std::vector<std::string> header;
	while (std::getline(in, line)) {
		++line_no;
		if (!trim(line).empty()) {
			for (auto f : split_fields(line)) {
				header.emplace_back(f);
			}
			break;
		}
	}
	if (header.empty()) {
		throw CsvError(line_no == 0 ? 1 : line_no, "missing header row");
	}
	auto find_column = [&](const std::string &name) -> std::ptrdiff_t {
		const auto it = std::find(header.begin(), header.end(), name);
		return it == header.end() ? -1 : it - header.begin();
	};
	const std::size_t header_line = line_no;
	const std::ptrdiff_t ts_col = find_column(schema.timestamp_column);
	const std::ptrdiff_t glucose_col = find_column(schema.glucose_column);
	const std::ptrdiff_t id_col = find_column(schema.id_column);
	if (ts_col < 0) {
		throw CsvError(header_line, "header lacks '" + schema.timestamp_column + "' column");
	}
	if (glucose_col < 0) {
		throw CsvError(header_line, "header lacks '" + schema.glucose_column + "' column");
	}
	std::vector<std::size_t> value_cols{static_cast<std::size_t>(glucose_col)};
	std::vector<std::string> channels{header[static_cast<std::size_t>(glucose_col)]};
	for (std::size_t c = 0; c < header.size(); ++c) {
		if (static_cast<std::ptrdiff_t>(c) != ts_col && static_cast<std::ptrdiff_t>(c) != glucose_col &&
		    static_cast<std::ptrdiff_t>(c) != id_col) {
			value_cols.push_back(c);
			channels.push_back(header[c]);
		}
	}

	std::map<std::string, SeriesRows> by_id;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		const auto fields = split_fields(line);
		if (fields.size() != header.size()) {
			throw CsvError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
			                            std::to_string(fields.size()));
		}
		Reading r;
		try {
			r.time = parse_iso8601(fields[static_cast<std::size_t>(ts_col)]);
		} catch (const std::invalid_argument &e) {
			throw CsvError(line_no, e.what());
		}
		r.values.assign(value_cols.size(), std::numeric_limits<double>::quiet_NaN());
		for (std::size_t c = 0; c < value_cols.size(); ++c) {
			const std::string_view cell = fields[value_cols[c]];
			if (cell.empty()) {
				continue;
			}
			if (!parse_double(cell, r.values[c])) {
				throw CsvError(line_no, "cannot parse '" + std::string(cell) + "' in column '" + channels[c] + "'");
			}
		}
		if (schema.check_glucose_range && !std::isnan(r.values[0]) && (r.values[0] <= 0.0 || r.values[0] >= 1000.0)) {
			throw CsvError(line_no, "glucose value outside (0, 1000) mg/dL");
		}
		const std::string id = id_col >= 0 ? std::string(fields[static_cast<std::size_t>(id_col)]) : schema.default_id;
		SeriesRows &rows = by_id[id];
		if (!rows.readings.empty()) {
			const Timestamp prev = rows.readings.back().time;
			if (r.time == prev) {
				throw CsvError(line_no, "duplicate timestamp for series '" + id + "'");
			}
			if (r.time < prev) {
				throw CsvError(line_no, "timestamps not increasing for series '" + id + "'");
			}
		}
		rows.readings.push_back(std::move(r));
		rows.lines.push_back(line_no);
	}

	std::vector<TimeSeries> out;
	for (auto &[id, rows] : by_id) {
		out.push_back(resample_uniform(id, channels, rows.readings, schema.step_seconds));
	}
	return out;
}

std::vector<TimeSeries> load_csv(const std::filesystem::path &path, const CsvSchema &schema) {
	std::ifstream in(path);
	if (!in) {
		throw std::runtime_error("cannot open CSV file '" + path.string() + "'");
	}
	return parse_csv(in, schema);
}

void write_series_csv(std::ostream &out, const TimeSeries &series) {
	out << "timestamp";
	for (std::size_t c = 0; c < series.dims(); ++c) {
		out << ',' << (c < series.channels.size() ? series.channels[c] : "ch" + std::to_string(c));
	}
	out << '\n';
	char buf[64];
	for (std::size_t t = 0; t < series.length(); ++t) {
		out << format_iso8601(series.start_time + static_cast<std::int64_t>(t) * series.step_seconds);
		for (std::size_t c = 0; c < series.dims(); ++c) {
			out << ',';
			if (series.observed(t, c)) {
				const auto res = std::to_chars(buf, buf + sizeof buf, series.values(t, c));
				out.write(buf, res.ptr - buf);
			}
		}
		out << '\n';
	}
}

} // namespace latentcast::data
