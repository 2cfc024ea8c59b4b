#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "latentcast/numeric/matrix.hpp"

namespace latentcast::data {

/// Seconds since 1970-01-01T00:00:00Z.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kDefaultStepSeconds = 300;

/// Uniformly sampled multichannel series. Channel 0 is glucose in mg/dL for
/// clinical data. `mask` is row-major n x d, 1 = observed.
struct TimeSeries {
	std::string series_id;
	Timestamp start_time = 0;
	std::int64_t step_seconds = kDefaultStepSeconds;
	std::vector<std::string> channels;
	Matrix values;
	std::vector<std::uint8_t> mask;

	std::size_t length() const { return values.rows(); }
	std::size_t dims() const { return values.cols(); }
	bool observed(std::size_t t, std::size_t c) const { return mask[t * dims() + c] != 0; }
	std::size_t observed_count(std::size_t channel) const;

	/// Structural invariants: mask/values sizes agree, step > 0, channel names match d.
	void validate() const;
};

/// One raw reading; NaN marks a missing channel value.
struct Reading {
	Timestamp time = 0;
	Vector values;
};

/// Places readings on a grid anchored at the first reading with
/// ceil((last - first) / step) + 1 slots. Each slot takes the nearest
/// reading within step/2 (earlier reading on ties), otherwise it is masked.
/// Values are copied verbatim; nothing is interpolated.
TimeSeries resample_uniform(std::string series_id, std::vector<std::string> channels,
                            std::span<const Reading> readings, std::int64_t step_seconds);

class CsvError : public std::runtime_error {
public:
	CsvError(std::size_t line, const std::string &message);
	std::size_t line() const { return line_; }

private:
	std::size_t line_;
};

/// Input layout. Header row required; `timestamp` (ISO-8601) and `glucose`
/// columns required; an optional id column splits rows into series; every
/// other column becomes an extra channel. Empty cells are missing values.
struct CsvSchema {
	std::int64_t step_seconds = kDefaultStepSeconds;
	std::string timestamp_column = "timestamp";
	std::string glucose_column = "glucose";
	std::string id_column = "series_id";
	/// Series id used when the file has no id column.
	std::string default_id = "series";
	/// Reject observed glucose outside (0, 1000) mg/dL.
	bool check_glucose_range = true;
};

std::vector<TimeSeries> parse_csv(std::istream &in, const CsvSchema &schema = {});
std::vector<TimeSeries> load_csv(const std::filesystem::path &path, const CsvSchema &schema = {});

/// Writes `timestamp,<channels...>` with empty cells for masked entries.
void write_series_csv(std::ostream &out, const TimeSeries &series);

/// Accepts YYYY-MM-DDTHH:MM[:SS] with 'T' or ' ' separator and optional 'Z'.
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

} // namespace latentcast::data
