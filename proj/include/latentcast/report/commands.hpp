#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "latentcast/report/config.hpp"

namespace latentcast::report {

inline constexpr const char *kOutputEnvVar = "LATENTCAST_OUT";

struct CommandOptions {
	std::filesystem::path config; // empty: built-in defaults
	std::filesystem::path out_dir;
	std::optional<std::uint64_t> seed;
	std::filesystem::path checkpoint;
	std::filesystem::path input;
	bool with_model = false;
	std::ostream *log = nullptr; // progress and summaries; null = silent
};

/// Output directory: the explicit one, else $LATENTCAST_OUT, else "out".
std::filesystem::path resolve_out_dir(const std::filesystem::path &explicit_dir);

/// Config file (or defaults) with the seed override applied.
ExperimentConfig resolve_config(const CommandOptions &options);

/// Each returns the process exit code and throws on invalid input.
int cmd_synth(const CommandOptions &options);
int cmd_train(const CommandOptions &options);
int cmd_predict(const CommandOptions &options);
int cmd_impute(const CommandOptions &options);
int cmd_evaluate(const CommandOptions &options);
int cmd_benchmark(const CommandOptions &options);
int cmd_clarke(const CommandOptions &options);
int cmd_report(const CommandOptions &options);

/// Reference/prediction pairs from a CSV with `reference`/`ref` and
/// `predicted`/`pred` columns. Throws data::CsvError with the line number
/// on malformed rows and when the file has no data rows.
struct ClarkePairs {
	Vector reference;
	Vector predicted;
};
ClarkePairs read_clarke_pairs(std::istream &in);

/// Rebuilds the summary part of a benchmark result from results.csv.
train::BenchmarkResult read_results_csv(std::istream &in);

} // namespace latentcast::report
