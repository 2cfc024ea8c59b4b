#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentcast/data/windows.hpp"
#include "latentcast/model/vae_rnn.hpp"
#include "latentcast/train/benchmark.hpp"

namespace latentcast::report {

/// Trained VAE plus what is needed to apply it to raw data.
struct Checkpoint {
	model::VaeRnnParams params;
	data::NormalizationStats stats;
	std::vector<std::string> channels;
	std::int64_t step_seconds = data::kDefaultStepSeconds;
};

inline constexpr int kCheckpointVersion = 1;

/// Text format: a version line, one JSON header line (model shape,
/// normalization, channels), then per tensor a "tensor <name> <rows> <cols>"
/// line followed by one line of shortest round-trip decimals. Loading
/// reproduces every parameter bit for bit.
void write_checkpoint(std::ostream &out, const Checkpoint &ckpt);
Checkpoint read_checkpoint(std::istream &in);
void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::filesystem::path &path);

/// "m.mm ± s.ss"
std::string format_mean_std(const metrics::MeanStd &v);

/// model,horizon_steps,metric,mean,std for every successful model.
void write_results_csv(std::ostream &out, const train::BenchmarkResult &result);
/// model,horizon_steps,series_id,points,metric,value
void write_series_metrics_csv(std::ostream &out, const train::BenchmarkResult &result);
/// model,window,series_id,step,reference,predicted
void write_predictions_csv(std::ostream &out, const train::BenchmarkResult &result, const train::ModelRun &run);
/// epoch,reconstruction,prediction,kl,total,validation_total
void write_trace_csv(std::ostream &out, const train::TrainTrace &trace);

/// Accuracy table for one horizon: Model | RMSE | nMAPE | MAPE.
std::string accuracy_table_markdown(const train::BenchmarkResult &result, std::size_t horizon);
/// Clarke zone table for one horizon: Model | A | B | C | D | E.
std::string clarke_table_markdown(const train::BenchmarkResult &result, std::size_t horizon);
/// nMAPE per model (rows) and horizon (columns).
std::string long_horizon_table_markdown(const train::BenchmarkResult &result);
/// Epochs to converge per learned model.
std::string convergence_table_markdown(const train::BenchmarkResult &result);
/// All of the above with headings, as one document.
std::string benchmark_report_markdown(const train::BenchmarkResult &result);

/// Lower-case file-name stem of a model ("vae-gru").
std::string model_slug(train::ModelKind kind);

/// Human label of a step count at the given cadence ("30 min", "4 h").
std::string horizon_label(std::size_t steps, std::int64_t step_seconds = data::kDefaultStepSeconds);

/// Writes `content` to `path`, creating parent directories. Throws
/// std::runtime_error when the file cannot be written.
void write_text_file(const std::filesystem::path &path, const std::string &content);

/// Current UTC time as ISO-8601; only manifests carry it.
std::string utc_now_iso8601();

} // namespace latentcast::report
