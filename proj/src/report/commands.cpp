#include "latentcast/report/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "latentcast/train/imputation.hpp"
#include "latentcast/train/learners.hpp"
#include "latentcast/report/outputs.hpp"
#include "latentcast/report/svg.hpp"

namespace latentcast::report {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char *kVersion = "1.0.0";

void say(const CommandOptions &o, const std::string &message) {
	if (o.log != nullptr) {
		*o.log << message << '\n';
	}
}

std::string csv_text(const data::TimeSeries &s) {
	std::ostringstream out;
	data::write_series_csv(out, s);
	return out.str();
}

std::vector<std::string> split_fields(const std::string &line) {
	std::vector<std::string> out;
	std::string field;
	std::istringstream in(line);
	while (std::getline(in, field, ',')) {
		while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
			field.pop_back();
		}
		while (!field.empty() && field.front() == ' ') {
			field.erase(0, 1);
		}
		out.push_back(field);
	}
	if (!line.empty() && line.back() == ',') {
		out.emplace_back();
	}
	return out;
}

double parse_field(const std::string &text, std::size_t line, const std::string &column) {
	try {
		std::size_t used = 0;
		const double v = std::stod(text, &used);
		if (used != text.size() || !std::isfinite(v)) {
			throw std::invalid_argument("trailing characters");
		}
		return v;
	} catch (const std::exception &) {
		throw data::CsvError(line, "column '" + column + "' holds '" + text + "', expected a number");
	}
}

json manifest_base(const std::string &command, const ExperimentConfig &cfg) {
	return json{{"command", command},
	            {"version", kVersion},
	            {"created_utc", utc_now_iso8601()},
	            {"master_seed", cfg.train.seed},
	            {"config", config_to_json(cfg)}};
}

json drops_json(const data::DropCounts &d) {
	return json{{"candidates", d.candidates},
	            {"sparse_input", d.sparse_input},
	            {"missing_target", d.missing_target},
	            {"purged_overlap", d.purged_overlap}};
}

void write_json(const fs::path &path, const json &doc) {
	write_text_file(path, doc.dump(2) + "\n");
}

Vector steps_axis(std::size_t begin, std::size_t end) {
	Vector x;
	for (std::size_t t = begin; t < end; ++t) {
		x.push_back(static_cast<double>(t));
	}
	return x;
}

Vector channel_slice(const data::TimeSeries &s, std::size_t c, std::size_t begin, std::size_t end, bool masked_nan) {
	Vector y;
	for (std::size_t t = begin; t < end; ++t) {
		y.push_back(masked_nan && !s.observed(t, c) ? std::nan("") : s.values(t, c));
	}
	return y;
}

std::string loss_curves_svg(const std::vector<std::pair<std::string, const train::TrainTrace *>> &traces,
                            const std::string &title, bool validation) {
	std::vector<PlotSeries> series;
	for (const auto &[name, trace] : traces) {
		PlotSeries s;
		s.label = name;
		s.markers = true;
		for (const train::EpochRecord &e : trace->epochs) {
			s.x.push_back(static_cast<double>(e.epoch));
			s.y.push_back(validation ? e.validation_total : e.train.total);
		}
		series.push_back(std::move(s));
	}
	PlotOptions opt;
	opt.title = title;
	opt.x_label = "Epoch";
	opt.y_label = validation ? "Validation loss (normalized units)" : "Training loss (normalized units)";
	opt.note = "Convergence epoch: first epoch within 1% of the minimum validation loss";
	return line_plot_svg(series, opt);
}

/// Masked inputs read 0 after z-scoring regardless of which statistics
/// filled them.
void zero_masked_inputs(std::vector<data::WindowSample> &samples) {
	for (data::WindowSample &s : samples) {
		for (std::size_t i = 0; i < s.mask.size(); ++i) {
			if (s.mask[i] == 0) {
				s.x.data()[i] = 0.0;
			}
		}
	}
}

/// Benchmark-style result for a single trained VAE on the test windows.
train::BenchmarkResult evaluate_checkpoint(const Checkpoint &ckpt, const data::WindowedDataset &ds,
                                           const std::vector<std::size_t> &horizons, double clarke_floor) {
	train::BenchmarkResult result;
	result.config.horizons = horizons;
	result.config.windowing = ds.options;
	result.config.models = {ckpt.params.config.cell == rnn::CellKind::lstm ? train::ModelKind::vae_lstm
	                                                                      : train::ModelKind::vae_gru};
	result.drops = ds.drops;
	result.train_windows = ds.train.size();
	result.test_windows = ds.test.size();
	result.series_ids = ds.series_ids;
	train::ModelRun run;
	run.kind = result.config.models.front();
	const std::size_t w = ds.options.horizon;
	for (const data::WindowSample &s : ds.test) {
		result.test_series.push_back(s.series_index);
		Vector ref(w), pred(w);
		const model::ModelOutput out = model::forward(ckpt.params, s.x, nullptr, w, model::TrainingPlan{});
		for (std::size_t j = 0; j < w; ++j) {
			ref[j] = ckpt.stats.denormalize(s.y(j, 0), 0);
			pred[j] = ckpt.stats.denormalize(out.y_hat(j, 0), 0);
		}
		result.references.push_back(std::move(ref));
		run.predictions.push_back(std::move(pred));
	}
	for (std::size_t h : horizons) {
		run.horizons.push_back(
		    train::evaluate_horizon(result.references, run.predictions, result.test_series, result.series_ids, h,
		                            clarke_floor));
	}
	run.ok = true;
	result.runs.push_back(std::move(run));
	return result;
}

std::size_t clarke_horizon(const std::vector<std::size_t> &horizons) {
	return std::find(horizons.begin(), horizons.end(), 12) != horizons.end() ? 12 : horizons.front();
}

std::string clarke_svg_for_run(const train::BenchmarkResult &result, const train::ModelRun &run, std::size_t h) {
	Vector ref, pred;
	for (std::size_t w = 0; w < run.predictions.size(); ++w) {
		for (std::size_t j = 0; j < h && j < run.predictions[w].size(); ++j) {
			ref.push_back(result.references[w][j]);
			pred.push_back(std::max(run.predictions[w][j], result.config.clarke_floor));
		}
	}
	return clarke_grid_svg(ref, pred,
	                       std::string(train::model_name(run.kind)) + " Clarke error grid (" + horizon_label(h) + ")");
}

void write_benchmark_files(const fs::path &out, const train::BenchmarkResult &result) {
	std::ostringstream csv, per_series;
	write_results_csv(csv, result);
	write_series_metrics_csv(per_series, result);
	write_text_file(out / "results.csv", csv.str());
	write_text_file(out / "series_metrics.csv", per_series.str());
	write_text_file(out / "tables.md", benchmark_report_markdown(result));
	const std::size_t ch = clarke_horizon(result.config.horizons);
	std::vector<std::pair<std::string, const train::TrainTrace *>> traces;
	for (const train::ModelRun &run : result.runs) {
		if (!run.ok) {
			continue;
		}
		const std::string slug = model_slug(run.kind);
		std::ostringstream pred;
		write_predictions_csv(pred, result, run);
		write_text_file(out / "predictions" / (slug + ".csv"), pred.str());
		write_text_file(out / "figures" / ("clarke_" + slug + ".svg"), clarke_svg_for_run(result, run, ch));
		if (run.trace && !run.trace->epochs.empty()) {
			std::ostringstream tr;
			write_trace_csv(tr, *run.trace);
			write_text_file(out / "traces" / (slug + ".csv"), tr.str());
			traces.emplace_back(std::string(train::model_name(run.kind)), &*run.trace);
		}
	}
	if (!traces.empty()) {
		write_text_file(out / "figures" / "convergence.svg",
		                loss_curves_svg(traces, "Validation loss per epoch", true));
		write_text_file(out / "figures" / "training_loss.svg", loss_curves_svg(traces, "Training loss per epoch", false));
	}
}

} // namespace

fs::path resolve_out_dir(const fs::path &explicit_dir) {
	if (!explicit_dir.empty()) {
		return explicit_dir;
	}
	if (const char *env = std::getenv(kOutputEnvVar); env != nullptr && *env != '\0') {
		return fs::path(env);
	}
	return fs::path("out");
}

ExperimentConfig resolve_config(const CommandOptions &options) {
	ExperimentConfig cfg = options.config.empty() ? parse_config(json::object()) : load_config(options.config);
	if (options.seed) {
		cfg.set_seed(*options.seed);
	}
	return cfg;
}

int cmd_synth(const CommandOptions &o) {
	const ExperimentConfig cfg = resolve_config(o);
	const fs::path out = resolve_out_dir(o.out_dir);
	const data::SynthTriple triple = data::synth_generate(cfg.data.synthetic.options);
	const std::size_t n = triple.series[0].length();

	for (const data::TimeSeries &s : triple.series) {
		write_text_file(out / (s.series_id + ".csv"), csv_text(s));
	}
	const data::TimeSeries stacked = data::stack_channels(triple.series, "synth");
	{
		std::ostringstream mask;
		mask << "timestamp,ts1,ts2,ts3\n";
		for (std::size_t t = 0; t < n; ++t) {
			mask << data::format_iso8601(stacked.start_time + static_cast<std::int64_t>(t) * stacked.step_seconds);
			for (std::size_t c = 0; c < 3; ++c) {
				mask << ',' << (stacked.observed(t, c) ? 1 : 0);
			}
			mask << '\n';
		}
		write_text_file(out / "mask.csv", mask.str());
		std::ostringstream truth;
		truth << "timestamp,step,ts3\n";
		for (std::size_t i = 0; i < triple.gap_truth.size(); ++i) {
			const std::size_t t = triple.gap_start + i;
			truth << data::format_iso8601(stacked.start_time + static_cast<std::int64_t>(t) * stacked.step_seconds)
			      << ',' << t << ',' << format_roundtrip(triple.gap_truth[i]) << '\n';
		}
		write_text_file(out / "gap_truth.csv", truth.str());
		std::ostringstream glucose;
		glucose << "series_id,timestamp,glucose\n";
		for (const data::TimeSeries &s : triple.series) {
			const data::TimeSeries r = data::affine_rescale(s, cfg.data.synthetic.offset, cfg.data.synthetic.scale);
			for (std::size_t t = 0; t < r.length(); ++t) {
				glucose << r.series_id << ','
				        << data::format_iso8601(r.start_time + static_cast<std::int64_t>(t) * r.step_seconds) << ',';
				if (r.observed(t, 0)) {
					glucose << format_roundtrip(r.values(t, 0));
				}
				glucose << '\n';
			}
		}
		write_text_file(out / "synth_glucose.csv", glucose.str());
	}

	const std::size_t shown = std::min<std::size_t>(n, 96);
	std::vector<PlotSeries> originals;
	for (std::size_t c = 0; c < 3; ++c) {
		originals.push_back({triple.series[c].series_id, steps_axis(0, shown), channel_slice(stacked, c, 0, shown, true)});
	}
	PlotOptions o1;
	o1.title = "Synthetic series (periods 12, 6, 4 steps)";
	o1.x_label = "Step";
	o1.y_label = "Value";
	write_text_file(out / "figures" / "synth_series.svg", line_plot_svg(originals, o1));

	const std::size_t lo = triple.gap_start >= 48 ? triple.gap_start - 48 : 0;
	const std::size_t hi = std::min(n, triple.gap_start + triple.gap_truth.size() + 48);
	PlotOptions o2;
	o2.title = "ts3 with masked segment";
	o2.x_label = "Step";
	o2.y_label = "Value";
	o2.highlight_lo = static_cast<double>(triple.gap_start);
	o2.highlight_hi = static_cast<double>(triple.gap_start + triple.gap_truth.size() - 1);
	write_text_file(out / "figures" / "ts3_masked.svg",
	                line_plot_svg({{"ts3 (observed)", steps_axis(lo, hi), channel_slice(stacked, 2, lo, hi, true)}}, o2));

	json manifest = manifest_base("synth", cfg);
	manifest["gap_start"] = triple.gap_start;
	manifest["gap_length"] = triple.gap_truth.size();
	manifest["files"] = {"ts1.csv", "ts2.csv", "ts3.csv", "mask.csv", "gap_truth.csv", "synth_glucose.csv",
	                     "figures/synth_series.svg", "figures/ts3_masked.svg"};

	if (o.with_model) {
		train::ImputationConfig icfg;
		icfg.model = cfg.vae(3);
		icfg.windowing.window = cfg.data.windowing.window;
		icfg.windowing.horizon = cfg.data.windowing.horizon;
		icfg.windowing.stride = cfg.data.windowing.stride;
		icfg.windowing.min_observed_fraction = cfg.data.windowing.min_observed_fraction;
		icfg.train = cfg.train;
		const auto t0 = std::chrono::steady_clock::now();
		const train::ImputationReport rep = train::run_imputation_experiment(
		    triple, icfg, [&](const train::EpochRecord &e) {
			    say(o, "epoch " + std::to_string(e.epoch) + " loss " + format_fixed(e.train.total, 4));
		    });
		const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

		Vector truth_line(hi - lo, std::nan(""));
		Vector mean_line(hi - lo, std::nan(""));
		for (std::size_t i = 0; i < rep.truth.size(); ++i) {
			const std::size_t t = rep.gap_start + i;
			if (t >= lo && t < hi) {
				truth_line[t - lo] = rep.truth[i];
				mean_line[t - lo] = rep.mean_fill_value;
			}
		}
		PlotOptions o3 = o2;
		o3.title = "ts3 before and after VAE imputation";
		o3.note = "model MSE " + format_fixed(rep.model_mse, 4) + ", mean-fill MSE " + format_fixed(rep.mean_fill_mse, 4);
		write_text_file(out / "figures" / "ts3_imputed.svg",
		                line_plot_svg({{"before (masked)", steps_axis(lo, hi), channel_slice(stacked, 2, lo, hi, true)},
		                               {"after (imputed)", steps_axis(lo, hi), channel_slice(rep.filled, 2, lo, hi, false)},
		                               {"hidden truth", steps_axis(lo, hi), truth_line, true},
		                               {"mean fill", steps_axis(lo, hi), mean_line, true}},
		                              o3));
		std::ostringstream csv;
		csv << "step,truth,imputed,mean_fill\n";
		for (std::size_t i = 0; i < rep.truth.size(); ++i) {
			csv << rep.gap_start + i << ',' << format_roundtrip(rep.truth[i]) << ',' << format_roundtrip(rep.imputed[i])
			    << ',' << format_roundtrip(rep.mean_fill_value) << '\n';
		}
		write_text_file(out / "imputation.csv", csv.str());
		data::TimeSeries filled = rep.filled;
		write_text_file(out / "synth_imputed.csv", csv_text(filled));
		std::ostringstream trace;
		write_trace_csv(trace, rep.trace);
		write_text_file(out / "imputation_trace.csv", trace.str());
		json summary = {{"model_mse", rep.model_mse},
		                {"mean_fill_mse", rep.mean_fill_mse},
		                {"gap_start", rep.gap_start},
		                {"gap_length", rep.truth.size()}};
		write_json(out / "imputation_summary.json", summary);
		manifest["imputation"] = summary;
		manifest["wall_clock_seconds"] = seconds;
		for (const char *f : {"figures/ts3_imputed.svg", "imputation.csv", "synth_imputed.csv",
		                      "imputation_trace.csv", "imputation_summary.json"}) {
			manifest["files"].push_back(f);
		}
		say(o, "imputation MSE: model " + format_fixed(rep.model_mse, 4) + ", mean fill " +
		           format_fixed(rep.mean_fill_mse, 4));
	}
	write_json(out / "manifest.json", manifest);
	say(o, "synthetic data written to " + out.string());
	return 0;
}

int cmd_train(const CommandOptions &o) {
	const ExperimentConfig cfg = resolve_config(o);
	const fs::path out = resolve_out_dir(o.out_dir);
	const std::vector<data::TimeSeries> series = load_series(cfg.data);
	const data::WindowedDataset ds = data::normalize(data::make_windows(series, cfg.data.windowing));
	say(o, std::to_string(ds.train.size()) + " training windows, " + std::to_string(ds.test.size()) + " test windows");
	SeededRng init(cfg.train.seed);
	const auto t0 = std::chrono::steady_clock::now();
	auto trained = train::train_vae(model::VaeRnnParams::initialized(cfg.vae(ds.dims()), init), ds, cfg.train,
	                                [&](const train::EpochRecord &e) {
		                                say(o, "epoch " + std::to_string(e.epoch) + " train " +
		                                           format_fixed(e.train.total, 4) + " validation " +
		                                           format_fixed(e.validation_total, 4));
	                                });
	const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	Checkpoint ckpt{trained.params, ds.stats, series.front().channels, series.front().step_seconds};
	save_checkpoint(out / "model.ckpt", ckpt);
	std::ostringstream trace;
	write_trace_csv(trace, trained.trace);
	write_text_file(out / "trace.csv", trace.str());
	json manifest = manifest_base("train", cfg);
	manifest["drops"] = drops_json(ds.drops);
	manifest["train_windows"] = ds.train.size();
	manifest["test_windows"] = ds.test.size();
	manifest["wall_clock_seconds"] = seconds;
	manifest["files"] = {"model.ckpt", "trace.csv"};
	if (!trained.trace.epochs.empty()) {
		const std::string name = cfg.model.cell == rnn::CellKind::lstm ? "VAE-LSTM" : "VAE-GRU";
		write_text_file(out / "figures" / "loss.svg", loss_curves_svg({{name, &trained.trace}}, name + " loss", true));
		manifest["epochs_to_converge"] = train::epochs_to_converge(trained.trace);
		manifest["files"].push_back("figures/loss.svg");
	}
	write_json(out / "manifest.json", manifest);
	say(o, "checkpoint written to " + (out / "model.ckpt").string());
	return 0;
}

int cmd_predict(const CommandOptions &o) {
	if (o.checkpoint.empty() || o.input.empty()) {
		throw std::invalid_argument("predict needs --checkpoint and --input");
	}
	const Checkpoint ckpt = load_checkpoint(o.checkpoint);
	const fs::path out = resolve_out_dir(o.out_dir);
	data::CsvSchema schema;
	schema.step_seconds = ckpt.step_seconds;
	const std::vector<data::TimeSeries> series = data::load_csv(o.input, schema);
	const model::VaeRnnConfig &mc = ckpt.params.config;
	std::ostringstream csv;
	csv << "series_id,timestamp,step";
	for (const std::string &c : ckpt.channels) {
		csv << ',' << c;
	}
	csv << '\n';
	for (const data::TimeSeries &s : series) {
		if (s.dims() != mc.input_dim) {
			throw std::invalid_argument("predict: series '" + s.series_id + "' has " + std::to_string(s.dims()) +
			                            " channels, the model expects " + std::to_string(mc.input_dim));
		}
		if (s.length() < mc.window) {
			throw std::invalid_argument("predict: series '" + s.series_id + "' is shorter than the model window");
		}
		const std::size_t begin = s.length() - mc.window;
		Matrix x(mc.window, mc.input_dim);
		for (std::size_t t = 0; t < mc.window; ++t) {
			for (std::size_t c = 0; c < mc.input_dim; ++c) {
				x(t, c) = s.observed(begin + t, c) ? ckpt.stats.normalize(s.values(begin + t, c), c) : 0.0;
			}
		}
		const model::ModelOutput y = model::forward(ckpt.params, x, nullptr, mc.horizon, model::TrainingPlan{});
		const data::Timestamp last = s.start_time + static_cast<std::int64_t>(s.length() - 1) * s.step_seconds;
		for (std::size_t j = 0; j < mc.horizon; ++j) {
			csv << s.series_id << ',' << data::format_iso8601(last + static_cast<std::int64_t>(j + 1) * s.step_seconds)
			    << ',' << j + 1;
			for (std::size_t c = 0; c < mc.input_dim; ++c) {
				csv << ',' << format_roundtrip(ckpt.stats.denormalize(y.y_hat(j, c), c));
			}
			csv << '\n';
		}
	}
	write_text_file(out / "forecast.csv", csv.str());
	say(o, "forecast written to " + (out / "forecast.csv").string());
	return 0;
}

int cmd_impute(const CommandOptions &o) {
	if (o.checkpoint.empty() || o.input.empty()) {
		throw std::invalid_argument("impute needs --checkpoint and --input");
	}
	const Checkpoint ckpt = load_checkpoint(o.checkpoint);
	const fs::path out = resolve_out_dir(o.out_dir);
	data::CsvSchema schema;
	schema.step_seconds = ckpt.step_seconds;
	const std::vector<data::TimeSeries> series = data::load_csv(o.input, schema);
	for (const data::TimeSeries &s : series) {
		std::size_t missing = 0;
		for (std::uint8_t m : s.mask) {
			missing += m == 0 ? 1 : 0;
		}
		data::TimeSeries filled = train::impute_series(ckpt.params, s, ckpt.stats);
		const std::string name = "imputed_" + s.series_id + ".csv";
		write_text_file(out / name, csv_text(filled));
		say(o, s.series_id + ": filled " + std::to_string(missing) + " entries");
	}
	return 0;
}

int cmd_evaluate(const CommandOptions &o) {
	if (o.checkpoint.empty()) {
		throw std::invalid_argument("evaluate needs --checkpoint");
	}
	const ExperimentConfig cfg = resolve_config(o);
	const fs::path out = resolve_out_dir(o.out_dir);
	const Checkpoint ckpt = load_checkpoint(o.checkpoint);
	data::WindowingOptions wopt = cfg.data.windowing;
	wopt.window = ckpt.params.config.window;
	wopt.horizon = ckpt.params.config.horizon;
	data::WindowedDataset ds = data::make_windows(load_series(cfg.data), wopt);
	ds.stats = ckpt.stats;
	ds = data::normalize(std::move(ds));
	zero_masked_inputs(ds.test);
	if (ds.test.empty()) {
		throw std::invalid_argument("evaluate: no test windows");
	}
	std::vector<std::size_t> horizons;
	for (std::size_t h : cfg.horizons) {
		if (h <= wopt.horizon) {
			horizons.push_back(h);
		}
	}
	if (horizons.empty()) {
		horizons.push_back(wopt.horizon);
	}
	train::BenchmarkResult result = evaluate_checkpoint(ckpt, ds, horizons, cfg.clarke_floor);
	result.config.arima = cfg.model.arima;
	std::ostringstream csv;
	write_results_csv(csv, result);
	write_text_file(out / "results.csv", csv.str());
	write_text_file(out / "tables.md", benchmark_report_markdown(result));
	say(o, accuracy_table_markdown(result, horizons.front()));
	return 0;
}

int cmd_benchmark(const CommandOptions &o) {
	const ExperimentConfig cfg = resolve_config(o);
	const fs::path out = resolve_out_dir(o.out_dir);
	const std::vector<data::TimeSeries> series = load_series(cfg.data);
	const auto t0 = std::chrono::steady_clock::now();
	const train::BenchmarkResult result =
	    train::run_benchmark(series, cfg.benchmark(), [&](std::string_view m) { say(o, std::string(m)); });
	const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	write_benchmark_files(out, result);

	json manifest = manifest_base("benchmark", cfg);
	manifest["drops"] = drops_json(result.drops);
	manifest["train_windows"] = result.train_windows;
	manifest["test_windows"] = result.test_windows;
	manifest["series"] = result.series_ids;
	manifest["wall_clock_seconds"] = seconds;
	json models = json::array();
	for (const train::ModelRun &run : result.runs) {
		json m = {{"model", std::string(train::model_name(run.kind))},
		          {"seed", run.seed},
		          {"ok", run.ok},
		          {"seconds", run.seconds}};
		if (!run.ok) {
			m["error"] = run.error;
		}
		if (run.kind == train::ModelKind::arima) {
			m["forward_fill_fallbacks"] = run.fallbacks;
		}
		if (run.trace) {
			m["epochs_to_converge"] = run.epochs_to_converge;
		}
		models.push_back(m);
	}
	manifest["models"] = models;
	write_json(out / "manifest.json", manifest);
	say(o, benchmark_report_markdown(result));
	say(o, "results written to " + out.string());
	return result.succeeded() > 0 ? 0 : 1;
}

ClarkePairs read_clarke_pairs(std::istream &in) {
	std::string line;
	if (!std::getline(in, line)) {
		throw data::CsvError(1, "empty file");
	}
	const std::vector<std::string> header = split_fields(line);
	std::ptrdiff_t ref_col = -1, pred_col = -1;
	for (std::size_t i = 0; i < header.size(); ++i) {
		if (header[i] == "reference" || header[i] == "ref") {
			ref_col = static_cast<std::ptrdiff_t>(i);
		}
		if (header[i] == "predicted" || header[i] == "pred") {
			pred_col = static_cast<std::ptrdiff_t>(i);
		}
	}
	if (ref_col < 0 || pred_col < 0) {
		throw data::CsvError(1, "header needs 'reference' (or 'ref') and 'predicted' (or 'pred') columns");
	}
	ClarkePairs pairs;
	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (line.empty() || line == "\r") {
			continue;
		}
		const std::vector<std::string> f = split_fields(line);
		if (f.size() != header.size()) {
			throw data::CsvError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
			                                  std::to_string(f.size()));
		}
		const double r = parse_field(f[static_cast<std::size_t>(ref_col)], line_no, "reference");
		const double p = parse_field(f[static_cast<std::size_t>(pred_col)], line_no, "predicted");
		if (!(r > 0.0) || !(p > 0.0)) {
			throw data::CsvError(line_no, "glucose values must be > 0");
		}
		pairs.reference.push_back(r);
		pairs.predicted.push_back(p);
	}
	if (pairs.reference.empty()) {
		throw data::CsvError(line_no, "no data rows");
	}
	return pairs;
}

int cmd_clarke(const CommandOptions &o) {
	if (o.input.empty()) {
		throw std::invalid_argument("clarke needs --input");
	}
	std::ifstream in(o.input);
	if (!in) {
		throw std::runtime_error("cannot open " + o.input.string());
	}
	const ClarkePairs pairs = read_clarke_pairs(in);
	const fs::path out = resolve_out_dir(o.out_dir);
	const metrics::ClarkeSummary s = metrics::clarke_summary(pairs.reference, pairs.predicted);
	std::ostringstream csv;
	csv << "zone,percent\n";
	for (std::size_t z = 0; z < 5; ++z) {
		csv << metrics::zone_letter(static_cast<metrics::ClarkeZone>(z)) << ',' << format_roundtrip(s.percent[z]) << '\n';
	}
	write_text_file(out / "clarke_summary.csv", csv.str());
	write_text_file(out / "clarke.svg", clarke_grid_svg(pairs.reference, pairs.predicted, "Clarke error grid"));
	std::ostringstream text;
	text << "points " << s.count << '\n';
	for (std::size_t z = 0; z < 5; ++z) {
		text << metrics::zone_letter(static_cast<metrics::ClarkeZone>(z)) << ' ' << format_fixed(s.percent[z], 2)
		     << "%\n";
	}
	say(o, text.str());
	return 0;
}

train::BenchmarkResult read_results_csv(std::istream &in) {
	std::string line;
	if (!std::getline(in, line) || line != "model,horizon_steps,metric,mean,std") {
		throw data::CsvError(1, "results header must be 'model,horizon_steps,metric,mean,std'");
	}
	train::BenchmarkResult result;
	result.config.horizons.clear();
	result.config.models.clear();
	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (line.empty()) {
			continue;
		}
		const std::vector<std::string> f = split_fields(line);
		if (f.size() != 5) {
			throw data::CsvError(line_no, "expected 5 fields");
		}
		train::ModelKind kind;
		try {
			kind = train::parse_model_kind(f[0]);
		} catch (const std::invalid_argument &e) {
			throw data::CsvError(line_no, e.what());
		}
		const auto h = static_cast<std::size_t>(parse_field(f[1], line_no, "horizon_steps"));
		const auto metric = std::find(train::kMetricNames.begin(), train::kMetricNames.end(), f[2]);
		if (metric == train::kMetricNames.end()) {
			throw data::CsvError(line_no, "unknown metric '" + f[2] + "'");
		}
		auto run = std::find_if(result.runs.begin(), result.runs.end(),
		                        [&](const train::ModelRun &r) { return r.kind == kind; });
		if (run == result.runs.end()) {
			train::ModelRun r;
			r.kind = kind;
			r.ok = true;
			result.runs.push_back(r);
			result.config.models.push_back(kind);
			run = result.runs.end() - 1;
		}
		auto hm = std::find_if(run->horizons.begin(), run->horizons.end(),
		                       [&](const train::HorizonMetrics &x) { return x.horizon == h; });
		if (hm == run->horizons.end()) {
			run->horizons.push_back({});
			hm = run->horizons.end() - 1;
			hm->horizon = h;
		}
		if (std::find(result.config.horizons.begin(), result.config.horizons.end(), h) == result.config.horizons.end()) {
			result.config.horizons.push_back(h);
		}
		const auto k = static_cast<std::size_t>(metric - train::kMetricNames.begin());
		hm->summary[k] = {parse_field(f[3], line_no, "mean"), parse_field(f[4], line_no, "std")};
	}
	if (result.runs.empty()) {
		throw data::CsvError(line_no, "no result rows");
	}
	return result;
}

int cmd_report(const CommandOptions &o) {
	const fs::path source = o.input.empty() ? resolve_out_dir(o.out_dir) : o.input;
	const fs::path out = resolve_out_dir(o.out_dir);
	std::ifstream in(source / "results.csv");
	if (!in) {
		throw std::runtime_error("cannot open " + (source / "results.csv").string());
	}
	train::BenchmarkResult result = read_results_csv(in);
	if (std::ifstream min(source / "manifest.json"); min) {
		const json manifest = json::parse(min);
		const ExperimentConfig cfg = parse_config(manifest.at("config"));
		result.config.arima = cfg.model.arima;
		result.config.windowing = cfg.data.windowing;
		result.train_windows = manifest.value("train_windows", std::size_t{0});
		result.test_windows = manifest.value("test_windows", std::size_t{0});
		result.series_ids = manifest.value("series", std::vector<std::string>{});
	} else if (!o.config.empty()) {
		const ExperimentConfig cfg = resolve_config(o);
		result.config.arima = cfg.model.arima;
		result.config.windowing = cfg.data.windowing;
	}
	std::vector<train::TrainTrace> traces(result.runs.size());
	std::vector<std::pair<std::string, const train::TrainTrace *>> curves;
	for (std::size_t i = 0; i < result.runs.size(); ++i) {
		std::ifstream tin(source / "traces" / (model_slug(result.runs[i].kind) + ".csv"));
		if (!tin) {
			continue;
		}
		std::string line;
		std::getline(tin, line);
		std::size_t line_no = 1;
		while (std::getline(tin, line)) {
			++line_no;
			const std::vector<std::string> f = split_fields(line);
			if (f.size() != 6) {
				throw data::CsvError(line_no, "trace rows need 6 fields");
			}
			train::EpochRecord e;
			e.epoch = static_cast<std::size_t>(parse_field(f[0], line_no, "epoch"));
			e.train.reconstruction = parse_field(f[1], line_no, "reconstruction");
			e.train.prediction = parse_field(f[2], line_no, "prediction");
			e.train.kl = parse_field(f[3], line_no, "kl");
			e.train.total = parse_field(f[4], line_no, "total");
			e.validation_total = parse_field(f[5], line_no, "validation_total");
			traces[i].epochs.push_back(e);
		}
		if (!traces[i].epochs.empty()) {
			result.runs[i].trace = traces[i];
			result.runs[i].epochs_to_converge = train::epochs_to_converge(traces[i]);
			curves.emplace_back(std::string(train::model_name(result.runs[i].kind)), &traces[i]);
		}
	}
	write_text_file(out / "report.md", benchmark_report_markdown(result));
	if (!curves.empty()) {
		write_text_file(out / "figures" / "convergence.svg", loss_curves_svg(curves, "Validation loss per epoch", true));
	}
	say(o, "report written to " + (out / "report.md").string());
	return 0;
}

} // namespace latentcast::report
