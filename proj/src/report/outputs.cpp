#include "latentcast/report/outputs.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "latentcast/numeric/parameters.hpp"
#include "latentcast/report/svg.hpp"

namespace latentcast::report {

using nlohmann::json;

namespace {

json strings_of(const Vector &v) {
	json out = json::array();
	for (double x : v) {
		out.push_back(format_roundtrip(x));
	}
	return out;
}

double parse_double(std::string_view text, const std::string &context) {
	double value = 0.0;
	const char *end = text.data() + text.size();
	auto [ptr, ec] = std::from_chars(text.data(), end, value);
	if (ec != std::errc{} || ptr != end) {
		throw std::runtime_error("checkpoint: bad number '" + std::string(text) + "' in " + context);
	}
	return value;
}

Vector doubles_of(const json &arr, const std::string &context) {
	Vector out;
	for (const json &v : arr) {
		out.push_back(parse_double(v.get<std::string>(), context));
	}
	return out;
}

const train::HorizonMetrics *find_horizon(const train::ModelRun &run, std::size_t horizon) {
	for (const train::HorizonMetrics &h : run.horizons) {
		if (h.horizon == horizon) {
			return &h;
		}
	}
	return nullptr;
}

std::size_t metric_index(std::string_view name) {
	for (std::size_t k = 0; k < train::kMetricNames.size(); ++k) {
		if (train::kMetricNames[k] == name) {
			return k;
		}
	}
	throw std::invalid_argument("unknown metric " + std::string(name));
}

/// Column-aligned Markdown table.
std::string markdown_table(const std::vector<std::string> &header, const std::vector<std::vector<std::string>> &rows) {
	std::vector<std::size_t> width(header.size());
	for (std::size_t c = 0; c < header.size(); ++c) {
		width[c] = header[c].size();
		for (const auto &r : rows) {
			// "±" is two bytes but one column
			const std::size_t n = r[c].size() - static_cast<std::size_t>(std::count(r[c].begin(), r[c].end(), '\xC2'));
			width[c] = std::max(width[c], n);
		}
	}
	auto emit = [&](std::ostringstream &out, const std::vector<std::string> &cells) {
		out << '|';
		for (std::size_t c = 0; c < cells.size(); ++c) {
			const std::size_t n =
			    cells[c].size() - static_cast<std::size_t>(std::count(cells[c].begin(), cells[c].end(), '\xC2'));
			out << ' ' << cells[c] << std::string(width[c] - n, ' ') << " |";
		}
		out << '\n';
	};
	std::ostringstream out;
	emit(out, header);
	out << '|';
	for (std::size_t c = 0; c < header.size(); ++c) {
		out << ' ' << std::string(width[c], '-') << (c == 0 ? " |" : ":|");
	}
	out << '\n';
	for (const auto &r : rows) {
		emit(out, r);
	}
	return out.str();
}

std::string defaults_note(const train::BenchmarkResult &r) {
	const auto &c = r.config;
	return "Baseline settings: ARIMA(p=" + std::to_string(c.arima.p) + ", d=" + std::to_string(c.arima.d) +
	       ", no MA terms) fit per input window; ForwardFill and LinearTrend use the same T=" +
	       std::to_string(c.windowing.window) + " input window as the learned models.";
}

} // namespace

void write_checkpoint(std::ostream &out, const Checkpoint &ckpt) {
	const model::VaeRnnConfig &c = ckpt.params.config;
	json header = {
	    {"cell", std::string(rnn::to_string(c.cell))},
	    {"input_dim", c.input_dim},
	    {"hidden_size", c.hidden_size},
	    {"latent_dim", c.latent_dim},
	    {"window", c.window},
	    {"horizon", c.horizon},
	    {"mean", strings_of(ckpt.stats.mean)},
	    {"stddev", strings_of(ckpt.stats.stddev)},
	    {"channels", ckpt.channels},
	    {"step_seconds", ckpt.step_seconds},
	};
	out << "latentcast-checkpoint " << kCheckpointVersion << '\n';
	out << header.dump() << '\n';
	ckpt.params.visit([&](const std::string &name, const Matrix &m) {
		out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
		for (std::size_t i = 0; i < m.size(); ++i) {
			out << (i == 0 ? "" : " ") << format_roundtrip(m.data()[i]);
		}
		out << '\n';
	});
	out << "end\n";
}

Checkpoint read_checkpoint(std::istream &in) {
	std::string line;
	if (!std::getline(in, line)) {
		throw std::runtime_error("checkpoint: empty input");
	}
	{
		std::istringstream first(line);
		std::string magic;
		int version = 0;
		first >> magic >> version;
		if (magic != "latentcast-checkpoint" || version != kCheckpointVersion) {
			throw std::runtime_error("checkpoint: unsupported header '" + line + "'");
		}
	}
	if (!std::getline(in, line)) {
		throw std::runtime_error("checkpoint: missing configuration line");
	}
	Checkpoint ckpt;
	model::VaeRnnConfig cfg;
	try {
		const json h = json::parse(line);
		cfg.cell = rnn::parse_cell_kind(h.at("cell").get<std::string>());
		cfg.input_dim = h.at("input_dim").get<std::size_t>();
		cfg.hidden_size = h.at("hidden_size").get<std::size_t>();
		cfg.latent_dim = h.at("latent_dim").get<std::size_t>();
		cfg.window = h.at("window").get<std::size_t>();
		cfg.horizon = h.at("horizon").get<std::size_t>();
		ckpt.stats.mean = doubles_of(h.at("mean"), "mean");
		ckpt.stats.stddev = doubles_of(h.at("stddev"), "stddev");
		ckpt.channels = h.at("channels").get<std::vector<std::string>>();
		ckpt.step_seconds = h.at("step_seconds").get<std::int64_t>();
	} catch (const json::exception &e) {
		throw std::runtime_error(std::string("checkpoint: bad configuration line: ") + e.what());
	}
	cfg.validate();
	if (ckpt.stats.mean.size() != cfg.input_dim || ckpt.stats.stddev.size() != cfg.input_dim) {
		throw std::runtime_error("checkpoint: normalization size does not match input_dim");
	}
	SeededRng rng(0);
	ckpt.params = model::VaeRnnParams::initialized(cfg, rng);

	std::map<std::string, Matrix> loaded;
	while (std::getline(in, line) && line != "end") {
		std::istringstream head(line);
		std::string tag, name;
		std::size_t rows = 0, cols = 0;
		if (!(head >> tag >> name >> rows >> cols) || tag != "tensor") {
			throw std::runtime_error("checkpoint: expected a tensor header, got '" + line + "'");
		}
		std::string values;
		if (!std::getline(in, values)) {
			throw std::runtime_error("checkpoint: tensor " + name + " has no data line");
		}
		Matrix m(rows, cols);
		std::size_t i = 0;
		std::size_t pos = 0;
		while (pos < values.size()) {
			std::size_t next = values.find(' ', pos);
			if (next == std::string::npos) {
				next = values.size();
			}
			if (i >= m.size()) {
				throw std::runtime_error("checkpoint: tensor " + name + " has too many values");
			}
			m.data()[i++] = parse_double(std::string_view(values).substr(pos, next - pos), name);
			pos = next + 1;
		}
		if (i != m.size()) {
			throw std::runtime_error("checkpoint: tensor " + name + " has too few values");
		}
		loaded.emplace(name, std::move(m));
	}
	if (line != "end") {
		throw std::runtime_error("checkpoint: truncated file");
	}
	std::size_t used = 0;
	ckpt.params.visit([&](const std::string &name, Matrix &m) {
		auto it = loaded.find(name);
		if (it == loaded.end()) {
			throw std::runtime_error("checkpoint: missing tensor " + name);
		}
		if (!it->second.same_shape(m)) {
			throw std::runtime_error("checkpoint: tensor " + name + " has the wrong shape");
		}
		m = it->second;
		++used;
	});
	if (used != loaded.size()) {
		throw std::runtime_error("checkpoint: unexpected extra tensors");
	}
	return ckpt;
}

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
	std::ostringstream out;
	write_checkpoint(out, ckpt);
	write_text_file(path, out.str());
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw std::runtime_error("cannot open checkpoint " + path.string());
	}
	return read_checkpoint(in);
}

std::string format_mean_std(const metrics::MeanStd &v) {
	return format_fixed(v.mean, 2) + " ± " + format_fixed(v.std, 2);
}

void write_results_csv(std::ostream &out, const train::BenchmarkResult &result) {
	out << "model,horizon_steps,metric,mean,std\n";
	for (const train::ModelRun &run : result.runs) {
		if (!run.ok) {
			continue;
		}
		for (const train::HorizonMetrics &h : run.horizons) {
			for (std::size_t k = 0; k < train::kMetricNames.size(); ++k) {
				out << train::model_name(run.kind) << ',' << h.horizon << ',' << train::kMetricNames[k] << ','
				    << format_roundtrip(h.summary[k].mean) << ',' << format_roundtrip(h.summary[k].std) << '\n';
			}
		}
	}
}

void write_series_metrics_csv(std::ostream &out, const train::BenchmarkResult &result) {
	out << "model,horizon_steps,series_id,points,metric,value\n";
	for (const train::ModelRun &run : result.runs) {
		for (const train::HorizonMetrics &h : run.horizons) {
			for (const train::SeriesMetrics &s : h.per_series) {
				for (std::size_t k = 0; k < train::kMetricNames.size(); ++k) {
					out << train::model_name(run.kind) << ',' << h.horizon << ',' << s.series_id << ',' << s.points
					    << ',' << train::kMetricNames[k] << ',' << format_roundtrip(s.values[k]) << '\n';
				}
			}
		}
	}
}

void write_predictions_csv(std::ostream &out, const train::BenchmarkResult &result, const train::ModelRun &run) {
	out << "model,window,series_id,step,reference,predicted\n";
	for (std::size_t w = 0; w < run.predictions.size(); ++w) {
		const std::string &id = result.series_ids.at(result.test_series.at(w));
		for (std::size_t j = 0; j < run.predictions[w].size(); ++j) {
			out << train::model_name(run.kind) << ',' << w << ',' << id << ',' << j + 1 << ','
			    << format_roundtrip(result.references[w][j]) << ',' << format_roundtrip(run.predictions[w][j]) << '\n';
		}
	}
}

void write_trace_csv(std::ostream &out, const train::TrainTrace &trace) {
	out << "epoch,reconstruction,prediction,kl,total,validation_total\n";
	for (const train::EpochRecord &e : trace.epochs) {
		out << e.epoch << ',' << format_roundtrip(e.train.reconstruction) << ',' << format_roundtrip(e.train.prediction)
		    << ',' << format_roundtrip(e.train.kl) << ',' << format_roundtrip(e.train.total) << ','
		    << format_roundtrip(e.validation_total) << '\n';
	}
}

std::string horizon_label(std::size_t steps, std::int64_t step_seconds) {
	const std::int64_t minutes = static_cast<std::int64_t>(steps) * step_seconds / 60;
	if (static_cast<std::int64_t>(steps) * step_seconds % 60 != 0) {
		return std::to_string(steps) + " steps";
	}
	if (minutes >= 60 && minutes % 60 == 0) {
		return std::to_string(minutes / 60) + " h";
	}
	return std::to_string(minutes) + " min";
}

std::string accuracy_table_markdown(const train::BenchmarkResult &result, std::size_t horizon) {
	std::vector<std::vector<std::string>> rows;
	for (const train::ModelRun &run : result.runs) {
		const train::HorizonMetrics *h = run.ok ? find_horizon(run, horizon) : nullptr;
		if (h == nullptr) {
			continue;
		}
		rows.push_back({std::string(train::model_name(run.kind)), format_mean_std(h->summary[metric_index("rmse")]),
		                format_mean_std(h->summary[metric_index("nmape")]),
		                format_mean_std(h->summary[metric_index("mape")])});
	}
	return markdown_table({"Model", "RMSE (mg/dL)", "nMAPE (%)", "MAPE (%)"}, rows);
}

std::string clarke_table_markdown(const train::BenchmarkResult &result, std::size_t horizon) {
	std::vector<std::vector<std::string>> rows;
	for (const train::ModelRun &run : result.runs) {
		const train::HorizonMetrics *h = run.ok ? find_horizon(run, horizon) : nullptr;
		if (h == nullptr) {
			continue;
		}
		std::vector<std::string> row{std::string(train::model_name(run.kind))};
		for (std::string_view z : {"zone_a", "zone_b", "zone_c", "zone_d", "zone_e"}) {
			row.push_back(format_mean_std(h->summary[metric_index(z)]));
		}
		rows.push_back(std::move(row));
	}
	return markdown_table({"Model", "A (%)", "B (%)", "C (%)", "D (%)", "E (%)"}, rows);
}

std::string long_horizon_table_markdown(const train::BenchmarkResult &result) {
	std::vector<std::string> header{"Model"};
	for (std::size_t h : result.config.horizons) {
		header.push_back(horizon_label(h) + " nMAPE");
	}
	std::vector<std::vector<std::string>> rows;
	for (const train::ModelRun &run : result.runs) {
		if (!run.ok) {
			continue;
		}
		std::vector<std::string> row{std::string(train::model_name(run.kind))};
		for (std::size_t h : result.config.horizons) {
			const train::HorizonMetrics *m = find_horizon(run, h);
			row.push_back(m != nullptr ? format_mean_std(m->summary[metric_index("nmape")]) : "--");
		}
		rows.push_back(std::move(row));
	}
	return markdown_table(header, rows);
}

std::string convergence_table_markdown(const train::BenchmarkResult &result) {
	std::vector<std::vector<std::string>> rows;
	for (const train::ModelRun &run : result.runs) {
		if (!run.ok || !run.trace || run.trace->epochs.empty()) {
			continue;
		}
		const train::EpochRecord &last = run.trace->epochs.back();
		rows.push_back({std::string(train::model_name(run.kind)), std::to_string(run.trace->epochs.size()),
		                std::to_string(run.epochs_to_converge), format_fixed(run.trace->epochs.front().train.total, 4),
		                format_fixed(last.train.total, 4), format_fixed(last.validation_total, 4)});
	}
	return markdown_table({"Model", "Epochs", "Epochs to converge", "First train loss", "Final train loss",
	                       "Final validation loss"},
	                      rows);
}

std::string benchmark_report_markdown(const train::BenchmarkResult &result) {
	std::ostringstream out;
	out << "# Benchmark results\n\n";
	out << "Windows: " << result.train_windows << " train, " << result.test_windows << " test; series: "
	    << result.series_ids.size() << ". Metrics are mean ± std across series.\n\n";
	out << defaults_note(result) << "\n\n";
	for (std::size_t h : result.config.horizons) {
		out << "## Forecasting accuracy (" << horizon_label(h) << ", " << h << " steps)\n\n";
		out << accuracy_table_markdown(result, h) << '\n';
	}
	const auto &hs = result.config.horizons;
	const std::size_t clarke_h = std::find(hs.begin(), hs.end(), 12) != hs.end() ? 12 : hs.front();
	out << "## Clarke error grid (" << horizon_label(clarke_h) << ", " << clarke_h << " steps)\n\n";
	out << clarke_table_markdown(result, clarke_h) << '\n';
	out << "## nMAPE by horizon\n\n" << long_horizon_table_markdown(result) << '\n';
	out << "## Convergence\n\nEpochs to converge: first epoch whose validation loss is within 1% of the run's "
	       "minimum.\n\n";
	out << convergence_table_markdown(result) << '\n';
	bool any_failed = false;
	for (const train::ModelRun &run : result.runs) {
		if (!run.ok) {
			if (!any_failed) {
				out << "## Failed models\n\n";
				any_failed = true;
			}
			out << "- " << train::model_name(run.kind) << ": " << run.error << '\n';
		}
	}
	return out.str();
}

std::string model_slug(train::ModelKind kind) {
	std::string s(train::model_name(kind));
	for (char &c : s) {
		c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
	}
	return s;
}

void write_text_file(const std::filesystem::path &path, const std::string &content) {
	if (path.has_parent_path()) {
		std::error_code ec;
		std::filesystem::create_directories(path.parent_path(), ec);
		if (ec) {
			throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
		}
	}
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw std::runtime_error("cannot write " + path.string());
	}
	out << content;
	if (!out) {
		throw std::runtime_error("write failed for " + path.string());
	}
}

std::string utc_now_iso8601() {
	const auto now = std::chrono::system_clock::now();
	const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
	return data::format_iso8601(static_cast<data::Timestamp>(secs));
}

} // namespace latentcast::report
