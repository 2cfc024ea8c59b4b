#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "latentcast/report/commands.hpp"

namespace {

using latentcast::report::CommandOptions;

struct Flags {
	std::string config;
	std::string out;
	std::string checkpoint;
	std::string input;
	bool with_model = false;
	bool quiet = false;
};

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Seeded VAE-RNN forecasting and imputation toolkit"};
	app.require_subcommand(1, 1);
	Flags flags;
	std::optional<std::uint64_t> seed;

	auto common = [&](CLI::App *sub) {
		sub->add_option("-c,--config", flags.config, "JSON configuration (defaults when omitted)")->check(CLI::ExistingFile);
		sub->add_option("-o,--out", flags.out,
		                std::string("Output directory (default: $") + latentcast::report::kOutputEnvVar + " or ./out)");
		sub->add_option_function<std::uint64_t>("-s,--seed", [&](const std::uint64_t &v) { seed = v; },
		                                        "Master seed override");
		sub->add_flag("-q,--quiet", flags.quiet, "Suppress progress output");
	};

	CLI::App *synth = app.add_subcommand("synth", "Write the synthetic triple, mask and plots");
	common(synth);
	synth->add_flag("--with-model", flags.with_model, "Also train a VAE and plot ts3 before/after imputation");

	CLI::App *train = app.add_subcommand("train", "Train a VAE-RNN and write a checkpoint");
	common(train);

	CLI::App *predict = app.add_subcommand("predict", "Forecast past the end of each series in a CSV");
	common(predict);
	predict->add_option("--checkpoint", flags.checkpoint, "Checkpoint from 'train'")->required()->check(CLI::ExistingFile);
	predict->add_option("-i,--input", flags.input, "Series CSV")->required()->check(CLI::ExistingFile);

	CLI::App *impute = app.add_subcommand("impute", "Fill missing values of each series in a CSV");
	common(impute);
	impute->add_option("--checkpoint", flags.checkpoint, "Checkpoint from 'train'")->required()->check(CLI::ExistingFile);
	impute->add_option("-i,--input", flags.input, "Series CSV")->required()->check(CLI::ExistingFile);

	CLI::App *evaluate = app.add_subcommand("evaluate", "Score a checkpoint on the configured test split");
	common(evaluate);
	evaluate->add_option("--checkpoint", flags.checkpoint, "Checkpoint from 'train'")->required()->check(CLI::ExistingFile);

	CLI::App *benchmark = app.add_subcommand("benchmark", "Train and score every configured model");
	common(benchmark);

	CLI::App *clarke = app.add_subcommand("clarke", "Clarke error grid of a reference/predicted CSV");
	common(clarke);
	clarke->add_option("-i,--input", flags.input, "CSV with reference and predicted columns")
	    ->required()
	    ->check(CLI::ExistingFile);

	CLI::App *report = app.add_subcommand("report", "Rebuild report.md from a benchmark directory");
	common(report);
	report->add_option("-i,--input", flags.input, "Benchmark output directory (default: the output directory)")
	    ->check(CLI::ExistingDirectory);

	CLI11_PARSE(app, argc, argv);

	CommandOptions options;
	options.config = flags.config;
	options.out_dir = flags.out;
	options.seed = seed;
	options.checkpoint = flags.checkpoint;
	options.input = flags.input;
	options.with_model = flags.with_model;
	options.log = flags.quiet ? nullptr : &std::cout;

	try {
		namespace r = latentcast::report;
		if (synth->parsed()) return r::cmd_synth(options);
		if (train->parsed()) return r::cmd_train(options);
		if (predict->parsed()) return r::cmd_predict(options);
		if (impute->parsed()) return r::cmd_impute(options);
		if (evaluate->parsed()) return r::cmd_evaluate(options);
		if (benchmark->parsed()) return r::cmd_benchmark(options);
		if (clarke->parsed()) return r::cmd_clarke(options);
		if (report->parsed()) return r::cmd_report(options);
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << '\n';
		return 2;
	}
	return 2;
}
