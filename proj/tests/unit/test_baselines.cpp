#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "latentcast/baselines/arima.hpp"
#include "latentcast/baselines/naive.hpp"
#include "latentcast/baselines/rnn_forecaster.hpp"
#include "latentcast/data/synth.hpp"
#include "latentcast/data/windows.hpp"
#include "latentcast/train/learners.hpp"
#include "test_support.hpp"

using namespace latentcast;
using namespace latentcast::baselines;
using latentcast::testing::check_gradients;
using latentcast::testing::random_matrix;

namespace {

Matrix column(std::initializer_list<double> v) {
	return Matrix::column(Vector(v));
}

} // namespace

TEST_CASE("forward fill") {
	const Matrix f = forward_fill_forecast(column({100, 110, 120}), {}, 4);
	CHECK(f == Matrix(4, 1, 120.0));
	const std::vector<std::uint8_t> mask{1, 1, 0};
	CHECK(forward_fill_forecast(column({100, 110, 120}), mask, 2) == Matrix(2, 1, 110.0));
	const std::vector<std::uint8_t> none{0, 0, 0};
	CHECK_THROWS_AS(forward_fill_forecast(column({1, 2, 3}), none, 2), std::invalid_argument);
	CHECK(forward_fill_forecast(Matrix(5, 2, 7.0), {}, 3) == Matrix(3, 2, 7.0));
}

TEST_CASE("forward fill RMSE on ts1 equals a direct loop") {
	data::SynthOptions o;
	const data::TimeSeries ts1 = data::synth_generate(o).series[0];
	const std::size_t T = 24, w = 6;
	double se = 0.0, se_oracle = 0.0;
	std::size_t n = 0;
	for (std::size_t s = 0; s + T + w <= ts1.length(); ++s) {
		Matrix x(T, 1);
		for (std::size_t t = 0; t < T; ++t) x(t, 0) = ts1.values(s + t, 0);
		const Matrix f = forward_fill_forecast(x, {}, w);
		for (std::size_t j = 0; j < w; ++j) {
			const double e = f(j, 0) - ts1.values(s + T + j, 0);
			se += e * e;
			const double eo = ts1.values(s + T - 1, 0) - ts1.values(s + T + j, 0);
			se_oracle += eo * eo;
			++n;
		}
	}
	CHECK(std::sqrt(se / n) == std::sqrt(se_oracle / n));
}

TEST_CASE("linear trend") {
	const Matrix f = linear_trend_forecast(column({1, 2, 3, 4}), {}, 2);
	CHECK(f(0, 0) == doctest::Approx(5.0).epsilon(1e-14));
	CHECK(f(1, 0) == doctest::Approx(6.0).epsilon(1e-14));
	const Matrix c = linear_trend_forecast(Matrix(6, 1, 3.5), {}, 3);
	for (double v : c.data()) CHECK(v == doctest::Approx(3.5).epsilon(1e-14));
	const std::vector<std::uint8_t> one{0, 0, 1, 0};
	CHECK_THROWS_AS(linear_trend_forecast(column({1, 2, 3, 4}), one, 2), std::invalid_argument);
	const std::vector<std::uint8_t> gappy{1, 0, 1, 0};
	const Matrix g = linear_trend_forecast(column({1, 99, 3, 99}), gappy, 1);
	CHECK(g(0, 0) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("line fit agrees with the normal equations") {
	SeededRng rng(17);
	for (int trial = 0; trial < 50; ++trial) {
		const std::size_t n = 3 + rng.uniform_index(30);
		Vector ts(n), ys(n);
		const double a = rng.uniform(-5, 5), b = rng.uniform(-2, 2);
		for (std::size_t i = 0; i < n; ++i) {
			ts[i] = static_cast<double>(i);
			ys[i] = a + b * ts[i] + rng.uniform(-0.3, 0.3);
		}
		double s1 = 0, st = 0, stt = 0, sy = 0, sty = 0;
		for (std::size_t i = 0; i < n; ++i) {
			s1 += 1;
			st += ts[i];
			stt += ts[i] * ts[i];
			sy += ys[i];
			sty += ts[i] * ys[i];
		}
		const double det = s1 * stt - st * st;
		const double intercept = (stt * sy - st * sty) / det;
		const double slope = (s1 * sty - st * sy) / det;
		const LineFit fit = fit_line(ts, ys);
		CHECK(std::abs(fit.slope - slope) <= 1e-10);
		CHECK(std::abs(fit.intercept - intercept) <= 1e-10);
	}
}

TEST_CASE("AR coefficient recovery and ramp continuation") {
	Vector geo(40);
	geo[0] = 5.0;
	for (std::size_t t = 1; t < geo.size(); ++t) geo[t] = 0.9 * geo[t - 1];
	const ArFit fit = ar_fit(geo, {1, 0});
	CHECK(std::abs(fit.coefficients[0] - 0.9) <= 1e-8);
	const Vector f = ar_forecast(fit, geo, 3);
	CHECK(f[0] == doctest::Approx(0.9 * geo.back()).epsilon(1e-8));

	SeededRng rng(3);
	Vector ramp(30);
	for (std::size_t t = 0; t < ramp.size(); ++t) ramp[t] = 2.0 + 0.5 * static_cast<double>(t);
	Vector noisy_ramp = ramp;
	for (std::size_t t = 0; t < ramp.size(); ++t) noisy_ramp[t] += 1e-3 * rng.standard_normal();
	// An exact ramp differences to a constant, so a single lag reproduces it.
	const Vector r = ar_fit_forecast(ramp, {1, 1}, 5);
	for (std::size_t j = 0; j < 5; ++j) {
		CHECK(r[j] == doctest::Approx(2.0 + 0.5 * static_cast<double>(30 + j)).epsilon(1e-10));
	}
	CHECK_THROWS_AS(ar_fit(ramp, {3, 1}), std::runtime_error);
	CHECK_NOTHROW(ar_fit(noisy_ramp, {3, 1}));
}

TEST_CASE("one-step forecast is the lag dot product") {
	SeededRng rng(44);
	for (int trial = 0; trial < 20; ++trial) {
		const ArConfig cfg{1 + rng.uniform_index(4), rng.uniform_index(3)};
		Vector h(40);
		for (double &v : h) v = rng.standard_normal();
		const ArFit fit = ar_fit(h, cfg);
		const Vector diff = difference(h, cfg.d);
		double next = 0.0;
		for (std::size_t i = 0; i < cfg.p; ++i) next += fit.coefficients[i] * diff[diff.size() - 1 - i];
		const Vector f = ar_forecast(fit, h, 1);
		if (cfg.d == 0) {
			CHECK(f[0] == doctest::Approx(next).epsilon(1e-12));
		} else if (cfg.d == 1) {
			CHECK(f[0] == doctest::Approx(h.back() + next).epsilon(1e-12));
		} else {
			CHECK(f[0] == doctest::Approx(2 * h.back() - h[h.size() - 2] + next).epsilon(1e-12));
		}
	}
}

TEST_CASE("differencing and config validation") {
	CHECK(difference(Vector{1, 4, 9, 16}, 1) == Vector{3, 5, 7});
	CHECK(difference(Vector{1, 4, 9, 16}, 2) == Vector{2, 2});
	CHECK(difference(Vector{1, 4}, 0) == Vector{1, 4});
	CHECK_THROWS_AS((ArConfig{0, 1}).validate(50), std::invalid_argument);
	CHECK_THROWS_AS((ArConfig{2, 3}).validate(50), std::invalid_argument);
	CHECK_THROWS_AS((ArConfig{6, 1}).validate(8), std::invalid_argument);
	CHECK_NOTHROW((ArConfig{6, 1}).validate(24));
}

TEST_CASE("recurrent forecaster gradient matches central differences") {
	SeededRng rng(808);
	for (rnn::CellKind cell : {rnn::CellKind::gru, rnn::CellKind::lstm}) {
		for (bool bi : {false, true}) {
			for (int trial = 0; trial < 3; ++trial) {
				RnnForecasterConfig c{cell, bi, 1 + rng.uniform_index(2), 1 + rng.uniform_index(4)};
				const RnnForecasterParams p = RnnForecasterParams::initialized(c, rng);
				const std::size_t T = 1 + rng.uniform_index(4), w = 1 + rng.uniform_index(3);
				const Matrix x = random_matrix(T, c.input_dim, rng);
				const Matrix y = random_matrix(w, c.input_dim, rng);
				RnnForecastCache cache;
				rnn_forecast(p, x, w, &cache);
				const RnnForecasterParams g = rnn_forecast_backward(p, cache, y);
				const auto report = check_gradients<RnnForecasterParams>(p, g, [&](const RnnForecasterParams &q) {
					RnnForecastCache c2;
					rnn_forecast(q, x, w, &c2);
					return rnn_forecast_loss(c2, y);
				});
				CAPTURE(report.worst_tensor);
				CHECK(report.max_relative_error < 1e-4);
			}
		}
	}
}

TEST_CASE("recurrent forecaster shapes and guards") {
	SeededRng rng(1);
	const auto gru = RnnForecasterParams::initialized({rnn::CellKind::gru, false, 1, 4}, rng);
	const auto lstm = RnnForecasterParams::initialized({rnn::CellKind::lstm, false, 1, 4}, rng);
	const auto bigru = RnnForecasterParams::initialized({rnn::CellKind::gru, true, 1, 4}, rng);
	CHECK(count_parameters(gru) == 3 * (4 + 16 + 4) + 4 + 1);
	CHECK(count_parameters(lstm) == 4 * (4 + 16 + 4) + 4 + 1);
	CHECK(count_parameters(bigru) == 2 * 3 * (4 + 16 + 4) + 8 + 1);
	const Matrix x = random_matrix(5, 1, rng);
	CHECK(rnn_forecast(bigru, x, 3).rows() == 3);
	RnnForecastCache cache;
	rnn_forecast(gru, x, 2, &cache);
	auto moved = gru;
	moved.head.bias(0, 0) += 1.0;
	CHECK_THROWS_AS(rnn_forecast_backward(moved, cache, Matrix(2, 1)), std::logic_error);
	CHECK_THROWS_AS(rnn_forecast(gru, Matrix(5, 2), 2), std::invalid_argument);
}

TEST_CASE("recurrent forecaster training") {
	data::SynthOptions so;
	so.n_samples = 400;
	std::vector<data::TimeSeries> series{data::synth_generate(so).series[0]};
	data::WindowingOptions wo;
	wo.window = 12;
	wo.horizon = 3;
	wo.stride = 2;
	const data::WindowedDataset ds = data::normalize(data::make_windows(series, wo));
	SeededRng rng(0);
	const auto init = RnnForecasterParams::initialized({rnn::CellKind::gru, false, 1, 8}, rng);

	train::TrainConfig cfg;
	cfg.epochs = 0;
	const auto none = train::rnn_forecast_train(init, ds, cfg);
	CHECK(fingerprint(none.params) == fingerprint(init));
	CHECK(none.trace.epochs.empty());

	cfg.epochs = 20;
	cfg.adam.learning_rate = 1e-2;
	const auto trained = train::rnn_forecast_train(init, ds, cfg);
	REQUIRE(trained.trace.epochs.size() == 20);
	CHECK(trained.trace.epochs.back().train.total < trained.trace.epochs.front().train.total);
}
