#include "latentcast/baselines/arima.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace latentcast::baselines {

void ArConfig::validate(std::size_t history_length) const {
	if (p < 1) {
		throw std::invalid_argument("ArConfig: p must be >= 1");
	}
	if (d > 2) {
		throw std::invalid_argument("ArConfig: d must be 0, 1 or 2");
	}
	if (history_length <= p + d + 1) {
		throw std::invalid_argument("ArConfig: history of " + std::to_string(history_length) +
		                            " points is too short for p=" + std::to_string(p) + ", d=" + std::to_string(d));
	}
}

Vector difference(std::span<const double> series, std::size_t order) {
	Vector out(series.begin(), series.end());
	for (std::size_t k = 0; k < order; ++k) {
		if (out.size() < 2) {
			return {};
		}
		for (std::size_t i = 0; i + 1 < out.size(); ++i) {
			out[i] = out[i + 1] - out[i];
		}
		out.pop_back();
	}
	return out;
}

ArFit ar_fit(std::span<const double> history, const ArConfig &config) {
	config.validate(history.size());
	const Vector z = difference(history, config.d);
	const std::size_t p = config.p;
	const std::size_t rows = z.size() - p;
	Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
	Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
	for (std::size_t r = 0; r < rows; ++r) {
		const std::size_t t = r + p;
		target(static_cast<Eigen::Index>(r)) = z[t];
		for (std::size_t lag = 1; lag <= p; ++lag) {
			design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(lag - 1)) = z[t - lag];
		}
	}
	const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
	if (qr.rank() < static_cast<Eigen::Index>(p)) {
		throw std::runtime_error("ar_fit: singular design matrix (rank " + std::to_string(qr.rank()) + " < p=" +
		                         std::to_string(p) + " on " + std::to_string(rows) + " lagged rows)");
	}
	const Eigen::VectorXd phi = qr.solve(target);
	ArFit fit;
	fit.config = config;
	fit.coefficients.assign(phi.data(), phi.data() + phi.size());
	return fit;
}

Vector ar_forecast(const ArFit &fit, std::span<const double> history, std::size_t horizon) {
	const ArConfig &cfg = fit.config;
	cfg.validate(history.size());
	if (fit.coefficients.size() != cfg.p) {
		throw std::invalid_argument("ar_forecast: coefficient count does not match p");
	}
	// last value at every differencing level 0..d-1, needed to integrate back
	std::vector<double> tails;
	for (std::size_t k = 0; k < cfg.d; ++k) {
		tails.push_back(difference(history, k).back());
	}
	Vector z = difference(history, cfg.d);
	Vector future;
	future.reserve(horizon);
	for (std::size_t j = 0; j < horizon; ++j) {
		double next = 0.0;
		for (std::size_t lag = 1; lag <= cfg.p; ++lag) {
			next += fit.coefficients[lag - 1] * z[z.size() - lag];
		}
		z.push_back(next);
		future.push_back(next);
	}
	for (std::size_t k = cfg.d; k-- > 0;) {
		double level = tails[k];
		for (double &v : future) {
			level += v;
			v = level;
		}
	}
	return future;
}

Vector ar_fit_forecast(std::span<const double> history, const ArConfig &config, std::size_t horizon) {
	return ar_forecast(ar_fit(history, config), history, horizon);
}

} // namespace latentcast::baselines
